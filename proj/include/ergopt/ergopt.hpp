#pragma once

#include "ergopt/a_sequence.hpp"
#include "ergopt/cylinder.hpp"
#include "ergopt/debruijn.hpp"
#include "ergopt/howard.hpp"
#include "ergopt/io.hpp"
#include "ergopt/lockin.hpp"
#include "ergopt/maxplus.hpp"
#include "ergopt/necklace.hpp"
#include "ergopt/random.hpp"
#include "ergopt/rational.hpp"
#include "ergopt/shift.hpp"
#include "ergopt/verify.hpp"
