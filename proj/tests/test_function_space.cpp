#include "ergopt/a_sequence.hpp"
#include "ergopt/cylinder.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ergopt;

namespace {

const Alphabet A2(2);

CylinderFunction worked() { return CylinderFunction(A2, 2, {Rational(0), Rational(0), Rational(2), Rational(0)}); }

// var_j by scanning every pair of table entries with a common j-prefix.
Rational brute_var(const CylinderFunction& f, std::size_t j) {
  Rational best(0);
  const std::uint32_t m = f.alphabet().size;
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = 0; b < f.size(); ++b) {
      const Word wa = index_word(a, f.depth(), m), wb = index_word(b, f.depth(), m);
      if (j <= f.depth() && std::equal(wa.begin(), wa.begin() + static_cast<std::ptrdiff_t>(j), wb.begin()))
        best = std::max(best, Rational(abs(f[a] - f[b])));
    }
  return best;
}

CylinderFunction random_function(std::mt19937_64& rng, Alphabet a, std::size_t depth) {
  std::vector<Rational> t(checked_pow(a.size, depth));
  for (auto& v : t) v = ratio(static_cast<long>(rng() % 129) - 64, 1 + static_cast<long>(rng() % 16));
  return CylinderFunction(a, depth, t);
}

}  // namespace

TEST(ASequence, Values) {
  EXPECT_EQ(ASequence::dyadic()(3), Rational(1, 8));
  EXPECT_EQ(ASequence::triangular_dyadic()(3), Rational(1, 64));
  EXPECT_EQ(ASequence::geometric(1, Rational(1, 4))(2), Rational(1, 16));
  const auto c = ASequence::custom_table({Rational(1), Rational(1, 3)}, Rational(1, 2));
  EXPECT_EQ(c(1), Rational(1, 3));
  EXPECT_EQ(c(3), Rational(1, 12));
  EXPECT_THROW(ASequence::geometric(1, Rational(1)), std::invalid_argument);
}

TEST(ASequence, DeltaAndSuperContinuity) {
  EXPECT_EQ(*ASequence::dyadic().delta(), Rational(1, 2));
  EXPECT_EQ(*ASequence::triangular_dyadic().delta(), Rational(1, 2));
  EXPECT_EQ(*ASequence::geometric(1, Rational(1, 4)).delta(), Rational(3, 4));
  EXPECT_EQ(ASequence::triangular_dyadic().super_continuity(), SuperContinuity::Yes);
  EXPECT_EQ(ASequence::dyadic().super_continuity(), SuperContinuity::No);
  EXPECT_EQ(ASequence::custom_table({Rational(1)}, Rational(1, 2)).super_continuity(), SuperContinuity::Unknown);
}

TEST(GammaA, Examples) {
  EXPECT_EQ(gamma_A(ASequence::geometric(1, Rational(1, 4))), Rational(88, 9));
  EXPECT_EQ(gamma_A(ASequence::dyadic()), 20);
  EXPECT_EQ(gamma_A(ASequence::triangular_dyadic()), 20);
}

TEST(Lacunarize, Examples) {
  const auto id = lacunarize(ASequence::dyadic());
  EXPECT_EQ(id.m, 1);
  EXPECT_EQ(id.m_prime, 1);
  for (Index n = 0; n < 10; ++n) EXPECT_EQ(id.b(n), ASequence::dyadic()(n));

  // A_1 = A_0 violates any lacunary ratio; the repair lowers A_1 only.
  const auto bad = ASequence::custom_table({Rational(1), Rational(1), Rational(1, 4)}, Rational(1, 2));
  EXPECT_FALSE(bad.is_lacunary());
  const auto fix = lacunarize(bad);
  EXPECT_TRUE(fix.b.is_lacunary());
  EXPECT_LT(fix.b(1), bad(1));
  EXPECT_EQ(fix.b(0), bad(0));
  for (Index n = 2; n < 8; ++n) EXPECT_EQ(fix.b(n), bad(n));
  // M' = max A_n / B_n over the changed terms.
  EXPECT_EQ(fix.m_prime, bad(1) / fix.b(1));
  EXPECT_GE(fix.m, 1);
  EXPECT_EQ(gamma_A(bad), fix.m * fix.m_prime * gamma_A(fix.b));
}

TEST(DistanceA, Examples) {
  const Point x = Point::periodic(A2, {0, 1}), y = Point::periodic(A2, {0, 1, 1, 0});
  EXPECT_EQ(d_A(x, x, ASequence::triangular_dyadic()), 0);
  EXPECT_EQ(d_A(x, y, ASequence::triangular_dyadic()), Rational(1, 8));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    Word p1(rng() % 3), q1(1 + rng() % 4), p2(rng() % 3), q2(1 + rng() % 4);
    for (auto* w : {&p1, &q1, &p2, &q2})
      for (auto& s : *w) s = rng() % 2;
    const Point a(A2, p1, q1), b(A2, p2, q2);
    EXPECT_EQ(d_A(a, b, ASequence::dyadic()), d(a, b));
  }
}

TEST(DistanceToOrbitTruncated, Examples) {
  const PeriodicOrbit y01(A2, {0, 1}), y0(A2, {0});
  EXPECT_EQ(d_A_to_orbit_truncated({0, 1, 0}, y01, ASequence::dyadic()), Rational(1, 8));
  EXPECT_EQ(d_A_to_orbit_truncated({0, 0}, y01, ASequence::dyadic()), Rational(1, 2));
  EXPECT_EQ(d_A_to_orbit_truncated({1, 1}, y0, ASequence::triangular_dyadic()), 1);
}

TEST(DistanceToOrbitTruncated, WithinAKOfExact) {
  const ASequence a = ASequence::triangular_dyadic();
  const PeriodicOrbit y(A2, {0, 0, 1});
  const std::size_t K = 5;
  const CylinderFunction g = truncated_orbit_distance(y, a, K);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 300; ++t) {
    Word pre(rng() % 8), per(1 + rng() % 4);
    for (auto& s : pre) s = rng() % 2;
    for (auto& s : per) s = rng() % 2;
    const Point x(A2, pre, per);
    Rational exact = 1;
    for (const Point& p : y.points()) exact = std::min(exact, d_A(x, p, a));
    EXPECT_LE(abs(g(x) - exact), a(K));
    EXPECT_EQ(g(x), d_A_to_orbit_truncated(x.prefix(K), y, a));
  }
}

TEST(Variation, Examples) {
  const CylinderFunction step(A2, 1, {Rational(0), Rational(1)});
  EXPECT_EQ(var_k(step, 0), 1);
  EXPECT_EQ(var_k(step, 1), 0);
  const CylinderFunction c = CylinderFunction::constant(A2, 3, Rational(5, 7));
  for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(var_k(c, j), 0);
  EXPECT_EQ(var_k(worked(), 0), 2);
  EXPECT_EQ(var_k(worked(), 1), 2);
  EXPECT_EQ(tail_sum_V(worked(), 0), 4);
  EXPECT_EQ(tail_sum_V(worked(), 1), 2);
  EXPECT_EQ(tail_sum_V(worked(), 2), 0);
  EXPECT_EQ(tail_sum_V(c, 0), 0);
}

TEST(Variation, MatchesPairScan) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 40; ++t) {
    const Alphabet a(2 + rng() % 2);
    const auto f = random_function(rng, a, 1 + rng() % 3);
    for (std::size_t j = 0; j <= f.depth() + 1; ++j) EXPECT_EQ(var_k(f, j), brute_var(f, j));
    const auto lifted = lift_depth(f, f.depth() + 2);
    for (std::size_t j = 0; j <= f.depth() + 2; ++j) EXPECT_EQ(var_k(lifted, j), var_k(f, j));
  }
}

TEST(ANorm, Examples) {
  const CylinderFunction step(A2, 1, {Rational(0), Rational(1)});
  const NormReport r = a_norm(step, ASequence::dyadic());
  EXPECT_EQ(r.lip_A, 1);
  EXPECT_EQ(r.a_norm, 2);
  const NormReport w = a_norm(worked(), ASequence::triangular_dyadic());
  EXPECT_EQ(w.lip_A, 4);
  EXPECT_EQ(w.sup_norm, 2);
  EXPECT_EQ(w.a_norm, 6);
  EXPECT_EQ(a_norm(scale(Rational(-3, 2), worked()), ASequence::triangular_dyadic()).a_norm, 9);
}

TEST(ANorm, TriangleAndTailFact) {
  std::mt19937_64 rng(13);
  const std::vector<ASequence> seqs{ASequence::dyadic(), ASequence::triangular_dyadic(),
                                    ASequence::geometric(1, Rational(1, 3))};
  for (int t = 0; t < 60; ++t) {
    const Alphabet a(2 + rng() % 2);
    const auto f = random_function(rng, a, 1 + rng() % 3), g = random_function(rng, a, 1 + rng() % 3);
    for (const auto& A : seqs) {
      EXPECT_LE(a_norm(add(f, g), A).a_norm, a_norm(f, A).a_norm + a_norm(g, A).a_norm);
      const Rational gamma = gamma_A(A), fn = a_norm(f, A).a_norm;
      for (std::size_t n = 0; n <= f.depth(); ++n) EXPECT_LE(tail_sum_V(f, n), gamma * fn * A(n));
    }
  }
}

TEST(Birkhoff, Examples) {
  const CylinderFunction step(A2, 1, {Rational(0), Rational(1)});
  const Point x = Point::periodic(A2, {0, 1});
  EXPECT_EQ(birkhoff_sum(step, x, 0), 0);
  EXPECT_EQ(birkhoff_sum(step, x, 4), 2);
  const Point z(A2, {1, 1, 0}, {0, 1, 1});
  for (Index n = 0; n < 5; ++n)
    for (Index m = 0; m < 5; ++m)
      EXPECT_EQ(birkhoff_sum(worked(), z, n + m), birkhoff_sum(worked(), z, n) + birkhoff_sum(worked(), z.shifted(n), m));
}

TEST(ErgodicAverage, Examples) {
  EXPECT_EQ(ergodic_average(CylinderFunction::constant(A2, 2, Rational(3)), PeriodicOrbit(A2, {0, 1, 1})), 3);
  EXPECT_EQ(ergodic_average(worked(), PeriodicOrbit(A2, {0, 1})), 1);
  EXPECT_EQ(ergodic_average(worked(), PeriodicOrbit(A2, {0})), 0);
}

TEST(Algebra, Examples) {
  const CylinderFunction step(A2, 1, {Rational(2), Rational(5)});
  const auto lifted = lift_depth(step, 2);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(lifted.at(index_word(i, 2, 2)), step.at({index_word(i, 2, 2)[0]}));
  const auto sh = compose_shift(step);
  EXPECT_EQ(sh.depth(), 2u);
  for (Symbol a : {0, 1})
    for (Symbol b : {0, 1}) EXPECT_EQ(sh.at({a, b}), step.at({b}));
  EXPECT_TRUE(add(worked(), scale(-1, worked())).is_zero());
  EXPECT_THROW(add(worked(), CylinderFunction::zero(Alphabet(3), 1)), AlphabetMismatch);
  EXPECT_TRUE(same_function(add(step, worked()), add(lift_depth(step, 2), worked())));
}

TEST(Cylinder, TableValidation) {
  EXPECT_THROW(CylinderFunction(A2, 2, {Rational(1)}), std::invalid_argument);
  const CylinderFunction f(A2, 2, {Rational(1, 2), Rational(1, 3), Rational(-1, 6), Rational(0)});
  EXPECT_EQ(f.denominator(), 6);
  EXPECT_EQ(f[2], Rational(-1, 6));
}
