#include "ergopt/shift.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ergopt;

namespace {

const Alphabet A2(2);

Point P(Word pre, Word per) { return Point(A2, std::move(pre), std::move(per)); }
Point Per(Word per) { return Point::periodic(A2, std::move(per)); }

}  // namespace

TEST(Point, CanonicalForm) {
  EXPECT_EQ(Per({0, 1, 0, 1}), Per({0, 1}));
  EXPECT_EQ(P({0, 1}, {0, 1}), Per({0, 1}));
  EXPECT_EQ(P({1}, {0, 1}), Per({1, 0}));
  EXPECT_EQ(P({1, 1}, {0, 1}), P({1}, {1, 0}));
  EXPECT_EQ(P({1}, {0}).preperiod(), Word{1});
  EXPECT_THROW(P({}, {}), std::invalid_argument);
  EXPECT_THROW(Point(A2, {}, {2}), std::invalid_argument);
}

TEST(Shift, Examples) {
  EXPECT_EQ(shift(Per({0, 1})), Per({1, 0}));
  EXPECT_EQ(shift(P({1}, {0})), Per({0}));
  EXPECT_EQ(shift(P({0, 0}, {1, 0})), P({0}, {1, 0}));
}

TEST(FirstDisagreement, Examples) {
  EXPECT_FALSE(first_disagreement(Per({0, 1}), Per({0, 1})).has_value());
  EXPECT_EQ(first_disagreement(Per({0, 1}), Per({0, 1, 1, 0})), 2u);
  EXPECT_EQ(first_disagreement(P({1}, {0}), Per({0})), 0u);
  EXPECT_THROW(first_disagreement(Per({0}), Point::periodic(Alphabet(3), {0})), AlphabetMismatch);
}

TEST(Distance, Examples) {
  EXPECT_EQ(d(Per({0, 1}), Per({0, 1})), 0);
  EXPECT_EQ(d(Per({0, 1}), Per({0, 1, 1, 0})), Rational(1, 4));
  EXPECT_EQ(d(P({1}, {0}), Per({0})), 1);
}

TEST(Shadows, Examples) {
  EXPECT_TRUE(shadows(Per({0, 1}), OrbitSegment(Per({0, 1}), 0, 2), Rational(1)));
  const Point x = P({0, 1, 1, 1}, {0});
  EXPECT_TRUE(shadows(x, OrbitSegment(Per({0, 1}), 0, 1), Rational(1, 4)));
  EXPECT_FALSE(shadows(x, OrbitSegment(Per({0, 1}), 0, 1), Rational(1, 8)));
}

TEST(StaysClose, Examples) {
  const PeriodicOrbit Y(A2, {0, 1});
  EXPECT_TRUE(stays_close(Per({1, 0}), Y, Rational(1, 1024), 50));
  const Point x = P({0, 1, 0, 0}, {1});
  EXPECT_TRUE(stays_close(x, Y, Rational(1, 4), 2));
  EXPECT_FALSE(stays_close(x, Y, Rational(1, 4), 4));
  EXPECT_EQ(distance_to_orbit(x.shifted(2), Y), Rational(1, 2));
  EXPECT_EQ(distance_to_orbit(x.shifted(3), Y), Rational(1, 4));
}

TEST(FollowsInOrder, Examples) {
  const Point y = Per({0, 0, 1});
  EXPECT_TRUE(follows_in_order(y, OrbitSegment(y, 0, 3), 2));
  // Closeness rho = gamma/4: min separation of (001) is 1/2, so rho = 1/8.
  const PeriodicOrbit Y(A2, {0, 0, 1});
  EXPECT_EQ(Y.min_separation(), Rational(1, 2));
  const Point x = P({0, 0, 1, 0, 0, 1, 0, 0}, {0});
  ASSERT_TRUE(stays_close(x, Y, Rational(1, 8), 4));
  EXPECT_TRUE(follows_in_order(x, Y, 3));
  // 1^inf against the segment {(01)^inf, (10)^inf}: (10) is closest, but its
  // image (01) is not closest to 1^inf.
  EXPECT_FALSE(follows_in_order(Per({1}), OrbitSegment(Per({0, 1}), 0, 2), 1));
  // On two symbols distinct orbit points split x's neighbourhood, so a tie
  // needs three: 0^inf is at distance 1/2 from both (0102)^inf and (0201)^inf.
  const Point z = Point::periodic(Alphabet(3), {0, 1, 0, 2});
  EXPECT_EQ(d(Point::periodic(Alphabet(3), {0}), z), d(Point::periodic(Alphabet(3), {0}), z.shifted(2)));
  EXPECT_FALSE(follows_in_order(Point::periodic(Alphabet(3), {0}), OrbitSegment(z, 0, 4), 1));
}

TEST(MinimalRecurrence, Examples) {
  EXPECT_EQ(minimal_recurrence(Per({0}), 1, 3), (Recurrence{0, 1}));
  EXPECT_EQ(minimal_recurrence(P({0, 0, 1, 0, 1, 1, 0, 1}, {0}), 1, 3), (Recurrence{0, 1}));
  // Brute force over pairs, smallest j first, then smallest i.
  const Point x = Per({0, 1, 1, 0});
  std::optional<Recurrence> expect;
  for (Index j = 1; j <= 8 && !expect; ++j)
    for (Index i = 0; i < j && !expect; ++i)
      if (x[i] == x[j] && x[i + 1] == x[j + 1]) expect = Recurrence{i, j};
  ASSERT_TRUE(expect);
  EXPECT_EQ(minimal_recurrence(x, 2, 8), *expect);
}

TEST(PeriodicFromRecurrence, Examples) {
  EXPECT_EQ(periodic_point_from_recurrence(Per({0, 1}), 0, 2), PeriodicOrbit(A2, {0, 1}));
  EXPECT_EQ(periodic_point_from_recurrence(P({0}, {1, 0}), 1, 3).necklace(), (Word{0, 1}));
}

TEST(PeriodicFromRecurrence, SeparationAndShadowing) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    Word pre(rng() % 5), per(1 + rng() % 6);
    for (auto& s : pre) s = rng() % 2;
    for (auto& s : per) s = rng() % 2;
    const Point x(A2, pre, per);
    const std::size_t k = 1 + rng() % 4;
    const Recurrence r = minimal_recurrence(x, k, (1u << k) + 1);
    const PeriodicOrbit y = periodic_point_from_recurrence(x, r.i, r.j);
    EXPECT_GE(y.min_separation(), pow2(-static_cast<std::int64_t>(k - 1)));
    // The closed block tracks x along one period: y agrees with x through
    // index j + k - 1, so every step is within 2^-k.
    const Word full = x.prefix(r.j);
    const Point yi = Point::periodic(A2, Word(full.begin() + static_cast<std::ptrdiff_t>(r.i), full.end()));
    EXPECT_TRUE(shadows(yi, OrbitSegment(x, r.i, r.j - r.i), pow2(-static_cast<std::int64_t>(k))));
  }
}

TEST(Metric, UltrametricAndShiftExpansion) {
  std::mt19937_64 rng(5);
  auto draw = [&] {
    Word pre(rng() % 4), per(1 + rng() % 4);
    for (auto& s : pre) s = rng() % 2;
    for (auto& s : per) s = rng() % 2;
    return Point(A2, pre, per);
  };
  for (int t = 0; t < 500; ++t) {
    const Point x = draw(), y = draw(), z = draw();
    EXPECT_LE(d(x, z), std::max(d(x, y), d(y, z)));
    if (d(x, y) < 1) {
      EXPECT_LE(d(shift(x), shift(y)), 2 * d(x, y));
    }
    EXPECT_EQ(x == y, !first_disagreement(x, y).has_value());
  }
}

TEST(PeriodicOrbit, NecklaceAndSeparation) {
  const PeriodicOrbit o(A2, {1, 0, 0});
  EXPECT_EQ(o.necklace(), (Word{0, 0, 1}));
  EXPECT_EQ(o.period(), 3u);
  EXPECT_TRUE(o.contains(Per({0, 1, 0})));
  EXPECT_FALSE(o.contains(Per({0, 1})));
  EXPECT_EQ(PeriodicOrbit(A2, {0, 1, 0, 1}).period(), 2u);
  EXPECT_EQ(PeriodicOrbit(A2, {0}).min_separation(), 1);
}
