#pragma once

// Randomized property suites. Instances are built constructively (orbit
// blocks spliced with a chosen tail) so each bound's preconditions hold by design;
// each instance draws from its own stream mix_seed(seed, index), so a suite
// is reproducible and any single instance can be replayed.

#include "ergopt/a_sequence.hpp"
#include "ergopt/cylinder.hpp"
#include "ergopt/io.hpp"
#include "ergopt/lockin.hpp"
#include "ergopt/maxplus.hpp"
#include "ergopt/necklace.hpp"
#include "ergopt/random.hpp"
#include "ergopt/shift.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace ergopt {

struct GeneratorRanges {
  std::vector<std::uint32_t> alphabets{2, 3};
  std::size_t min_depth = 1;
  std::size_t max_depth = 4;
  std::int64_t max_den = 64;     // table values a/b with 1 <= b <= max_den
  std::int64_t value_bound = 2;  // and |a/b| <= value_bound
  std::size_t max_period = 6;    // periodic orbits in the orbit suites
  std::size_t max_steps = 6;     // k and r in the orbit suites
};

inline Json to_json(const GeneratorRanges& g) {
  Json j;
  j["alphabets"] = g.alphabets;
  j["min_depth"] = g.min_depth;
  j["max_depth"] = g.max_depth;
  j["max_den"] = g.max_den;
  j["value_bound"] = g.value_bound;
  j["max_period"] = g.max_period;
  j["max_steps"] = g.max_steps;
  return j;
}

inline GeneratorRanges ranges_from_json(const Json& j) {
  GeneratorRanges g;
  if (j.contains("alphabets")) g.alphabets = j["alphabets"].get<std::vector<std::uint32_t>>();
  if (j.contains("min_depth")) g.min_depth = j["min_depth"].get<std::size_t>();
  if (j.contains("max_depth")) g.max_depth = j["max_depth"].get<std::size_t>();
  if (j.contains("max_den")) g.max_den = j["max_den"].get<std::int64_t>();
  if (j.contains("value_bound")) g.value_bound = j["value_bound"].get<std::int64_t>();
  if (j.contains("max_period")) g.max_period = j["max_period"].get<std::size_t>();
  if (j.contains("max_steps")) g.max_steps = j["max_steps"].get<std::size_t>();
  return g;
}

class InstanceGenerator {
 public:
  explicit InstanceGenerator(std::uint64_t seed, GeneratorRanges ranges = {}) : seed_(seed), ranges_(std::move(ranges)) {
    if (ranges_.alphabets.empty() || ranges_.min_depth < 1 || ranges_.min_depth > ranges_.max_depth || ranges_.max_den < 1 ||
        ranges_.value_bound < 0 || ranges_.max_period < 1 || ranges_.max_steps < 1)
      throw std::invalid_argument("invalid generator ranges");
    for (auto m : ranges_.alphabets)
      if (m < 2) throw std::invalid_argument("generator alphabets must have at least two symbols");
  }

  std::uint64_t seed() const { return seed_; }
  const GeneratorRanges& ranges() const { return ranges_; }
  Rng stream(std::uint64_t index) const { return Rng(mix_seed(seed_, index)); }

  Alphabet alphabet(Rng& rng) const {
    return Alphabet(ranges_.alphabets[uniform_below(rng, ranges_.alphabets.size())]);
  }

  std::size_t depth(Rng& rng) const {
    return static_cast<std::size_t>(uniform_between(rng, static_cast<std::int64_t>(ranges_.min_depth),
                                                    static_cast<std::int64_t>(ranges_.max_depth)));
  }

  std::size_t steps(Rng& rng) const {
    return static_cast<std::size_t>(uniform_between(rng, 1, static_cast<std::int64_t>(ranges_.max_steps)));
  }

  Rational value(Rng& rng) const {
    const std::int64_t b = uniform_between(rng, 1, ranges_.max_den);
    const std::int64_t a = uniform_between(rng, -ranges_.value_bound * b, ranges_.value_bound * b);
    Rational r(static_cast<long>(a), static_cast<unsigned long>(b));
    r.canonicalize();
    return r;
  }

  CylinderFunction function(Rng& rng, Alphabet a, std::size_t depth) const {
    std::vector<Rational> t(checked_pow(a.size, depth));
    for (auto& v : t) v = value(rng);
    return CylinderFunction(a, depth, t);
  }

  CylinderFunction function(Rng& rng) const {
    const Alphabet a = alphabet(rng);
    return function(rng, a, depth(rng));
  }

  Word block(Rng& rng, Alphabet a, std::size_t len) const {
    Word w(len);
    for (auto& s : w) s = static_cast<Symbol>(uniform_below(rng, a.size));
    return w;
  }

  Word orbit_block(Rng& rng, Alphabet a) const {
    return block(rng, a, static_cast<std::size_t>(uniform_between(rng, 1, static_cast<std::int64_t>(ranges_.max_period))));
  }

  /// Lacunary sequence of the given kind; geometric and custom parameters are drawn.
  ASequence a_sequence(Rng& rng, ASequence::Kind kind) const {
    switch (kind) {
      case ASequence::Kind::Dyadic: return ASequence::dyadic();
      case ASequence::Kind::TriangularDyadic: return ASequence::triangular_dyadic();
      case ASequence::Kind::Geometric: {
        const auto q = uniform_between(rng, 2, 5);
        return ASequence::geometric(1, Rational(1, static_cast<unsigned long>(q)));
      }
      case ASequence::Kind::CustomTable: {
        static const Rational steps[] = {Rational(1, 2), Rational(1, 3), Rational(2, 5), Rational(3, 4)};
        std::vector<Rational> v{Rational(1)};
        const auto len = uniform_between(rng, 2, 6);
        while (static_cast<std::int64_t>(v.size()) < len) v.push_back(v.back() * steps[uniform_below(rng, 4)]);
        return ASequence::custom_table(std::move(v), Rational(1, 2));
      }
    }
    return ASequence::dyadic();
  }

 private:
  std::uint64_t seed_;
  GeneratorRanges ranges_;
};

inline const std::vector<ASequence::Kind>& builtin_kinds() {
  static const std::vector<ASequence::Kind> k{ASequence::Kind::Dyadic, ASequence::Kind::Geometric,
                                              ASequence::Kind::TriangularDyadic};
  return k;
}

struct Counterexample {
  std::string suite;
  std::string property;
  std::uint64_t seed = 0;
  std::uint64_t instance = 0;
  Json data;
};

struct PropertyStats {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::size_t tight = 0;  // checks attaining the bound with equality
  std::vector<Counterexample> counterexamples;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  GeneratorRanges ranges;
  std::size_t requested = 0;
  std::size_t run = 0;
  std::size_t discarded = 0;
  bool needs_witness = false;
  std::vector<PropertyStats> properties;
  std::vector<std::string> problems;  // suite-level failures (no witness, all discarded)

  PropertyStats& property(const std::string& name) {
    for (auto& p : properties)
      if (p.name == name) return p;
    properties.push_back({name, 0, 0, 0, {}});
    return properties.back();
  }

  std::size_t failure_count() const {
    std::size_t n = problems.size();
    for (const auto& p : properties) n += p.failures;
    return n;
  }

  std::size_t tight_count() const {
    std::size_t n = 0;
    for (const auto& p : properties) n += p.tight;
    return n;
  }

  bool pass() const { return failure_count() == 0; }

  /// Records suite-level problems; call once after all instances.
  void finish() {
    problems.clear();
    if (requested > 0 && run == 0) problems.push_back("every instance was discarded");
    if (needs_witness && run > 0 && tight_count() == 0) problems.push_back("no tightness witness among the instances");
  }
};

struct SuiteOptions {
  GeneratorRanges ranges;
  bool inject_fault = false;  // negate every checked inequality (harness self-test)
  bool require_witness = true;
  std::size_t max_counterexamples = 20;
};

/// Records one check of `property`. details() is only called on failure.
inline bool run_property(SuiteReport& rep, const SuiteOptions& opt, const std::string& property, std::uint64_t instance,
                         bool holds, const std::function<Json()>& details, bool tight = false) {
  if (opt.inject_fault) holds = !holds;
  PropertyStats& p = rep.property(property);
  ++p.checks;
  if (holds && tight) ++p.tight;
  if (!holds) {
    ++p.failures;
    if (p.counterexamples.size() < opt.max_counterexamples)
      p.counterexamples.push_back({rep.suite, property, rep.seed, instance, details()});
  }
  return holds;
}

/// A constructed precondition; a failure here is a generator bug, so fault
/// injection leaves it alone.
inline bool check_construction(SuiteReport& rep, const SuiteOptions& opt, const std::string& property,
                               std::uint64_t instance, bool holds, const std::function<Json()>& details) {
  SuiteOptions plain = opt;
  plain.inject_fault = false;
  return run_property(rep, plain, property, instance, holds, details);
}

inline Json to_json(const Counterexample& c, const GeneratorRanges& ranges) {
  Json j;
  j["suite"] = c.suite;
  j["property"] = c.property;
  j["seed"] = c.seed;
  j["instance"] = c.instance;
  j["ranges"] = to_json(ranges);
  j["data"] = c.data;
  return j;
}

inline Json to_json(const SuiteReport& r) {
  Json j;
  j["suite"] = r.suite;
  j["seed"] = r.seed;
  j["requested"] = r.requested;
  j["run"] = r.run;
  j["discarded"] = r.discarded;
  j["status"] = r.pass() ? "pass" : "fail";
  Json props = Json::array();
  for (const auto& p : r.properties) {
    Json pj;
    pj["name"] = p.name;
    pj["checks"] = p.checks;
    pj["failures"] = p.failures;
    pj["tight"] = p.tight;
    Json ce = Json::array();
    for (const auto& c : p.counterexamples) ce.push_back(to_json(c, r.ranges));
    pj["counterexamples"] = std::move(ce);
    props.push_back(std::move(pj));
  }
  j["properties"] = std::move(props);
  j["problems"] = r.problems;
  return j;
}

namespace detail {

inline Json point_json(const Point& x) { return to_json(x); }

/// Words of x = (prefix of `follow` of length len) then a periodic tail. With
/// divergent set, x[len] != follow[len].
inline std::pair<Word, Word> splice_words(const InstanceGenerator& gen, Rng& rng, const Point& follow, Index len,
                                          bool divergent) {
  const Alphabet a = follow.alphabet();
  Word tail = gen.block(rng, a, static_cast<std::size_t>(uniform_between(rng, 1, 3)));
  if (divergent) {
    const auto shift_by = 1 + uniform_below(rng, a.size - 1);
    tail[0] = static_cast<Symbol>((follow[len] + shift_by) % a.size);
  }
  return {follow.prefix(len), std::move(tail)};
}

inline Point splice(const InstanceGenerator& gen, Rng& rng, const Point& follow, Index len, bool divergent) {
  auto [pre, tail] = splice_words(gen, rng, follow, len, divergent);
  return Point(follow.alphabet(), std::move(pre), std::move(tail));
}

inline Index log2_of_power(const Rational& r) {
  // r = 2^-n with n >= 0
  Index n = 0;
  Rational x = r;
  while (x < 1) {
    x *= 2;
    ++n;
  }
  return n;
}

}  // namespace detail

// -- shadowing ---------------------------------------------------------------

inline void shadowing_instance(const InstanceGenerator& gen, std::uint64_t index, SuiteReport& rep,
                               const SuiteOptions& opt) {
  Rng rng = gen.stream(index);
  const Alphabet a = gen.alphabet(rng);
  const Point y = Point::periodic(a, gen.orbit_block(rng, a));
  const Index i = uniform_below(rng, y.period().size());
  const Index k = gen.steps(rng), r = gen.steps(rng);
  const Rational rho = pow2(-static_cast<std::int64_t>(r));
  const Point yi = y.shifted(i);
  const unsigned variant = static_cast<unsigned>(index % 8);
  const Point x = variant == 0 ? yi : detail::splice(gen, rng, yi, k + r - 1, variant <= 5);
  auto details = [&] {
    Json j;
    j["alphabet"] = a.size;
    j["y"] = detail::point_json(y);
    j["x"] = detail::point_json(x);
    j["i"] = i;
    j["k"] = k;
    j["rho"] = to_string(rho);
    return j;
  };
  if (!check_construction(rep, opt, "construction_shadows", index, shadows(x, OrbitSegment(y, i, k), rho), details)) return;
  ++rep.run;
  for (Index j = 0; j < k; ++j) {
    const Rational dist = d(x.shifted(j), y.shifted(i + j));
    const Rational bound = rho * pow2(-static_cast<std::int64_t>(k - 1 - j));
    run_property(
        rep, opt, "per_step_bound", index, dist <= bound,
        [&] {
          Json jj = details();
          jj["j"] = j;
          jj["distance"] = to_string(dist);
          jj["bound"] = to_string(bound);
          return jj;
        },
        dist == bound);
  }
}

// -- parallel orbit ------------------------------------------------------------

inline void parallel_orbit_instance(const InstanceGenerator& gen, std::uint64_t index, SuiteReport& rep,
                                    const SuiteOptions& opt) {
  Rng rng = gen.stream(index);
  const Alphabet a = gen.alphabet(rng);
  const Point y = Point::periodic(a, gen.orbit_block(rng, a));
  const Index i = uniform_below(rng, y.period().size());
  const bool witness = index % 10 == 0;
  const Index k = witness ? 1 : gen.steps(rng);
  const Index r = gen.steps(rng);
  const Index offset = uniform_below(rng, 4);
  const Point yi = y.shifted(i);
  const bool divergent = witness || index % 4 != 3;
  auto [pre, tail] = detail::splice_words(gen, rng, yi, k + r - 1, divergent);
  Word lead = gen.block(rng, a, offset);
  pre.insert(pre.begin(), lead.begin(), lead.end());
  const Point x(a, std::move(pre), std::move(tail));
  CylinderFunction f = [&] {
    if (witness) {
      // Scaled indicator of the (r+1)-block of y at i: the single variation
      // term var_r is attained, and V_r = var_r.
      const Word blk = yi.prefix(r + 1);
      std::vector<Rational> t(checked_pow(a.size, r + 1), Rational(0));
      t[word_index(blk, a.size)] = Rational(static_cast<unsigned long>(1 + uniform_below(rng, 7)), 3);
      return CylinderFunction(a, r + 1, t);
    }
    const std::size_t depth = std::min<std::size_t>(gen.depth(rng) + uniform_below(rng, 3), 6);
    return gen.function(rng, a, depth);
  }();
  auto details = [&] {
    Json j;
    j["function"] = to_json(f);
    j["y"] = detail::point_json(y);
    j["x"] = detail::point_json(x);
    j["m"] = offset;
    j["i"] = i;
    j["k"] = k;
    j["r"] = r;
    return j;
  };
  const Rational rho = pow2(-static_cast<std::int64_t>(r));
  if (!check_construction(rep, opt, "construction_shadows", index, shadows(x.shifted(offset), OrbitSegment(y, i, k), rho),
                    details))
    return;
  ++rep.run;
  Rational lhs(0);
  for (Index j = 0; j < k; ++j) lhs += abs(f(x.shifted(offset + j)) - f(y.shifted(i + j)));
  const Rational rhs = tail_sum_V(f, r);
  run_property(
      rep, opt, "summed_bound", index, lhs <= rhs,
      [&] {
        Json j = details();
        j["lhs"] = to_string(lhs);
        j["V_r"] = to_string(rhs);
        return j;
      },
      lhs == rhs && rhs > 0);
}

// -- in order ----------------------------------------------------------------

inline void in_order_instance(const InstanceGenerator& gen, std::uint64_t index, SuiteReport& rep,
                              const SuiteOptions& opt) {
  Rng rng = gen.stream(index);
  const Alphabet a = gen.alphabet(rng);
  const PeriodicOrbit orbit(a, gen.orbit_block(rng, a));
  const Rational gamma = orbit.min_separation();
  if (index % 10 == 9) {
    // A draw with rho = gamma/2 breaks rho <= gamma/4 and is discarded; the
    // instance goes on with an admissible rho.
    ++rep.discarded;
  }
  const Index s = index % 3 == 0 ? 0 : uniform_below(rng, 3);
  const Rational rho = gamma / 4 * pow2(-static_cast<std::int64_t>(s));
  const Index r = detail::log2_of_power(rho);
  const Index i0 = uniform_below(rng, orbit.period());
  const Index k = gen.steps(rng);
  const Point yi = orbit.point(i0);
  const unsigned variant = static_cast<unsigned>(index % 5);
  const Point x = variant == 1 ? yi : detail::splice(gen, rng, yi, k + r, variant != 4);
  auto details = [&] {
    Json j;
    j["y"] = io::word(orbit.necklace());
    j["x"] = detail::point_json(x);
    j["k"] = k;
    j["rho"] = to_string(rho);
    return j;
  };
  if (!check_construction(rep, opt, "construction_stays_close", index, stays_close(x, orbit, rho, k + 1), details)) return;
  ++rep.run;
  run_property(rep, opt, "follows_in_order", index, follows_in_order(x, orbit, k), details);
  const auto ip = closest_in_orbit(x, orbit);
  if (!run_property(rep, opt, "unique_offset", index, ip.has_value(), details)) return;
  Rational worst(0);
  bool ok = true;
  for (Index j = 0; j <= k; ++j) {
    const Rational dist = d(x.shifted(j), orbit.point(*ip + j));
    worst = std::max(worst, dist);
    ok = ok && dist <= rho;
  }
  run_property(
      rep, opt, "single_offset_bound", index, ok,
      [&] {
        Json j = details();
        j["offset"] = *ip;
        j["worst"] = to_string(worst);
        return j;
      },
      worst == rho);
}

// -- normal form: oracle, cohomology and bounds --------------------------------

inline std::size_t oracle_period(const CylinderFunction& f) {
  return checked_pow(f.alphabet().size, f.depth() == 0 ? 0 : f.depth() - 1) + 1;
}

inline void oracle_instance(const InstanceGenerator& gen, std::uint64_t index, SuiteReport& rep,
                            const SuiteOptions& opt) {
  Rng rng = gen.stream(index);
  const CylinderFunction f = gen.function(rng);
  ++rep.run;
  const MaxMeanResult mm = max_mean_cycle(f);
  const std::size_t P = oracle_period(f);
  auto details = [&] {
    Json j;
    j["function"] = to_json(f);
    j["beta"] = to_string(mm.beta);
    j["period"] = P;
    return j;
  };
  const Rational walks = oracle_max_by_walks(f, P);
  run_property(rep, opt, "beta_equals_periodic_max", index, walks == mm.beta, [&] {
    Json j = details();
    j["oracle"] = to_string(walks);
    return j;
  });
  try {
    const OracleResult o = oracle_max(f, P);
    run_property(rep, opt, "beta_equals_necklace_max", index, o.value == mm.beta, [&] {
      Json j = details();
      j["oracle"] = to_string(o.value);
      return j;
    });
  } catch (const OracleGuardExceeded&) {
    rep.property("necklace_guard_exceeded").checks++;
  }
  SolveOptions howard;
  howard.method = SolveMethod::Howard;
  const Rational hb = solve_normal_form(f, howard).beta;
  run_property(rep, opt, "howard_agrees", index, hb == mm.beta, [&] {
    Json j = details();
    j["howard"] = to_string(hb);
    return j;
  });
}

inline void cohomology_bounds_instance(const InstanceGenerator& gen, std::uint64_t index, SuiteReport& rep,
                                       const SuiteOptions& opt) {
  Rng rng = gen.stream(index);
  const CylinderFunction f = gen.function(rng);
  ++rep.run;
  const NormalForm nf = solve_normal_form(f);
  auto details = [&] {
    Json j;
    j["function"] = to_json(f);
    j["beta"] = to_string(nf.beta);
    j["f_hat"] = to_json(nf.f_hat);
    return j;
  };
  bool nonpos = true;
  for (const auto& z : nf.f_hat.numerators()) nonpos = nonpos && z <= 0;
  run_property(rep, opt, "f_hat_nonpositive", index, nonpos, details);

  bool invariant = true;
  Word bad;
  for (const auto& y : periodic_orbits_up_to(f.alphabet(), 6)) {
    if (ergodic_average(nf.f_hat, y) != ergodic_average(f, y) - nf.beta) {
      invariant = false;
      bad = y.necklace();
      break;
    }
  }
  run_property(rep, opt, "cohomology_invariance", index, invariant, [&] {
    Json j = details();
    j["orbit"] = io::word(bad);
    return j;
  });

  const Rational walks = oracle_max_by_walks(f, oracle_period(f));
  run_property(rep, opt, "beta_equals_oracle", index, walks == nf.beta, [&] {
    Json j = details();
    j["oracle"] = to_string(walks);
    return j;
  });

  std::vector<ASequence> seqs;
  for (auto kind : builtin_kinds()) seqs.push_back(gen.a_sequence(rng, kind));
  seqs.push_back(gen.a_sequence(rng, ASequence::Kind::CustomTable));
  for (const auto& A : seqs) {
    const Rational gamma = gamma_A(A);
    const Rational fn = a_norm(f, A).a_norm;
    const NormReport hat = a_norm(nf.f_hat, A);
    auto with_a = [&] {
      Json j = details();
      j["a_sequence"] = to_json(A);
      j["gamma_A"] = to_string(gamma);
      j["f_norm"] = to_string(fn);
      j["f_hat_norm"] = to_string(hat.a_norm);
      return j;
    };
    run_property(rep, opt, "norm_bound", index, hat.a_norm <= gamma * fn, with_a, hat.a_norm == gamma * fn);
    bool tails = true;
    for (std::size_t n = 0; n <= f.depth(); ++n) tails = tails && hat.tail_sums[n] <= gamma * fn * A(n);
    run_property(rep, opt, "tail_bound", index, tails, with_a);
  }
}

inline void fixed_point_instance(const InstanceGenerator& gen, std::uint64_t index, SuiteReport& rep,
                                 const SuiteOptions& opt) {
  Rng rng = gen.stream(index);
  const CylinderFunction f = gen.function(rng);
  ++rep.run;
  const NormalForm nf = solve_normal_form(f);
  auto details = [&] {
    Json j;
    j["function"] = to_json(f);
    j["beta"] = to_string(nf.beta);
    j["h"] = to_json(nf.h);
    return j;
  };
  const CylinderFunction phi = apply_phi(add_constant(f, -nf.beta), nf.h);
  run_property(rep, opt, "phi_fixed_point", index, same_function(phi, nf.h), details);

  std::vector<ASequence> seqs;
  for (auto kind : builtin_kinds()) seqs.push_back(gen.a_sequence(rng, kind));
  seqs.push_back(gen.a_sequence(rng, ASequence::Kind::CustomTable));
  for (const auto& A : seqs) {
    const Rational delta = *A.delta();
    const Rational lh = a_norm(nf.h, A).lip_A, lf = a_norm(f, A).lip_A;
    run_property(rep, opt, "lip_bound", index, lh <= lf / delta, [&] {
      Json j = details();
      j["a_sequence"] = to_json(A);
      j["lip_h"] = to_string(lh);
      j["lip_f_over_delta"] = to_string(lf / delta);
      return j;
    });
  }

  // var_{n-1}(Phi_f g) <= var_n(f) + var_n(g) for a fresh g of depth k-1.
  const CylinderFunction g = gen.function(rng, f.alphabet(), f.depth() - 1);
  const CylinderFunction pg = apply_phi(f, g);
  const auto vf = variation_profile(f), vg = variation_profile(g), vp = variation_profile(pg);
  auto var = [](const std::vector<Rational>& v, std::size_t n) { return n < v.size() ? v[n] : Rational(0); };
  bool ok = true;
  std::size_t bad = 0;
  for (std::size_t n = 1; n <= f.depth(); ++n)
    if (!(var(vp, n - 1) <= var(vf, n) + var(vg, n))) {
      ok = false;
      bad = n;
    }
  run_property(rep, opt, "variation_inequality", index, ok, [&] {
    Json j = details();
    j["g"] = to_json(g);
    j["n"] = bad;
    return j;
  });
}

// -- shadow gap ----------------------------------------------------------------

inline void shadow_gap_instance(const InstanceGenerator& gen, std::uint64_t index, SuiteReport& rep,
                                const SuiteOptions& opt) {
  Rng rng = gen.stream(index);
  const CylinderFunction f = gen.function(rng);
  static const ASequence::Kind kinds[] = {ASequence::Kind::Dyadic, ASequence::Kind::Geometric,
                                          ASequence::Kind::TriangularDyadic, ASequence::Kind::CustomTable};
  const ASequence A = gen.a_sequence(rng, kinds[uniform_below(rng, 4)]);
  const NormalForm nf = solve_normal_form(f);
  const MaximizingSupport ms = maximizing_support(nf);
  if (ms.orbits.empty()) {
    ++rep.discarded;
    return;
  }
  const PeriodicOrbit& x = ms.orbits.front();
  const Point xp = Point::periodic(f.alphabet(), x.necklace());
  bool any = false;
  for (std::size_t r = 1; r <= gen.ranges().max_steps; ++r) {
    const Recurrence rec = minimal_recurrence(xp, r, x.period() + r + 1);
    const PeriodicOrbit y = periodic_point_from_recurrence(xp, rec.i, rec.j);
    ShadowGapReport g;
    try {
      g = shadow_gap_check(f, A, x, y, r);
    } catch (const PreconditionFailure&) {
      rep.property("precondition_not_met").checks++;
      continue;
    }
    any = true;
    run_property(
        rep, opt, "two_sided_bound", index, g.holds,
        [&] {
          Json j;
          j["function"] = to_json(f);
          j["a_sequence"] = to_json(A);
          j["x"] = io::word(x.necklace());
          j["y"] = io::word(y.necklace());
          j["report"] = to_json(g);
          return j;
        },
        g.measured == g.upper);
  }
  if (any)
    ++rep.run;
  else
    ++rep.discarded;
}

// -- registry ------------------------------------------------------------------

using InstanceFn = void (*)(const InstanceGenerator&, std::uint64_t, SuiteReport&, const SuiteOptions&);

struct SuiteInfo {
  InstanceFn run;
  bool needs_witness;
  std::size_t default_instances;
};

inline const std::map<std::string, SuiteInfo>& suite_registry() {
  static const std::map<std::string, SuiteInfo> r{
      {"shadowing", {shadowing_instance, true, 500}},
      {"parallel_orbit", {parallel_orbit_instance, true, 500}},
      {"in_order", {in_order_instance, true, 500}},
      {"oracle", {oracle_instance, false, 500}},
      {"cohomology_bounds", {cohomology_bounds_instance, false, 200}},
      {"fixed_point", {fixed_point_instance, false, 500}},
      {"shadow_gap", {shadow_gap_instance, false, 200}},
  };
  return r;
}

inline std::vector<std::string> suite_names() {
  std::vector<std::string> n;
  for (const auto& [k, v] : suite_registry()) n.push_back(k);
  return n;
}

/// Runs instances first .. first+count-1 of the named suite.
inline SuiteReport run_suite(const std::string& name, std::uint64_t seed, std::size_t count,
                             const SuiteOptions& opt = {}, std::uint64_t first = 0) {
  auto it = suite_registry().find(name);
  if (it == suite_registry().end()) throw std::invalid_argument("unknown suite '" + name + "'");
  const InstanceGenerator gen(seed, opt.ranges);
  SuiteReport rep;
  rep.suite = name;
  rep.seed = seed;
  rep.ranges = opt.ranges;
  rep.requested = count;
  rep.needs_witness = it->second.needs_witness && opt.require_witness;
  for (std::uint64_t i = first; i < first + count; ++i) it->second.run(gen, i, rep, opt);
  rep.finish();
  return rep;
}

inline SuiteReport suite_shadowing(std::uint64_t seed, std::size_t n) { return run_suite("shadowing", seed, n); }
inline SuiteReport suite_parallel_orbit(std::uint64_t seed, std::size_t n) {
  return run_suite("parallel_orbit", seed, n);
}
inline SuiteReport suite_in_order(std::uint64_t seed, std::size_t n) { return run_suite("in_order", seed, n); }
inline SuiteReport suite_cohomology_bounds(std::uint64_t seed, std::size_t n) {
  return run_suite("cohomology_bounds", seed, n);
}
inline SuiteReport suite_shadow_gap(std::uint64_t seed, std::size_t n) { return run_suite("shadow_gap", seed, n); }

/// Re-runs the single instance a counterexample file came from.
inline SuiteReport replay_counterexample(const Json& j, bool inject_fault = false) {
  SuiteOptions opt;
  opt.inject_fault = inject_fault;
  opt.require_witness = false;
  opt.ranges = j.contains("ranges") ? ranges_from_json(j["ranges"]) : GeneratorRanges{};
  return run_suite(io::field(j, "suite", "counterexample").get<std::string>(),
                   io::field(j, "seed", "counterexample").get<std::uint64_t>(), 1, opt,
                   io::field(j, "instance", "counterexample").get<std::uint64_t>());
}

}  // namespace ergopt
