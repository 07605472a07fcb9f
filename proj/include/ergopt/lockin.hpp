#pragma once

// Lock-in construction: starting from a maximizing cycle of f, pick a minimal
// recurrence, close it into a periodic orbit Y, and penalise distance to Y so
// that f_tilde = f_hat - eps * d_A(., O Y) and every function within eps*sigma
// of it (in the A-norm) is uniquely maximized by the measure on Y.

#include "ergopt/a_sequence.hpp"
#include "ergopt/cylinder.hpp"
#include "ergopt/maxplus.hpp"
#include "ergopt/random.hpp"
#include "ergopt/shift.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ergopt {

struct LockInConstants {
  Rational gamma;
  Rational f_norm;
  Rational L;      // gamma^2 (||f||_A + 2)
  Rational sigma;  // A_k / (4p)
  Rational alpha;  // (eps/2) A_k - 3 L A_{k+1}
};

inline void check_epsilon(const Rational& eps) {
  if (eps <= 0 || eps >= 1) throw std::invalid_argument("epsilon must lie in (0,1), got " + to_string(eps));
}

inline LockInConstants constants(const CylinderFunction& f, const ASequence& a, const Rational& eps, std::size_t k,
                                 std::size_t p) {
  check_epsilon(eps);
  if (k < 1 || p < 1) throw std::invalid_argument("k and p must be >= 1");
  LockInConstants c;
  c.gamma = gamma_A(a);
  c.f_norm = a_norm(f, a).a_norm;
  c.L = c.gamma * c.gamma * (c.f_norm + 2);
  c.sigma = a(k) / (4 * Rational(static_cast<unsigned long>(p)));
  c.alpha = eps / 2 * a(k) - 3 * c.L * a(k + 1);
  return c;
}

/// Smallest k >= 1 with (eps/2) A_k > 3 L A_{k+1}.
inline std::size_t choose_k(const CylinderFunction& f, const ASequence& a, const Rational& eps,
                            std::size_t max_k = 100000) {
  check_epsilon(eps);
  if (a.super_continuity() != SuperContinuity::Yes)
    throw std::invalid_argument("automatic k needs A_{n+1}/A_n -> 0; " + a.kind_name() + " does not qualify");
  const LockInConstants c = constants(f, a, eps, 1, 1);
  // (eps/2) A_k > 3 L A_{k+1}  <=>  ratio_at(k) < eps / (6 L)
  const Rational threshold = eps / (6 * c.L);
  for (std::size_t k = 1; k <= max_k; ++k)
    if (a.ratio_at(k) < threshold) return k;
  throw std::runtime_error("no admissible k below " + std::to_string(max_k));
}

struct PerturbationPlan {
  CylinderFunction f;
  ASequence a;
  Rational epsilon;
  NormalForm nf;
  std::size_t k = 1;
  bool k_auto = true;
  bool empirical = false;  // user k, no positivity guarantee for alpha
  PeriodicOrbit source;    // maximizing cycle the recurrence is taken from
  Recurrence recurrence;
  PeriodicOrbit y;
  LockInConstants c;
  std::size_t K = 1;
  CylinderFunction g_K;      // truncated d_A(., O Y), depth K
  CylinderFunction f_tilde;  // f_hat - eps g_K

  Rational radius() const { return epsilon * c.sigma; }
};

struct PlanOptions {
  std::optional<std::size_t> k;
  std::optional<std::size_t> K;
  std::size_t table_limit = 10000000;
};

/// Default truncation: smallest K with A_K < alpha/100, at least k + 2p + 2.
inline std::size_t default_truncation(const ASequence& a, const LockInConstants& c, std::size_t k, std::size_t p) {
  std::size_t K = k + 2 * p + 2;
  if (c.alpha > 0) {
    const Rational target = c.alpha / 100;
    std::size_t n = 0;
    while (!(a(n) < target)) ++n;
    K = std::max(K, n);
  }
  return K;
}

/// Minimal depth-k recurrence along the source orbit; j <= period always works.
inline Recurrence orbit_recurrence(const PeriodicOrbit& source, std::size_t k) {
  const Point x = Point::periodic(source.alphabet(), source.necklace());
  return minimal_recurrence(x, k, source.period() + 1);
}

inline PerturbationPlan build_perturbation(const CylinderFunction& f, const ASequence& a, const Rational& eps,
                                           const PlanOptions& opt = {}) {
  check_epsilon(eps);
  NormalForm nf = normal_form(f, a);
  MaximizingSupport ms = maximizing_support(nf);
  if (ms.orbits.empty()) throw CertificateFailure("no maximizing cycle found");
  const PeriodicOrbit source = ms.orbits.front();  // least necklace

  const std::size_t k = opt.k ? *opt.k : choose_k(f, a, eps);
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const Recurrence rec = orbit_recurrence(source, k);
  PeriodicOrbit y = periodic_point_from_recurrence(Point::periodic(f.alphabet(), source.necklace()), rec.i, rec.j);
  const LockInConstants c = constants(f, a, eps, k, y.period());
  const std::size_t K = opt.K ? *opt.K : default_truncation(a, c, k, y.period());
  if (K < 1) throw std::invalid_argument("truncation depth must be >= 1");
  if (static_cast<double>(std::pow(static_cast<double>(f.alphabet().size), static_cast<double>(K))) >
      static_cast<double>(opt.table_limit))
    throw std::invalid_argument("truncation depth " + std::to_string(K) + " exceeds the table limit");

  CylinderFunction g = truncated_orbit_distance(y, a, K);
  CylinderFunction ft = linear_combination(1, nf.f_hat, -eps, g);
  return PerturbationPlan{f,     a,  eps, std::move(nf), k, !opt.k, opt.k.has_value(), source, rec, std::move(y),
                          c,     K,  std::move(g),      std::move(ft)};
}

/// eps * sigma at the automatically chosen k, for comparison with a plan built
/// at a user k. Empty when the A-sequence does not allow an automatic k.
inline std::optional<Rational> theorem_radius(const PerturbationPlan& plan) {
  if (plan.k_auto) return plan.radius();
  if (plan.a.super_continuity() != SuperContinuity::Yes) return std::nullopt;
  const std::size_t k = choose_k(plan.f, plan.a, plan.epsilon);
  const Recurrence rec = orbit_recurrence(plan.source, k);
  const PeriodicOrbit y =
      periodic_point_from_recurrence(Point::periodic(plan.f.alphabet(), plan.source.necklace()), rec.i, rec.j);
  return plan.epsilon * constants(plan.f, plan.a, plan.epsilon, k, y.period()).sigma;
}

/// A sampled perturbation h = factor * base, kept factored so trials can fold
/// it into the table without materialising h.
struct SampledPerturbation {
  CylinderFunction base;  // multiples of 1/64 in [-1,1]
  Rational factor;
  Rational norm;  // ||h||_A, exact

  CylinderFunction materialize() const { return scale(factor, base); }
};

/// Random h of depth K with ||h||_A = b u < b, u in (1/2, 1). Tables are
/// multiples of 1/64 in [-1,1] before rescaling; b = 0 yields h = 0.
inline SampledPerturbation sample_direction(Alphabet alphabet, const ASequence& a, std::size_t depth,
                                            const Rational& bound, std::uint64_t seed) {
  if (bound < 0) throw std::invalid_argument("perturbation bound must be >= 0");
  if (bound == 0) return {CylinderFunction::zero(alphabet, depth), Rational(0), Rational(0)};
  Rng rng(seed);
  auto below = [&](std::uint64_t n) { return uniform_below(rng, n); };
  const std::size_t n = checked_pow(alphabet.size, depth);
  std::vector<Integer> t(n);
  bool nonzero = false;
  while (!nonzero) {
    for (auto& z : t) {
      z = static_cast<long>(below(129)) - 64;
      if (z != 0) nonzero = true;
    }
  }
  CylinderFunction base = CylinderFunction::from_scaled(alphabet, depth, std::move(t), 64);
  const Rational base_norm = a_norm(base, a).a_norm;
  const Rational u(static_cast<unsigned long>((1u << 16) + 1 + below((1u << 16) - 1)), 1ul << 17);
  Rational factor = bound * u / base_norm;
  factor.canonicalize();
  Rational norm = bound * u;
  norm.canonicalize();
  return {std::move(base), std::move(factor), std::move(norm)};
}

inline CylinderFunction sample_perturbation(Alphabet alphabet, const ASequence& a, std::size_t depth,
                                            const Rational& bound, std::uint64_t seed) {
  return sample_direction(alphabet, a, depth, bound, seed).materialize();
}

struct TrialResult {
  std::string label;
  std::optional<std::uint64_t> seed;
  Rational h_norm;
  bool locked = false;
  bool unique = false;
  std::vector<Word> optimizers;  // necklaces of the critical cycles
  Rational beta;
  std::optional<Rational> margin;  // beta - best mean over cycles other than Y
};

struct EngineOptions {
  bool compute_margin = true;
  bool check_norm = true;
};

/// Reusable solver state for repeated trials on one plan. Trials fold h into
/// a persistent table and warm-start policy iteration from the unperturbed
/// optimum, so a trial at depth ~21 costs a few linear passes.
class LockInEngine {
 public:
  explicit LockInEngine(const PerturbationPlan& plan, EngineOptions opt = {})
      : plan_(plan), opt_(opt), base_(solve_base(plan.f_tilde)) {}

  const PerturbationPlan& plan() const { return plan_; }
  /// Normal form of f_tilde itself (policy iteration, so its policy can seed trials).
  const NormalForm& unperturbed() const { return base_; }

  TrialResult run(const CylinderFunction& h, std::string label, std::optional<std::uint64_t> seed = {}) {
    const Rational norm = opt_.check_norm ? a_norm(h, plan_.a).a_norm : Rational(0);
    return evaluate(Rational(1), h, norm, std::move(label), seed);
  }

  TrialResult run(const SampledPerturbation& s, std::string label, std::optional<std::uint64_t> seed = {}) {
    return evaluate(s.factor, s.base, s.norm, std::move(label), seed);
  }

  /// h = factor * base with known ||h||_A.
  TrialResult run_scaled(const Rational& factor, const CylinderFunction& base, const Rational& norm,
                         std::string label, std::optional<std::uint64_t> seed = {}) {
    return evaluate(factor, base, norm, std::move(label), seed);
  }

 private:
  static NormalForm solve_base(const CylinderFunction& f) {
    SolveOptions so;
    so.method = SolveMethod::Howard;
    return solve_normal_form(f, so);
  }

  TrialResult evaluate(const Rational& factor, const CylinderFunction& dir, const Rational& norm, std::string label,
                       std::optional<std::uint64_t> seed) {
    TrialResult r;
    r.label = std::move(label);
    r.seed = seed;
    r.h_norm = norm;
    const bool zero_h = factor == 0 || dir.is_zero();
    if (opt_.check_norm && !zero_h && !(norm < plan_.radius()))
      throw std::invalid_argument("perturbation norm " + to_string(norm) + " is not below eps*sigma");
    const CylinderFunction& ft = plan_.f_tilde;
    if (dir.depth() > ft.depth()) {
      // Deeper than the plan: no warm start, generic path.
      const CylinderFunction q = linear_combination(1, ft, factor, dir);
      const NormalForm nf = solve_base(q);
      const MaximizingSupport ms = maximizing_support(nf);
      fill_verdict(r, nf.beta, ms);
      if (opt_.compute_margin) {
        const DeBruijnGraph g = build_graph(q);
        r.margin = margin(g, nf.policy, nf.beta);
      }
      return r;
    }

    // q = ft + factor * dir over den = lcm(D_ft, factor_den * D_dir).
    const Integer d_dir = factor.get_den() * dir.denominator();
    const Integer den = lcm(ft.denominator(), d_dir);
    const Integer cf = den / ft.denominator();
    const Integer cd = factor.get_num() * Integer(den / d_dir);
    const std::size_t block = checked_pow(ft.alphabet().size, ft.depth() - dir.depth());
    q_.resize(ft.size());
    for (std::size_t i = 0; i < q_.size(); ++i) {
      mpz_mul(q_[i].get_mpz_t(), ft.numerators()[i].get_mpz_t(), cf.get_mpz_t());
      mpz_addmul(q_[i].get_mpz_t(), dir.numerators()[i / block].get_mpz_t(), cd.get_mpz_t());
    }
    DeBruijnGraph g;
    g.m = ft.alphabet().size;
    g.order = ft.depth();
    g.edge_count = ft.size();
    g.node_count = ft.size() / g.m;
    g.weight = q_.data();
    g.denominator = den;

    HowardOptions ho;
    ho.warm_policy = &base_.policy;
    howard_solve(g, ho, work_);
    if (!work_.single_lambda) throw CertificateFailure("policy iteration ended with several cycle means");
    // Certificate and zero subgraph: w Ld - Wn + H(src) - H(dst) <= 0, with
    // equality attained at every node.
    zero_.assign(g.edge_count, 0);
    const Integer& ld = work_.lambda_den;
    const Integer& wn = work_.lambda_num;
    for (std::size_t v = 0; v < g.node_count; ++v) {
      bool attained = false;
      for (std::uint32_t a = 0; a < g.m; ++a) {
        const std::size_t e = g.in_edge(v, a);
        mpz_mul(tmp_.get_mpz_t(), g.weight[e].get_mpz_t(), ld.get_mpz_t());
        tmp_ -= wn;
        tmp_ += work_.values[g.src(e)];
        tmp_ -= work_.values[v];
        const int sgn = sgn_of(tmp_);
        if (sgn > 0) throw CertificateFailure("fixed-point certificate failed");
        if (sgn == 0) {
          zero_[e] = 1;
          attained = true;
        }
      }
      if (!attained) throw CertificateFailure("fixed-point certificate failed");
    }
    Rational beta(wn, den * ld);
    beta.canonicalize();
    const MaximizingSupport ms = critical_support(g, zero_, ft.alphabet());
    fill_verdict(r, beta, ms);
    if (opt_.compute_margin) r.margin = margin(g, work_.policy, beta);
    return r;
  }

  static int sgn_of(const Integer& z) { return mpz_sgn(z.get_mpz_t()); }

  void fill_verdict(TrialResult& r, const Rational& beta, const MaximizingSupport& ms) const {
    r.beta = beta;
    r.unique = ms.unique;
    for (const auto& o : ms.orbits) r.optimizers.push_back(o.necklace());
    r.locked = ms.unique && ms.orbits.size() == 1 && ms.orbits.front() == plan_.y;
  }

  /// beta - max over simple cycles other than Y: every such cycle misses at
  /// least one edge of Y, so drop each Y edge in turn.
  Rational margin(const DeBruijnGraph& g, const std::vector<std::uint8_t>& policy, const Rational& beta) {
    const auto y_edges = cycle_edges(g, plan_.y.necklace());
    std::optional<Rational> best;
    removed_.assign(g.edge_count, 0);
    for (std::size_t e : y_edges) {
      removed_[e] = 1;
      HowardOptions ho;
      ho.removed = &removed_;
      ho.warm_policy = &policy;
      howard_solve(g, ho, masked_);
      const Rational lam = masked_.lambda(g.denominator);
      if (!best || lam > *best) best = lam;
      removed_[e] = 0;
    }
    return beta - *best;
  }

  const PerturbationPlan& plan_;
  EngineOptions opt_;
  NormalForm base_;
  std::vector<Integer> q_;
  HowardResult work_, masked_;
  std::vector<char> zero_, removed_;
  Integer tmp_;
};

inline TrialResult lockin_trial(const PerturbationPlan& plan, const CylinderFunction& h) {
  LockInEngine engine(plan);
  return engine.run(h, "trial");
}

/// Stress direction: b (1 - 2^-10) g_K / ||g_K||_A cancels part of the
/// penalty around Y.
inline CylinderFunction adversarial_direction(const PerturbationPlan& plan, const Rational& b, int sign = 1) {
  const Rational gn = a_norm(plan.g_K, plan.a).a_norm;
  Rational c = sign * b * (1 - pow2(-10)) / gn;
  c.canonicalize();
  return scale(c, plan.g_K);
}

struct LockInReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  Rational radius;
  std::vector<TrialResult> results;
  bool all_locked = false;
  std::optional<Rational> min_margin;
};

inline LockInReport lockin_report(LockInEngine& engine, std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  const PerturbationPlan& plan = engine.plan();
  LockInReport rep;
  rep.trials = trials;
  rep.seed = seed;
  rep.radius = plan.radius();
  const std::size_t depth = plan.f_tilde.depth();
  rep.results.push_back(engine.run(CylinderFunction::zero(plan.f.alphabet(), depth), "zero"));
  rep.results.push_back(engine.run(adversarial_direction(plan, rep.radius, 1), "adversarial"));
  rep.results.push_back(engine.run(adversarial_direction(plan, rep.radius, -1), "reinforcing"));
  rep.results.push_back(
      engine.run(CylinderFunction::constant(plan.f.alphabet(), 0, rep.radius / 2), "constant"));
  for (std::size_t i = 0; i < trials; ++i) {
    const std::uint64_t s = seed + i;
    rep.results.push_back(engine.run(sample_direction(plan.f.alphabet(), plan.a, depth, rep.radius, s), "random", s));
  }
  rep.all_locked = std::all_of(rep.results.begin(), rep.results.end(), [](const TrialResult& t) { return t.locked; });
  for (const auto& t : rep.results)
    if (t.margin && (!rep.min_margin || *t.margin < *rep.min_margin)) rep.min_margin = t.margin;
  return rep;
}

inline LockInReport lockin_report(const PerturbationPlan& plan, std::size_t trials, std::uint64_t seed) {
  LockInEngine engine(plan);
  return lockin_report(engine, trials, seed);
}

struct RadiusReport {
  Rational theorem_radius;
  Rational empirical_radius;  // largest tested b at which every direction locked
  Rational first_failure;     // smallest tested b with a failure (0 if none found)
  std::size_t directions = 0;
  std::size_t evaluations = 0;
  double log2_ratio = 0;
};

/// Doubling then bisection on b over fixed unit directions (plus the
/// adversarial one): locked(b) iff every direction scaled to b(1 - 2^-10) locks.
inline RadiusReport empirical_radius(const PerturbationPlan& plan, const Rational& theorem_radius,
                                     std::size_t directions, std::uint64_t seed, std::size_t bisection_steps = 24,
                                     const Rational& cap = Rational(1 << 20)) {
  EngineOptions eo;
  eo.compute_margin = false;
  eo.check_norm = false;
  LockInEngine engine(plan, eo);
  const std::size_t depth = plan.f_tilde.depth();
  // Unit directions h = factor * base with ||h||_A = 1.
  std::vector<SampledPerturbation> dirs;
  const Rational gn = a_norm(plan.g_K, plan.a).a_norm;
  dirs.push_back({plan.g_K, Rational(1) / gn, Rational(1)});
  for (std::size_t i = 0; i < directions; ++i) {
    SampledPerturbation s = sample_direction(plan.f.alphabet(), plan.a, depth, 1, seed + i);
    s.factor /= s.norm;
    s.norm = 1;
    dirs.push_back(std::move(s));
  }
  RadiusReport rep;
  rep.theorem_radius = theorem_radius;
  rep.directions = dirs.size();
  auto locked = [&](const Rational& b) {
    ++rep.evaluations;
    const Rational c = b * (1 - pow2(-10));
    for (const auto& d : dirs) {
      if (!engine.run_scaled(d.factor * c, d.base, c, "radius").locked) return false;
    }
    return true;
  };
  Rational lo = 0, hi = theorem_radius;
  while (hi <= cap && locked(hi)) {
    lo = hi;
    hi *= 2;
  }
  if (hi > cap) {
    rep.empirical_radius = lo;
    rep.first_failure = 0;
  } else {
    for (std::size_t s = 0; s < bisection_steps && lo > 0; ++s) {
      Rational mid = (lo + hi) / 2;
      if (locked(mid))
        lo = mid;
      else
        hi = mid;
    }
    rep.empirical_radius = lo;
    rep.first_failure = hi;
  }
  rep.log2_ratio = lo > 0 ? log2_abs(lo) - log2_abs(theorem_radius) : -std::numeric_limits<double>::infinity();
  return rep;
}

struct ShadowGapReport {
  std::size_t r = 0;
  std::size_t p = 0;
  Index offset_x = 0;  // m
  Index offset_y = 0;  // m'
  Rational lower;      // f-bar(x) - gamma ||f||_A A_r / p
  Rational measured;   // f-bar(y)
  Rational upper;      // f-bar(x)
  bool holds = false;
};

class PreconditionFailure : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two-sided gap bound for an orbit y shadowed within 2^-r for one period by
/// a segment of the maximizing orbit x.
inline ShadowGapReport shadow_gap_check(const CylinderFunction& f, const ASequence& a, const PeriodicOrbit& x,
                                        const PeriodicOrbit& y, std::size_t r) {
  const Rational fx = ergodic_average(f, x);
  const NormalForm nf = solve_normal_form(f);
  if (fx != nf.beta) throw PreconditionFailure("x is not a maximizing orbit");
  ShadowGapReport rep;
  rep.r = r;
  rep.p = y.period();
  const Rational eps = pow2(-static_cast<std::int64_t>(r));
  bool found = false;
  for (Index m = 0; m < x.period() && !found; ++m)
    for (Index mp = 0; mp < y.period() && !found; ++mp) {
      bool ok = true;
      for (Index i = 0; i < y.period() && ok; ++i) ok = d(x.point(m + i), y.point(mp + i)) <= eps;
      if (ok) {
        found = true;
        rep.offset_x = m;
        rep.offset_y = mp;
      }
    }
  if (!found) throw PreconditionFailure("no segment of x shadows y within 2^-r for one period");
  rep.upper = fx;
  rep.measured = ergodic_average(f, y);
  rep.lower = fx - gamma_A(a) * a_norm(f, a).a_norm * a(r) / Rational(static_cast<unsigned long>(rep.p));
  rep.holds = rep.lower <= rep.measured && rep.measured <= rep.upper;
  return rep;
}

struct WalkTrace {
  std::vector<Symbol> symbols;        // a_1 .. a_N
  std::vector<std::size_t> excursions;  // times t with d(omega_t, O Y) > 2^-(k+1)
  std::vector<Rational> excursion_sums;  // q^{(t_n - t_{n-1})}(omega_{t_n}), n >= 1
  std::size_t violations = 0;            // sums above -alpha
  Rational count_bound;                  // 2 ||h*||_inf / alpha (alpha > 0)
  bool count_ok = false;
};

/// Greedy optimal-preimage walk omega_{t+1} = a omega_t with a maximizing
/// q(a omega_t) + h*(a omega_t), smallest symbol on ties. q must be
/// normalised (beta = 0) and h* a fixed point of Phi_q.
inline WalkTrace backward_walk(const CylinderFunction& q, const CylinderFunction& h_star, const PeriodicOrbit& y,
                               std::size_t k, const Rational& alpha, const Point& z, std::size_t steps) {
  const std::uint32_t m = q.alphabet().size;
  const std::size_t K = q.depth();
  if (h_star.depth() + 1 != K) throw std::invalid_argument("h* must have depth depth(q) - 1");
  if (K < k + 1) throw std::invalid_argument("q too shallow to resolve the 2^-(k+1) neighbourhood");
  const CylinderFunction hl = h_star;
  const Integer den = lcm(q.denominator(), hl.denominator());
  const Integer cq = den / q.denominator(), ch = den / hl.denominator();
  // Words of length K - 1 beginning each omega_t, tracked as indices.
  std::size_t node = 0;
  for (std::size_t t = 0; t + 1 < K; ++t) node = node * m + z[t];
  const std::size_t nodes = q.size() / m;
  std::vector<Word> orbit_prefixes;
  for (const auto& p : y.points()) orbit_prefixes.push_back(p.prefix(k + 1));
  Word window = z.prefix(k + 1);
  auto is_excursion = [&](const Word& w) {
    for (const auto& pre : orbit_prefixes)
      if (pre == w) return false;
    return true;
  };
  WalkTrace tr;
  std::vector<Integer> q_along{Integer(0)};  // q(omega_t) scaled by den; index 0 unused
  if (is_excursion(window)) tr.excursions.push_back(0);
  Integer best, cand;
  for (std::size_t t = 0; t < steps; ++t) {
    std::uint32_t pick = 0;
    for (std::uint32_t a = 0; a < m; ++a) {
      const std::size_t e = a * nodes + node;
      cand = q.numerators()[e] * cq;
      mpz_addmul(cand.get_mpz_t(), hl.numerators()[e / m].get_mpz_t(), ch.get_mpz_t());
      if (a == 0 || cand > best) {
        best = cand;
        pick = a;
      }
    }
    const std::size_t e = pick * nodes + node;
    q_along.push_back(q.numerators()[e] * cq);
    node = e / m;
    tr.symbols.push_back(pick);
    window.insert(window.begin(), pick);
    window.pop_back();
    if (is_excursion(window)) tr.excursions.push_back(t + 1);
  }
  for (std::size_t n = 1; n < tr.excursions.size(); ++n) {
    Integer s = 0;
    for (std::size_t u = tr.excursions[n - 1] + 1; u <= tr.excursions[n]; ++u) s += q_along[u];
    Rational sum(s, den);
    sum.canonicalize();
    if (sum > -alpha) ++tr.violations;
    tr.excursion_sums.push_back(sum);
  }
  if (alpha > 0) {
    tr.count_bound = 2 * sup_norm(h_star) / alpha;
    tr.count_ok = Rational(static_cast<unsigned long>(tr.excursion_sums.size())) <= tr.count_bound;
  }
  return tr;
}

}  // namespace ergopt
