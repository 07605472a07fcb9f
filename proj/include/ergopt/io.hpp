#pragma once

// JSON forms of functions, A-sequences, points, solver results and lock-in
// plans/reports. Rationals are "p/q" strings; tables are in lexicographic
// word order.

#include "ergopt/a_sequence.hpp"
#include "ergopt/cylinder.hpp"
#include "ergopt/lockin.hpp"
#include "ergopt/maxplus.hpp"
#include "ergopt/shift.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ergopt {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent input; `where` names the offending field or position.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

namespace io {

inline Json rational(const Rational& r) { return to_string(r); }

inline Json rationals(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& r : v) a.push_back(to_string(r));
  return a;
}

inline Json word(const Word& w) {
  Json a = Json::array();
  for (Symbol s : w) a.push_back(s);
  return a;
}

inline const Json& field(const Json& j, const std::string& key, const std::string& ctx) {
  if (!j.is_object()) throw ValidationError(ctx, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(ctx, "missing field '" + key + "'");
  return *it;
}

inline Rational parse_rational_json(const Json& j, const std::string& ctx) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(Integer(j.dump()));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(ctx, e.what());
  }
  throw ValidationError(ctx, "expected a rational as a \"p/q\" string or an integer");
}

inline std::uint64_t parse_uint(const Json& j, const std::string& ctx) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw ValidationError(ctx, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

inline Word parse_word(const Json& j, const Alphabet& a, const std::string& ctx) {
  if (!j.is_array()) throw ValidationError(ctx, "expected an array of symbols");
  Word w;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto s = parse_uint(j[i], ctx + "[" + std::to_string(i) + "]");
    if (s >= a.size) throw ValidationError(ctx + "[" + std::to_string(i) + "]", "symbol outside the alphabet");
    w.push_back(static_cast<Symbol>(s));
  }
  return w;
}

/// Parses text, reporting syntax errors with line and column.
inline Json parse_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError(source + ":" + std::to_string(line) + ":" + std::to_string(col), "JSON syntax error");
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json load_json(const std::string& path) { return parse_text(read_file(path), path); }

/// Tool outputs wrap their payload as {"manifest", "result"}; inputs accept both.
inline const Json& payload(const Json& j) {
  if (j.is_object() && j.contains("manifest") && j.contains("result")) return j["result"];
  return j;
}

}  // namespace io

inline Json to_json(const ASequence& a) {
  Json j;
  j["kind"] = a.kind_name();
  switch (a.kind()) {
    case ASequence::Kind::Geometric:
      j["a0"] = to_string(a.a0_param());
      j["ratio"] = to_string(a.ratio_param());
      break;
    case ASequence::Kind::CustomTable:
      j["values"] = io::rationals(a.table());
      j["tail_ratio"] = to_string(a.ratio_param());
      break;
    default: break;
  }
  return j;
}

inline ASequence a_sequence_from_json(const Json& j, const std::string& ctx = "a_sequence") {
  const Json& kind = io::field(j, "kind", ctx);
  if (!kind.is_string()) throw ValidationError(ctx + ".kind", "expected a string");
  const std::string k = kind.get<std::string>();
  try {
    if (k == "dyadic") return ASequence::dyadic();
    if (k == "triangular_dyadic") return ASequence::triangular_dyadic();
    if (k == "geometric") {
      Rational a0 = j.contains("a0") ? io::parse_rational_json(j["a0"], ctx + ".a0") : Rational(1);
      return ASequence::geometric(a0, io::parse_rational_json(io::field(j, "ratio", ctx), ctx + ".ratio"));
    }
    if (k == "custom_table") {
      const Json& vals = io::field(j, "values", ctx);
      if (!vals.is_array()) throw ValidationError(ctx + ".values", "expected an array");
      std::vector<Rational> v;
      for (std::size_t i = 0; i < vals.size(); ++i)
        v.push_back(io::parse_rational_json(vals[i], ctx + ".values[" + std::to_string(i) + "]"));
      return ASequence::custom_table(
          std::move(v), io::parse_rational_json(io::field(j, "tail_ratio", ctx), ctx + ".tail_ratio"));
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ValidationError(ctx, e.what());
  }
  throw ValidationError(ctx + ".kind", "unknown A-sequence kind '" + k + "'");
}

/// {"alphabet", "depth", "table"}; the A-sequence is attached separately.
inline Json to_json(const CylinderFunction& f) {
  Json j;
  j["alphabet"] = f.alphabet().size;
  j["depth"] = f.depth();
  Json t = Json::array();
  for (std::size_t i = 0; i < f.size(); ++i) t.push_back(to_string(f[i]));
  j["table"] = std::move(t);
  return j;
}

inline CylinderFunction function_from_json(const Json& j, const std::string& ctx = "function") {
  const auto m = io::parse_uint(io::field(j, "alphabet", ctx), ctx + ".alphabet");
  if (m < 2 || m > 255) throw ValidationError(ctx + ".alphabet", "alphabet size must lie in [2, 255]");
  const auto k = io::parse_uint(io::field(j, "depth", ctx), ctx + ".depth");
  if (k > 40) throw ValidationError(ctx + ".depth", "depth too large");
  const Json& table = io::field(j, "table", ctx);
  if (!table.is_array()) throw ValidationError(ctx + ".table", "expected an array");
  std::vector<Rational> vals;
  vals.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i)
    vals.push_back(io::parse_rational_json(table[i], ctx + ".table[" + std::to_string(i) + "]"));
  try {
    return CylinderFunction(Alphabet(static_cast<std::uint32_t>(m)), k, vals);
  } catch (const std::exception& e) {
    throw ValidationError(ctx + ".table", e.what());
  }
}

/// A function file: the function fields plus "a_sequence".
struct FunctionFile {
  CylinderFunction f;
  ASequence a;
};

inline Json to_json(const FunctionFile& ff) {
  Json j = to_json(ff.f);
  j["a_sequence"] = to_json(ff.a);
  return j;
}

inline FunctionFile function_file_from_json(const Json& doc) {
  const Json& j = io::payload(doc);
  CylinderFunction f = function_from_json(j);
  ASequence a = j.contains("a_sequence") ? a_sequence_from_json(j["a_sequence"]) : ASequence::dyadic();
  return {std::move(f), std::move(a)};
}

inline Json to_json(const Point& x) {
  Json j;
  j["preperiod"] = io::word(x.preperiod());
  j["period"] = io::word(x.period());
  return j;
}

inline Point point_from_json(const Json& j, const Alphabet& a, const std::string& ctx = "point") {
  Word u = j.contains("preperiod") ? io::parse_word(j["preperiod"], a, ctx + ".preperiod") : Word{};
  Word v = io::parse_word(io::field(j, "period", ctx), a, ctx + ".period");
  if (v.empty()) throw ValidationError(ctx + ".period", "period must be nonempty");
  return Point(a, std::move(u), std::move(v));
}

inline Json to_json(const NormReport& r) {
  Json j;
  j["variations"] = io::rationals(r.variations);
  j["tail_sums"] = io::rationals(r.tail_sums);
  j["lip_A"] = to_string(r.lip_A);
  j["sup_norm"] = to_string(r.sup_norm);
  j["a_norm"] = to_string(r.a_norm);
  return j;
}

inline Json to_json(const MaxMeanResult& r) {
  Json j;
  j["beta"] = to_string(r.beta);
  Json cycles = Json::array();
  for (const auto& o : r.critical_cycles) cycles.push_back(io::word(o.necklace()));
  j["critical_cycles"] = std::move(cycles);
  j["unique"] = r.unique;
  j["enumeration_complete"] = r.complete;
  return j;
}

inline Json to_json(const NormBounds& b) {
  Json j;
  j["gamma_A"] = to_string(b.gamma);
  j["f_norm"] = to_string(b.f_norm);
  j["f_hat_norm"] = to_string(b.f_hat_norm);
  j["norm_bound"] = b.norm_bound;
  j["tail_sums"] = io::rationals(b.tail_sums);
  j["tail_bounds"] = io::rationals(b.tail_rhs);
  j["tail_bound"] = b.tail_bound;
  j["lip_h"] = to_string(b.lip_h);
  j["lip_f_over_delta"] = to_string(b.lip_f_over_delta);
  j["lip_bound"] = b.lip_bound;
  return j;
}

inline Json to_json(const NormalForm& nf) {
  Json j;
  j["beta"] = to_string(nf.beta);
  j["h"] = to_json(nf.h);
  j["f_hat"] = to_json(nf.f_hat);
  Json cert;
  cert["fixed_point"] = nf.fixed_point;
  cert["nonpositive"] = nf.nonpositive;
  if (nf.bounds) {
    cert["norm_bound"] = nf.bounds->norm_bound;
    cert["tail_bound"] = nf.bounds->tail_bound;
    cert["lip_bound"] = nf.bounds->lip_bound;
  }
  j["certificates"] = std::move(cert);
  if (nf.bounds) j["bounds"] = to_json(*nf.bounds);
  return j;
}

inline Json to_json(const LockInConstants& c) {
  Json j;
  j["gamma_A"] = to_string(c.gamma);
  j["f_norm"] = to_string(c.f_norm);
  j["L"] = to_string(c.L);
  j["sigma"] = to_string(c.sigma);
  j["alpha"] = to_string(c.alpha);
  j["alpha_positive"] = c.alpha > 0;
  return j;
}

/// Largest f_tilde table written out in full; deeper plans store f_tilde as
/// f_hat - epsilon * g_K and are rebuilt on load.
inline constexpr std::size_t kInlineTableLimit = 4096;

inline Json to_json(const PerturbationPlan& p) {
  Json j;
  j["function"] = to_json(FunctionFile{p.f, p.a});
  j["epsilon"] = to_string(p.epsilon);
  j["k"] = p.k;
  j["k_auto"] = p.k_auto;
  j["mode"] = p.empirical ? "empirical" : "theorem";
  j["beta"] = to_string(p.nf.beta);
  j["f_hat"] = to_json(p.nf.f_hat);
  j["source_orbit"] = io::word(p.source.necklace());
  j["recurrence"] = {{"i", p.recurrence.i}, {"j", p.recurrence.j}};
  j["orbit"] = io::word(p.y.necklace());
  j["period"] = p.y.period();
  j["constants"] = to_json(p.c);
  j["radius"] = to_string(p.radius());
  j["K"] = p.K;
  Json ft;
  ft["form"] = "f_hat - epsilon * g_K";
  ft["g_K"] = "min over orbit points y' of A_min(c, K), c = common prefix length with y'";
  ft["depth"] = p.f_tilde.depth();
  if (p.f_tilde.size() <= kInlineTableLimit) ft["table"] = to_json(p.f_tilde)["table"];
  j["f_tilde"] = std::move(ft);
  return j;
}

/// Rebuilds the plan from its embedded inputs and checks it reproduces the
/// stored construction.
inline PerturbationPlan plan_from_json(const Json& doc) {
  const Json& j = io::payload(doc);
  const FunctionFile ff = function_file_from_json(io::field(j, "function", "plan"));
  const Rational eps = io::parse_rational_json(io::field(j, "epsilon", "plan"), "plan.epsilon");
  PlanOptions opt;
  const bool k_auto = io::field(j, "k_auto", "plan").get<bool>();
  if (!k_auto) opt.k = io::parse_uint(io::field(j, "k", "plan"), "plan.k");
  opt.K = io::parse_uint(io::field(j, "K", "plan"), "plan.K");
  PerturbationPlan p = [&] {
    try {
      return build_perturbation(ff.f, ff.a, eps, opt);
    } catch (const std::invalid_argument& e) {
      throw ValidationError("plan", e.what());
    }
  }();
  const Word orbit = io::parse_word(io::field(j, "orbit", "plan"), ff.f.alphabet(), "plan.orbit");
  if (!(PeriodicOrbit(ff.f.alphabet(), orbit) == p.y)) throw ValidationError("plan.orbit", "does not match rebuild");
  if (io::parse_uint(io::field(j, "k", "plan"), "plan.k") != p.k) throw ValidationError("plan.k", "does not match rebuild");
  const Json& c = io::field(j, "constants", "plan");
  if (io::parse_rational_json(io::field(c, "alpha", "plan.constants"), "plan.constants.alpha") != p.c.alpha)
    throw ValidationError("plan.constants.alpha", "does not match rebuild");
  const Json& ft = io::field(j, "f_tilde", "plan");
  if (ft.contains("table")) {
    Json fj = to_json(p.f_tilde);
    if (fj["table"] != ft["table"]) throw ValidationError("plan.f_tilde.table", "does not match rebuild");
  }
  return p;
}

inline Json to_json(const TrialResult& t) {
  Json j;
  j["label"] = t.label;
  if (t.seed) j["seed"] = *t.seed;
  j["h_norm"] = to_string(t.h_norm);
  j["locked"] = t.locked;
  j["unique"] = t.unique;
  Json opt = Json::array();
  for (const auto& w : t.optimizers) opt.push_back(io::word(w));
  j["optimizers"] = std::move(opt);
  j["beta"] = to_string(t.beta);
  if (t.margin) j["margin"] = to_string(*t.margin);
  return j;
}

inline Json to_json(const LockInReport& r) {
  Json j;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["radius"] = to_string(r.radius);
  j["all_locked"] = r.all_locked;
  if (r.min_margin) j["min_margin"] = to_string(*r.min_margin);
  Json arr = Json::array();
  for (const auto& t : r.results) arr.push_back(to_json(t));
  j["results"] = std::move(arr);
  return j;
}

inline Json to_json(const RadiusReport& r) {
  Json j;
  j["theorem_radius"] = to_string(r.theorem_radius);
  j["empirical_radius"] = to_string(r.empirical_radius);
  j["first_failure"] = to_string(r.first_failure);
  j["directions"] = r.directions;
  j["evaluations"] = r.evaluations;
  j["empirical_at_least_theorem"] = r.empirical_radius >= r.theorem_radius;
  return j;
}

inline Json to_json(const ShadowGapReport& r) {
  Json j;
  j["r"] = r.r;
  j["p"] = r.p;
  j["offset_x"] = r.offset_x;
  j["offset_y"] = r.offset_y;
  j["lower"] = to_string(r.lower);
  j["measured"] = to_string(r.measured);
  j["upper"] = to_string(r.upper);
  j["holds"] = r.holds;
  return j;
}

}  // namespace ergopt
