// ergopt command-line front end. Every command reads JSON inputs, writes a
// JSON (or CSV) report with an embedded run manifest, and maps failures to
// exit codes: 0 ok, 1 usage, 2 invalid input, 3 certificate or suite failure.

#include "ergopt/ergopt.hpp"

#include "CLI11.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ergopt;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kFailed = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  bool as_float = false;
  bool as_csv = false;
  bool timing = false;
  std::vector<std::string> args;
};

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

/// Reads an input file and remembers its hash for the manifest.
class Inputs {
 public:
  std::string read(const std::string& path) {
    std::string text = io::read_file(path);
    Json e;
    e["path"] = path;
    e["sha256"] = sha256_hex(text);
    list_.push_back(std::move(e));
    return text;
  }
  Json load(const std::string& path) { return io::parse_text(read(path), path); }
  const Json& list() const { return list_; }

 private:
  Json list_ = Json::array();
};

void write_atomic(const std::string& path, const std::string& text) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError(path, "cannot open for writing");
    out << text;
    if (!out.flush()) throw ValidationError(path, "write failed");
  }
  fs::rename(tmp, target);
}

bool looks_rational(const std::string& s) {
  if (s.empty()) return false;
  try {
    (void)parse_rational(s);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

/// Adds "<key>_float" next to every rational string (or array of them).
void decorate_floats(Json& j) {
  if (j.is_array()) {
    for (auto& e : j) decorate_floats(e);
    return;
  }
  if (!j.is_object()) return;
  Json extra = Json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    Json& v = it.value();
    if (v.is_string() && looks_rational(v.get<std::string>())) {
      extra[it.key() + "_float"] = to_double(parse_rational(v.get<std::string>()));
    } else if (v.is_array() && !v.empty() &&
               std::all_of(v.begin(), v.end(),
                           [](const Json& e) { return e.is_string() && looks_rational(e.get<std::string>()); })) {
      Json arr = Json::array();
      for (const auto& e : v) arr.push_back(to_double(parse_rational(e.get<std::string>())));
      extra[it.key() + "_float"] = std::move(arr);
    } else {
      decorate_floats(v);
    }
  }
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
}

struct Run {
  const Globals& g;
  std::string command;
  Inputs inputs;
  std::optional<std::uint64_t> seed;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  Json manifest() const {
    Json m;
    m["command"] = command;
    m["arguments"] = g.args;
    m["inputs"] = inputs.list();
    if (seed) m["seed"] = *seed;
    m["version"] = kVersion;
    if (g.timing)
      m["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return m;
  }

  std::string document(Json result) const {
    if (g.as_float) decorate_floats(result);
    Json doc;
    doc["manifest"] = manifest();
    doc["result"] = std::move(result);
    return doc.dump(2) + "\n";
  }

  void emit(const std::string& text, const std::string& out) const {
    if (out.empty())
      std::cout << text << std::flush;
    else
      write_atomic(out, text);
  }
};

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    s += c.find(',') == std::string::npos ? c : "\"" + c + "\"";
    first = false;
  }
  return s + "\n";
}

Rational parse_rational_arg(const std::string& text, const std::string& what) {
  try {
    return parse_rational(text);
  } catch (const std::exception& e) {
    throw ValidationError(what, e.what());
  }
}

// -- commands ------------------------------------------------------------------

int cmd_norm(Run& run, const std::string& file, const std::string& out) {
  const FunctionFile ff = function_file_from_json(run.inputs.load(file));
  const NormReport r = a_norm(ff.f, ff.a);
  if (run.g.as_csv) {
    std::string s = "# manifest " + run.manifest().dump() + "\n" + csv_line({"j", "var_j", "V_j", "A_j"});
    for (std::size_t j = 0; j < r.variations.size(); ++j)
      s += csv_line({std::to_string(j), to_string(r.variations[j]), to_string(r.tail_sums[j]), to_string(ff.a(j))});
    run.emit(s, out);
    return kOk;
  }
  Json j = to_json(r);
  j["a_sequence"] = to_json(ff.a);
  run.emit(run.document(std::move(j)), out);
  return kOk;
}

int cmd_maximize(Run& run, const std::string& file, std::optional<std::size_t> oracle_period, const std::string& out) {
  const FunctionFile ff = function_file_from_json(run.inputs.load(file));
  const MaxMeanResult mm = max_mean_cycle(ff.f);
  Json j = to_json(mm);
  int rc = kOk;
  if (oracle_period) {
    OracleResult o;
    try {
      o = oracle_max(ff.f, *oracle_period);
    } catch (const OracleGuardExceeded& e) {
      throw ValidationError("--oracle-period", e.what());
    } catch (const std::invalid_argument& e) {
      throw ValidationError("--oracle-period", e.what());
    }
    // Periods up to the node count cover every simple cycle, so the oracle
    // must then reach beta exactly.
    const bool complete = *oracle_period >= checked_pow(ff.f.alphabet().size, ff.f.depth() == 0 ? 0 : ff.f.depth() - 1);
    Json oj;
    oj["period"] = *oracle_period;
    oj["value"] = to_string(o.value);
    oj["orbits_checked"] = o.orbits_checked;
    Json best = Json::array();
    for (const auto& w : o.best) best.push_back(io::word(w));
    oj["best"] = std::move(best);
    oj["complete"] = complete;
    j["oracle"] = std::move(oj);
    j["oracle_agrees"] = o.value == mm.beta;
    if (o.value > mm.beta || (complete && o.value != mm.beta)) rc = kFailed;
  }
  if (run.g.as_csv) {
    std::string s = "# manifest " + run.manifest().dump() + "\n" + csv_line({"necklace", "period", "mean"});
    for (const auto& c : mm.critical_cycles)
      s += csv_line({word_to_string(c.necklace()), std::to_string(c.period()), to_string(ergodic_average(ff.f, c))});
    run.emit(s, out);
    return rc;
  }
  run.emit(run.document(std::move(j)), out);
  return rc;
}

int cmd_normal_form(Run& run, const std::string& file, const std::string& out) {
  const FunctionFile ff = function_file_from_json(run.inputs.load(file));
  const NormalForm nf = normal_form(ff.f, ff.a);
  const bool ok = nf.fixed_point && nf.nonpositive && nf.bounds && nf.bounds->norm_bound && nf.bounds->tail_bound &&
                  nf.bounds->lip_bound;
  if (run.g.as_csv) {
    std::string s = "# manifest " + run.manifest().dump() + "\n" + csv_line({"word", "f", "f_hat"});
    for (std::size_t i = 0; i < ff.f.size(); ++i)
      s += csv_line({word_to_string(index_word(i, ff.f.depth(), ff.f.alphabet().size)), to_string(ff.f[i]),
                     to_string(nf.f_hat[i])});
    run.emit(s, out);
    return ok ? kOk : kFailed;
  }
  Json j = to_json(nf);
  j["a_sequence"] = to_json(ff.a);
  run.emit(run.document(std::move(j)), out);
  return ok ? kOk : kFailed;
}

int cmd_perturb(Run& run, const std::string& file, const std::string& eps_text, std::optional<std::size_t> k,
                std::optional<std::size_t> K, const std::string& out) {
  const FunctionFile ff = function_file_from_json(run.inputs.load(file));
  const Rational eps = parse_rational_arg(eps_text, "--epsilon");
  PlanOptions po;
  po.k = k;
  po.K = K;
  PerturbationPlan plan = [&] {
    try {
      return build_perturbation(ff.f, ff.a, eps, po);
    } catch (const std::invalid_argument& e) {
      throw ValidationError("perturb", e.what());
    }
  }();
  const Json pj = to_json(plan);
  if (out.empty()) {
    run.emit(run.document(pj), "");
    return kOk;
  }
  run.emit(run.document(pj), out);
  Json summary;
  summary["plan"] = out;
  for (const char* key : {"k", "k_auto", "mode", "beta", "source_orbit", "recurrence", "orbit", "period", "constants",
                          "radius", "K"})
    summary[key] = pj[key];
  std::cout << run.document(std::move(summary)) << std::flush;
  return kOk;
}

int cmd_lockin(Run& run, const std::string& file, std::size_t trials, std::uint64_t seed, bool radius,
               std::size_t directions, const std::string& out) {
  run.seed = seed;
  const PerturbationPlan plan = plan_from_json(run.inputs.load(file));
  LockInEngine engine(plan);
  LockInReport rep = [&] {
    try {
      return lockin_report(engine, trials, seed);
    } catch (const std::invalid_argument& e) {
      throw ValidationError("lockin", e.what());
    }
  }();
  Json j = to_json(rep);
  j["mode"] = plan.empirical ? "empirical" : "theorem";
  j["orbit"] = io::word(plan.y.necklace());
  if (radius) {
    const std::optional<Rational> tr = theorem_radius(plan);
    const RadiusReport rr = empirical_radius(plan, tr ? *tr : plan.radius(), directions, seed);
    Json rj = to_json(rr);
    rj["theorem_radius_source"] = tr ? (plan.k_auto ? "plan" : "automatic k") : "plan (no automatic k)";
    rj["log2_ratio"] = rr.log2_ratio;
    j["radius_search"] = std::move(rj);
  }
  if (run.g.as_csv) {
    std::string s = "# manifest " + run.manifest().dump() + "\n" +
                    csv_line({"label", "seed", "h_norm", "locked", "unique", "beta", "margin"});
    for (const auto& t : rep.results)
      s += csv_line({t.label, t.seed ? std::to_string(*t.seed) : "", to_string(t.h_norm), t.locked ? "1" : "0",
                     t.unique ? "1" : "0", to_string(t.beta), t.margin ? to_string(*t.margin) : ""});
    run.emit(s, out);
  } else {
    run.emit(run.document(std::move(j)), out);
  }
  return rep.all_locked || plan.empirical ? kOk : kFailed;
}

int cmd_walk(Run& run, const std::string& file, std::size_t starts, std::size_t steps, std::uint64_t seed,
             const std::string& out) {
  run.seed = seed;
  const PerturbationPlan plan = plan_from_json(run.inputs.load(file));
  LockInEngine engine(plan);
  const NormalForm& base = engine.unperturbed();
  const CylinderFunction q = add_constant(plan.f_tilde, -base.beta);
  const bool certified = plan.c.alpha > 0;
  Json walks = Json::array();
  bool ok = true;
  for (std::size_t s = 0; s < starts; ++s) {
    Rng rng(mix_seed(seed, s));
    Word pre(uniform_below(rng, 2 * plan.K + 1)), per(1 + uniform_below(rng, 6));
    for (auto& c : pre) c = static_cast<Symbol>(uniform_below(rng, plan.f.alphabet().size));
    for (auto& c : per) c = static_cast<Symbol>(uniform_below(rng, plan.f.alphabet().size));
    const Point z(plan.f.alphabet(), pre, per);
    const WalkTrace tr = backward_walk(q, base.h, plan.y, plan.k, plan.c.alpha, z, steps);
    Json wj;
    wj["start"] = to_json(z);
    wj["excursions"] = tr.excursions.size();
    wj["excursion_sums"] = io::rationals(tr.excursion_sums);
    wj["violations"] = tr.violations;
    if (certified) {
      wj["count_bound"] = to_string(tr.count_bound);
      wj["count_ok"] = tr.count_ok;
    }
    if (certified && (tr.violations > 0 || !tr.count_ok)) ok = false;
    walks.push_back(std::move(wj));
  }
  Json j;
  j["certified"] = certified;
  j["alpha"] = to_string(plan.c.alpha);
  j["orbit"] = io::word(plan.y.necklace());
  j["steps"] = steps;
  j["walks"] = std::move(walks);
  j["ok"] = ok;
  run.emit(run.document(std::move(j)), out);
  return ok ? kOk : kFailed;
}

struct VerifyArgs {
  std::string suite = "all";
  std::uint64_t seed = 1;
  std::optional<std::size_t> instances;
  std::string counterexample_dir = "counterexamples";
  std::string replay;
  bool inject_fault = false;
  GeneratorRanges ranges;
};

int cmd_verify(Run& run, const VerifyArgs& a, const std::string& out) {
  run.seed = a.seed;
  SuiteOptions opt;
  opt.ranges = a.ranges;
  opt.inject_fault = a.inject_fault;
  std::vector<SuiteReport> reports;
  if (!a.replay.empty()) {
    const Json cj = run.inputs.load(a.replay);
    try {
      reports.push_back(replay_counterexample(cj, a.inject_fault));
    } catch (const std::invalid_argument& e) {
      throw ValidationError(a.replay, e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(a.replay, e.what());
    }
  } else {
    std::vector<std::string> names;
    if (a.suite == "all") {
      names = suite_names();
    } else {
      if (!suite_registry().count(a.suite)) throw UsageError("unknown suite '" + a.suite + "'");
      names.push_back(a.suite);
    }
    try {
      (void)InstanceGenerator(a.seed, a.ranges);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    for (const auto& n : names)
      reports.push_back(
          run_suite(n, a.seed, a.instances ? *a.instances : suite_registry().at(n).default_instances, opt));
  }
  bool pass = true;
  Json arr = Json::array();
  Json files = Json::array();
  for (const auto& r : reports) {
    pass = pass && r.pass();
    arr.push_back(to_json(r));
    for (const auto& p : r.properties)
      for (const auto& c : p.counterexamples) {
        const std::string path = (fs::path(a.counterexample_dir) / (c.suite + "-" + c.property + "-" +
                                                                    std::to_string(c.instance) + ".json"))
                                     .string();
        write_atomic(path, to_json(c, r.ranges).dump(2) + "\n");
        files.push_back(path);
      }
  }
  for (const auto& r : reports)
    std::cerr << r.suite << ": " << (r.pass() ? "pass" : "FAIL") << " (" << r.run << " run, " << r.discarded
              << " discarded, " << r.failure_count() << " failures)\n";
  if (run.g.as_csv) {
    std::string s = "# manifest " + run.manifest().dump() + "\n" +
                    csv_line({"suite", "property", "checks", "failures", "tight"});
    for (const auto& r : reports)
      for (const auto& p : r.properties)
        s += csv_line({r.suite, p.name, std::to_string(p.checks), std::to_string(p.failures), std::to_string(p.tight)});
    run.emit(s, out);
  } else {
    Json j;
    j["status"] = pass ? "pass" : "fail";
    j["suites"] = std::move(arr);
    j["counterexample_files"] = std::move(files);
    run.emit(run.document(std::move(j)), out);
  }
  return pass ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  Globals g;
  for (int i = 1; i < argc; ++i) g.args.emplace_back(argv[i]);

  CLI::App app{"Exact ergodic optimization for cylinder functions on the full shift."};
  app.set_version_flag("--version", kVersion);
  auto* config = app.set_config("--config", "", "TOML file with option defaults (command line wins)");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--float", g.as_float, "Also render rationals as decimals");
  app.add_flag("--csv", g.as_csv, "Emit CSV tables instead of JSON");
  app.add_flag("--timing", g.timing, "Record wall time in the manifest");

  std::string file, out, eps = "";
  std::optional<std::size_t> oracle_period, k, K;
  std::size_t trials = 100, directions = 8, starts = 20, steps = 200;
  std::uint64_t seed = 1;
  bool radius = false;
  VerifyArgs va;

  auto* norm = app.add_subcommand("norm", "A-norm report of a function");
  norm->add_option("file", file, "Function JSON")->required();
  norm->add_option("-o,--output", out, "Output file (default stdout)");

  auto* maximize = app.add_subcommand("maximize", "Maximum cycle mean and maximizing cycles");
  maximize->add_option("file", file, "Function JSON")->required();
  maximize->add_option("--oracle-period", oracle_period, "Cross-check by enumerating orbits up to this period");
  maximize->add_option("-o,--output", out, "Output file (default stdout)");

  auto* nform = app.add_subcommand("normal-form", "Normal form f_hat <= 0 with certificates");
  nform->add_option("file", file, "Function JSON")->required();
  nform->add_option("-o,--output", out, "Output file (default stdout)");

  auto* perturb = app.add_subcommand("perturb", "Build a lock-in plan");
  perturb->add_option("file", file, "Function JSON")->required();
  perturb->add_option("--epsilon", eps, "Perturbation size in (0,1), as p/q")->required();
  perturb->add_option("--k", k, "Recurrence depth (default: smallest admissible)");
  perturb->add_option("--K", K, "Truncation depth of the distance penalty");
  perturb->add_option("-o,--output", out, "Plan file (default stdout)");

  auto* lockin = app.add_subcommand("lockin", "Sample perturbations of a plan and check the optimizer");
  lockin->add_option("plan", file, "Plan JSON")->required();
  lockin->add_option("--trials", trials, "Random trials")->capture_default_str();
  lockin->add_option("--seed", seed, "Base seed")->capture_default_str();
  lockin->add_flag("--empirical-radius", radius, "Search the largest radius at which sampled directions lock");
  lockin->add_option("--directions", directions, "Random directions in the radius search")->capture_default_str();
  lockin->add_option("-o,--output", out, "Output file (default stdout)");

  auto* walk = app.add_subcommand("walk", "Backward optimal-preimage walks on a plan");
  walk->add_option("plan", file, "Plan JSON")->required();
  walk->add_option("--starts", starts, "Random starting points")->capture_default_str();
  walk->add_option("--steps", steps, "Steps per walk")->capture_default_str();
  walk->add_option("--seed", seed, "Seed")->capture_default_str();
  walk->add_option("-o,--output", out, "Output file (default stdout)");

  auto* verify = app.add_subcommand("verify", "Run property suites");
  verify->add_option("--suite", va.suite, "Suite name or 'all'")->capture_default_str();
  verify->add_option("--seed", va.seed, "Seed")->capture_default_str();
  verify->add_option("--instances", va.instances, "Instances per suite (default: per suite)");
  verify->add_option("--counterexample-dir", va.counterexample_dir, "Where failing instances are written")
      ->capture_default_str();
  verify->add_option("--replay", va.replay, "Re-run the instance of a counterexample file");
  verify->add_flag("--inject-fault", va.inject_fault, "Negate every checked inequality (harness self-test)");
  verify->add_option("--max-depth", va.ranges.max_depth, "Largest generated depth")->capture_default_str();
  verify->add_option("--max-den", va.ranges.max_den, "Largest table denominator")->capture_default_str();
  verify->add_option("--value-bound", va.ranges.value_bound, "Largest |table value|")->capture_default_str();
  verify->add_option("--alphabets", va.ranges.alphabets, "Alphabet sizes to draw from");
  verify->add_option("-o,--output", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  Run run{g, app.get_subcommands().front()->get_name(), {}, {}};
  try {
    if (config->count() > 0) run.inputs.read(config->as<std::string>());
    if (*norm) return cmd_norm(run, file, out);
    if (*maximize) return cmd_maximize(run, file, oracle_period, out);
    if (*nform) return cmd_normal_form(run, file, out);
    if (*perturb) return cmd_perturb(run, file, eps, k, K, out);
    if (*lockin) return cmd_lockin(run, file, trials, seed, radius, directions, out);
    if (*walk) return cmd_walk(run, file, starts, steps, seed, out);
    if (*verify) return cmd_verify(run, va, out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const CertificateFailure& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
