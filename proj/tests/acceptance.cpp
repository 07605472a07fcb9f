// Runs the acceptance criteria and prints one PASS/FAIL line for each.

#include "ergopt/ergopt.hpp"

#include "CLI11.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace ergopt;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string suite_line(const SuiteReport& r) {
  std::ostringstream s;
  s << r.suite << " run=" << r.run << " failures=" << r.failure_count() << " tight=" << r.tight_count();
  if (r.discarded) s << " discarded=" << r.discarded;
  for (const auto& p : r.problems) s << " [" << p << "]";
  return s.str();
}

CylinderFunction worked() {
  return CylinderFunction(Alphabet(2), 2, {Rational(0), Rational(0), Rational(2), Rational(0)});
}

constexpr std::uint64_t kSeed = 20240601;

Outcome oracle_equivalence() {
  const auto t0 = Clock::now();
  const SuiteReport r = run_suite("oracle", kSeed, 500);
  const double s = seconds_since(t0);
  return {r.pass() && r.run == 500 && s < 60, suite_line(r) + " seconds=" + std::to_string(s)};
}

Outcome normal_form_certificate() {
  const SuiteReport r = run_suite("cohomology_bounds", kSeed, 500);
  return {r.pass() && r.run == 500, suite_line(r)};
}

Outcome fixed_point_certificate() {
  const SuiteReport r = run_suite("fixed_point", kSeed, 500);
  return {r.pass() && r.run == 500, suite_line(r)};
}

Outcome orbit_suites() {
  Outcome o{true, ""};
  for (const char* name : {"shadowing", "parallel_orbit", "in_order"}) {
    const SuiteReport r = run_suite(name, kSeed, 500);
    o.pass = o.pass && r.pass() && r.run == 500 && r.tight_count() > 0;
    o.detail += (o.detail.empty() ? "" : "; ") + suite_line(r);
  }
  return o;
}

Outcome shadow_gap() {
  const SuiteReport r = run_suite("shadow_gap", kSeed, 200);
  return {r.pass() && r.run == 200, suite_line(r)};
}

Outcome theorem_lockin(const PerturbationPlan& plan) {
  const auto t0 = Clock::now();
  const LockInReport rep = lockin_report(plan, 100, kSeed);
  const double s = seconds_since(t0);
  bool ok = plan.k == 15 && plan.k_auto && plan.c.alpha > 0 && rep.all_locked;
  bool zero = false, adversarial = false;
  std::size_t sampled = 0;
  for (const auto& t : rep.results) {
    ok = ok && t.locked && t.unique && t.optimizers == std::vector<Word>{{0, 1}} && t.h_norm < rep.radius;
    zero = zero || t.label == "zero";
    adversarial = adversarial || t.label == "adversarial";
    if (t.seed) ++sampled;
  }
  ok = ok && zero && adversarial && sampled == 100 && s < 300;
  std::ostringstream d;
  d << "k=" << plan.k << " alpha>0=" << (plan.c.alpha > 0) << " trials=" << rep.results.size()
    << " sampled=" << sampled << " radius~2^" << log2_abs(rep.radius) << " seconds=" << s;
  return {ok, d.str()};
}

Outcome empirical_lockin() {
  PlanOptions po;
  po.k = 2;
  const PerturbationPlan plan = build_perturbation(worked(), ASequence::triangular_dyadic(), Rational(1, 2), po);
  const auto thr = theorem_radius(plan);
  if (!thr) return {false, "no theorem radius"};
  const RadiusReport rr = empirical_radius(plan, *thr, 8, kSeed);
  const bool ok = rr.empirical_radius >= *thr && rr.empirical_radius >= 1000000 * *thr;
  std::ostringstream d;
  d << "theorem=2^" << log2_abs(*thr) << " empirical~" << rr.empirical_radius.get_d() << " log2_ratio=" << rr.log2_ratio;
  return {ok, d.str()};
}

Outcome backward_walk_check(const PerturbationPlan& plan) {
  LockInEngine engine(plan);
  const NormalForm& base = engine.unperturbed();
  const CylinderFunction q = add_constant(plan.f_tilde, -base.beta);
  const std::uint32_t m = plan.f.alphabet().size;
  std::size_t violations = 0, bad_counts = 0, total_exc = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(mix_seed(kSeed, s));
    Word pre(uniform_below(rng, 2 * plan.K + 1)), per(1 + uniform_below(rng, 6));
    for (auto& c : pre) c = static_cast<Symbol>(uniform_below(rng, m));
    for (auto& c : per) c = static_cast<Symbol>(uniform_below(rng, m));
    const WalkTrace tr = backward_walk(q, base.h, plan.y, plan.k, plan.c.alpha, Point(plan.f.alphabet(), pre, per), 200);
    violations += tr.violations;
    if (!tr.count_ok) ++bad_counts;
    total_exc += tr.excursions.size();
  }
  std::ostringstream d;
  d << "starts=20 excursions=" << total_exc << " violations=" << violations << " count_bound_failures=" << bad_counts;
  return {violations == 0 && bad_counts == 0, d.str()};
}

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& exe, const std::string& args) {
  CliRun r;
  FILE* p = popen((exe + " " + args + " 2>/dev/null").c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& exe, const std::string& data) {
  const fs::path tmp = fs::temp_directory_path() / ("ergopt_acceptance_" + std::to_string(getpid()));
  fs::create_directories(tmp);
  const std::string w = data + "/worked_example.json";
  const std::string plan = (tmp / "plan.json").string();
  if (cli(exe, "perturb " + w + " --epsilon 1/2 -o " + plan).code != 0) return {false, "perturb failed"};
  const std::vector<std::string> commands{
      "norm " + w,
      "maximize " + data + "/ternary.json --oracle-period 4",
      "normal-form " + w,
      "perturb " + w + " --epsilon 1/2 --k 2",
      "lockin " + plan + " --trials 10 --seed 5",
      "walk " + plan + " --starts 3 --steps 50 --seed 5",
      "verify --suite shadow_gap --instances 20 --seed 5",
  };
  std::size_t same = 0;
  std::string bad;
  for (const auto& c : commands) {
    const CliRun a = cli(exe, c), b = cli(exe, c);
    if (a.code == 0 && a.out == b.out && !a.out.empty()) ++same;
    else bad += " [" + c + "]";
  }
  // Files written with -o as well; the path is part of the manifest, so
  // both runs write the same one.
  const std::string o = (tmp / "nf.json").string();
  cli(exe, "normal-form " + w + " -o " + o);
  const std::string first = slurp(o);
  cli(exe, "normal-form " + w + " -o " + o);
  const bool files = !first.empty() && first == slurp(o);
  std::error_code ec;
  fs::remove_all(tmp, ec);
  std::ostringstream d;
  d << same << "/" << commands.size() << " commands byte-identical, output files identical=" << files << bad;
  return {same == commands.size() && files, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("acceptance");
  std::string exe, data;
  app.add_option("--cli", exe, "ergopt executable")->required();
  app.add_option("--data", data, "Sample data directory")->required();
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << name << " (" << seconds_since(t0) << " s): " << o.detail
              << std::endl;
  };

  report(1, "oracle equivalence", oracle_equivalence);
  report(2, "normal-form certificate", normal_form_certificate);
  report(3, "fixed-point certificate", fixed_point_certificate);
  report(4, "shadowing, parallel-orbit and in-order suites", orbit_suites);
  report(5, "shadow gap", shadow_gap);
  std::optional<PerturbationPlan> plan;
  report(6, "theorem-grade lock-in", [&] {
    plan = build_perturbation(worked(), ASequence::triangular_dyadic(), Rational(1, 2));
    return theorem_lockin(*plan);
  });
  report(7, "empirical lock-in radius", empirical_lockin);
  report(8, "backward walk", [&] {
    if (!plan) plan = build_perturbation(worked(), ASequence::triangular_dyadic(), Rational(1, 2));
    return backward_walk_check(*plan);
  });
  report(9, "determinism", [&] { return determinism(exe, data); });
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << (9 - failed) << "/9" << std::endl;
  return failed ? 1 : 0;
}
