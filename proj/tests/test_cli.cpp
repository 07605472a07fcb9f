#include "json.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

struct Out {
  int code = -1;
  std::string text;
};

Out run(const std::string& args) {
  const std::string cmd = std::string(ERGOPT_CLI) + " " + args + " 2>/dev/null";
  Out o;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return o;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) o.text.append(buf.data(), n);
  const int st = pclose(p);
  o.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return o;
}

std::string data(const std::string& name) { return std::string(ERGOPT_DATA) + "/" + name; }

Json result(const Out& o) { return Json::parse(o.text)["result"]; }

class Tmp {
 public:
  Tmp() : dir_(fs::temp_directory_path() / ("ergopt_cli_test_" + std::to_string(getpid()))) {
    fs::create_directories(dir_);
  }
  ~Tmp() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }
  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

 private:
  fs::path dir_;
};

}  // namespace

TEST(Cli, Norm) {
  const Out w = run("norm " + data("worked_example.json"));
  ASSERT_EQ(w.code, 0);
  EXPECT_EQ(result(w)["a_norm"], "6");
  EXPECT_EQ(result(run("norm " + data("step_dyadic.json")))["a_norm"], "2");
  EXPECT_EQ(result(run("norm " + data("constant.json")))["lip_A"], "0");
  const Json m = Json::parse(w.text)["manifest"];
  EXPECT_EQ(m["command"], "norm");
  EXPECT_EQ(m["inputs"][0]["sha256"].get<std::string>().size(), 64u);
  EXPECT_FALSE(m.contains("seconds"));
}

TEST(Cli, Maximize) {
  const Out w = run("maximize " + data("worked_example.json") + " --oracle-period 5");
  ASSERT_EQ(w.code, 0);
  const Json r = result(w);
  EXPECT_EQ(r["beta"], "1");
  EXPECT_EQ(r["unique"], true);
  EXPECT_EQ(r["oracle_agrees"], true);
  EXPECT_EQ(result(run("maximize " + data("constant.json")))["unique"], false);
  EXPECT_EQ(run("maximize " + data("ternary.json")).code, 0);
}

TEST(Cli, NormalForm) {
  const Tmp t;
  ASSERT_EQ(run("normal-form " + data("worked_example.json") + " -o " + t.path("nf.json")).code, 0);
  const Json r = Json::parse(t.read("nf.json"))["result"];
  EXPECT_EQ(r["f_hat"]["table"], Json::array({"-1", "0", "0", "-1"}));
  for (const auto& [k, v] : r["certificates"].items()) {
    if (v.is_boolean()) {
      EXPECT_TRUE(v.get<bool>()) << k;
    }
  }
  const std::string zero = t.write("zero.json", R"({"alphabet": 2, "depth": 2, "table": ["0","0","0","0"]})");
  const Json z = result(run("normal-form " + zero));
  EXPECT_EQ(z["f_hat"]["table"], Json::array({"0", "0", "0", "0"}));
}

TEST(Cli, PerturbAndLockin) {
  const Tmp t;
  const Out p = run("perturb " + data("worked_example.json") + " --epsilon 1/2 --k 2 -o " + t.path("plan.json"));
  ASSERT_EQ(p.code, 0);
  const Json plan = Json::parse(t.read("plan.json"))["result"];
  EXPECT_EQ(plan["mode"], "empirical");
  EXPECT_EQ(plan["k"], 2);
  EXPECT_EQ(run("perturb " + data("worked_example.json") + " --epsilon 2").code, 2);
  const Out a = run("lockin " + t.path("plan.json") + " --trials 5 --seed 3");
  const Out b = run("lockin " + t.path("plan.json") + " --trials 5 --seed 3");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.text, b.text);
  const Out csv = run("--csv lockin " + t.path("plan.json") + " --trials 2 --seed 3");
  // A comment line carries the manifest, then the header row.
  EXPECT_EQ(csv.text.substr(0, 2), "# ");
  const auto nl = csv.text.find('\n');
  ASSERT_NE(nl, std::string::npos);
  EXPECT_EQ(csv.text.substr(nl + 1, 6), "label,");
}

TEST(Cli, AutoKPlanLocks) {
  const Tmp t;
  const Out p = run("perturb " + data("worked_example.json") + " --epsilon 1/2 -o " + t.path("plan.json"));
  ASSERT_EQ(p.code, 0);
  const Json plan = Json::parse(t.read("plan.json"))["result"];
  EXPECT_EQ(plan["k"], 15);
  EXPECT_EQ(plan["mode"], "theorem");
  const Out l = run("lockin " + t.path("plan.json") + " --trials 3");
  ASSERT_EQ(l.code, 0);
  EXPECT_EQ(result(l)["all_locked"], true);
  EXPECT_EQ(run("walk " + t.path("plan.json") + " --starts 3 --steps 60").code, 0);
}

TEST(Cli, FloatFlagAddsDecimals) {
  const Json r = result(run("--float norm " + data("worked_example.json")));
  EXPECT_EQ(r["a_norm"], "6");
  EXPECT_TRUE(r.contains("a_norm_float"));
  EXPECT_DOUBLE_EQ(r["a_norm_float"].get<double>(), 6.0);
}

TEST(Cli, ConfigFile) {
  const Tmp t;
  const std::string cfg = t.write("c.toml", "[verify]\nsuite = \"shadowing\"\ninstances = 5\nseed = 4\n");
  const Out o = run("--config " + cfg + " verify");
  ASSERT_EQ(o.code, 0);
  const Json r = result(o);
  EXPECT_EQ(r["status"], "pass");
  ASSERT_EQ(r["suites"].size(), 1u);
  EXPECT_EQ(r["suites"][0]["suite"], "shadowing");
  EXPECT_EQ(r["suites"][0]["seed"], 4);
  EXPECT_EQ(r["suites"][0]["requested"], 5);
  // Command line wins over the file.
  EXPECT_EQ(result(run("--config " + cfg + " verify --seed 8"))["suites"][0]["seed"], 8);
}

TEST(Cli, ExitCodes) {
  const Tmp t;
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("verify --suite nonsense").code, 1);
  EXPECT_EQ(run("norm " + t.write("bad.json", "{\n \"alphabet\": }")).code, 2);
  EXPECT_EQ(run("norm " + t.write("r.json", R"({"alphabet": 2, "depth": 1, "table": ["0", "1/0"]})")).code, 2);
  EXPECT_EQ(run("norm " + t.path("missing.json")).code, 2);
}

TEST(Cli, VerifyFaultWritesCounterexamples) {
  const Tmp t;
  const std::string dir = t.path("ce");
  EXPECT_EQ(run("verify --suite parallel_orbit --instances 5 --inject-fault --counterexample-dir " + dir).code, 3);
  std::string first;
  for (const auto& e : fs::directory_iterator(dir))
    if (first.empty() || e.path().string() < first) first = e.path().string();
  ASSERT_FALSE(first.empty());
  EXPECT_EQ(run("verify --replay " + first).code, 0);
  EXPECT_EQ(run("verify --suite shadowing --instances 20").code, 0);
}

TEST(Cli, Deterministic) {
  for (const std::string& args : std::vector<std::string>{"norm " + data("ternary.json"), "maximize " + data("constant.json"),
                                  "normal-form " + data("ternary.json"), "verify --suite oracle --instances 10"}) {
    const Out a = run(args), b = run(args);
    EXPECT_EQ(a.code, 0) << args;
    EXPECT_EQ(a.text, b.text) << args;
  }
}
