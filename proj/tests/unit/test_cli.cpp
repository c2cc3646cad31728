#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(PLANEDYN_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const char* name) { return std::string(PLANEDYN_CONFIGS) + "/" + name; }

fs::path scratch(const char* name) {
  const fs::path p = fs::temp_directory_path() / "planedyn_cli_test" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  CHECK(run("hp-scan --help").out.find("--config") != std::string::npos);
  CHECK(run("").code == 1);
  CHECK(run("no-such-command").code == 1);
  CHECK(run("sign-probe").code == 1);
  CHECK(run("sign-probe --config /nonexistent.json").code == 1);
  CHECK(run("sign-probe --config " + config("translation_modeC.json") + " --x \"0;0\" -o " +
            scratch("bad").string()).code == 1);
  const fs::path bad = scratch("badjson");
  fs::create_directories(bad);
  std::ofstream(bad / "c.json") << "{ not json";
  CHECK(run("sign-probe --config " + (bad / "c.json").string()).code == 1);
  std::ofstream(bad / "d.json") << R"({"map": {"kind": "translation"}, "metric": {"mode": "D"}})";
  CHECK(run("sign-probe --config " + (bad / "d.json").string() + " -o " + bad.string()).code == 1);
}

TEST_CASE("sign probe reports both witnesses") {
  const fs::path out = scratch("probe");
  const Run r = run("sign-probe --x 0,0 --k 1 --config " + config("translation_modeC.json") + " -o " + out.string());
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("probe").at("V_plus").get<double>() > 0);
  CHECK(j.at("probe").at("V_minus").get<double>() < 0);
  CHECK(j.at("probe").contains("y_plus"));
  CHECK(j.at("probe").contains("z_minus"));
  CHECK(j.at("config_hash").get<std::string>().size() == 16);
}

TEST_CASE("identity pairing is a contract violation") {
  const fs::path out = scratch("identity");
  const Run r = run("conjugacy --config " + config("identity_metric_with_identity_map.json") + " -o " + out.string());
  CHECK(r.code == 2);
  CHECK(json::parse(r.out).at("verdict") == "ProbeFailed");
  CHECK(run("sign-probe --config " + config("identity_metric_with_identity_map.json") + " -o " + out.string()).code ==
        2);
}

TEST_CASE("hp-scan exit code follows the verdict") {
  const fs::path out = scratch("hp");
  const Run r = run("hp-scan --config " + config("translation_modeC.json") + " -o " + out.string());
  const json j = json::parse(r.out);
  CHECK(r.code == (j.at("verdict") == "Decaying" ? 0 : 2));
  CHECK(fs::exists(out / "hp_scan.json"));
  CHECK(fs::exists(out / "hp_decay.svg"));
  CHECK(slurp(out / "hp_scan.csv").rfind("radius,sup_ratio,x1,x2\n", 0) == 0);
}

TEST_CASE("artifacts of the geometric commands") {
  const fs::path out = scratch("leaf");
  REQUIRE(run("trace-leaf --config " + config("translation_modeC.json") + " -o " + out.string()).code == 0);
  CHECK(slurp(out / "leaf.csv").rfind("x1,x2\n", 0) == 0);
  const json side = json::parse(slurp(out / "leaf.json"));
  CHECK(side.at("truncation").at("n_max") == 40);
  CHECK(side.at("membership_ratio").get<double>() <= 1.05);
  CHECK(slurp(out / "leaf.svg").find("<polyline") != std::string::npos);

  REQUIRE(run("stable-set --config " + config("translation_modeC.json") + " -o " + out.string()).code == 0);
  CHECK(slurp(out / "escape_field.csv").rfind("x1,x2,escape_n\n", 0) == 0);

  const Run cert = run("expansive-cert --config " + config("translation_modeC.json") + " -o " + out.string());
  REQUIRE(cert.code == 0);
  CHECK(json::parse(cert.out).at("certificate").at("n") == 2);

  const Run ax = run("axiom-scan --config " + config("linear_modeD.json") + " -o " + out.string());
  REQUIRE(ax.code == 0);
  CHECK(json::parse(ax.out).at("axioms").at("triangle_violations") == 0);
}

TEST_CASE("same config and seed give identical outputs") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const std::string base = "metric-eval --config " + config("translation_modeC.json") + " --seed 5 -o ";
  const Run ra = run(base + a.string()), rb = run(base + b.string());
  REQUIRE(ra.code == 0);
  CHECK(ra.out == rb.out);
  CHECK(slurp(a / "metric_eval.csv") == slurp(b / "metric_eval.csv"));
  const Run rc = run("metric-eval --config " + config("translation_modeC.json") + " --seed 6 -o " + a.string());
  CHECK(json::parse(rc.out).at("config_hash") != json::parse(ra.out).at("config_hash"));
}
