#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using flagflow::cli::run;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("flagflow_test_" + name);
}

}  // namespace

TEST_CASE("verify --lines passes on the model") {
  const auto r = call({"verify", "--lines"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("check,item,value,threshold,pass\n", 0) == 0);
  for (int j = 1; j <= 4; ++j) CHECK(r.out.find("lines,gamma" + std::to_string(j) + ",") != std::string::npos);
  CHECK(r.out.find(",false") == std::string::npos);
}

TEST_CASE("verify runs every check by default") {
  const auto r = call({"verify", "--format", "json", "--resolution", "100"});
  CHECK(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["pass"] == true);
  CHECK(doc["checks"].size() == 4 + 8 + 1 + 2);
}

TEST_CASE("infinity census") {
  const auto r = call({"infinity"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["schema_version"] == 1);
  REQUIRE(doc["equilibria"].size() == 10);
  int octant = 0;
  for (const auto& e : doc["equilibria"]) octant += e["first_octant"].get<bool>() ? 1 : 0;
  CHECK(octant == 4);
  CHECK(call({"infinity", "--format", "csv"}).out.rfind("chart,z1,z2,z3,", 0) == 0);
}

TEST_CASE("integrate reports finite-time blow-up with exit 2") {
  const auto r = call({"integrate", "--system", "poly", "--x0", "1,1,1", "--t-end", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("blow-up") != std::string::npos);
  CHECK(r.out.rfind("t,x1,x2,x3\n", 0) == 0);
}

TEST_CASE("integrate argument checks") {
  CHECK(call({"integrate", "--system", "ricci", "--x0", "-1,1,1"}).code == 1);
  CHECK(call({"integrate", "--system", "ricci", "--x0", "0,1,1"}).code == 1);
  CHECK(call({"integrate", "--system", "poly", "--x0", "-1,0,1", "--t-end", "0.01"}).code == 0);
  CHECK(call({"integrate", "--x0", "1,1"}).code == 1);
  CHECK(call({"integrate", "--x0", "1,x,1"}).code == 1);
  CHECK(call({"integrate"}).code == 1);
  CHECK(call({"integrate", "--system", "ricci", "--mode", "compactified", "--x0", "1,1,1"}).code == 1);
  CHECK(call({"integrate", "--system", "heat", "--x0", "1,1,1"}).code == 1);
  CHECK(call({"integrate", "--x0", "1,1,1", "--rel-tol", "-1"}).code == 1);
}

TEST_CASE("integrate in the compactified ball") {
  const auto r = call({"integrate", "--mode", "compactified", "--x0", "1.2,1.2,1.2", "--t-end", "200"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("t,x1,x2,x3,chart,z1,z2,z3\n", 0) == 0);
  const auto last = r.out.substr(r.out.rfind('\n', r.out.size() - 2) + 1);
  CHECK(std::stod(last.substr(last.find(',') + 1)) == doctest::Approx(0.5773503).epsilon(1e-6));
}

TEST_CASE("geometric flow collapses with exit 2") {
  const auto r = call({"integrate", "--system", "ricci", "--x0", "1,1,1", "--t-end", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("step_size_collapse") != std::string::npos);
}

TEST_CASE("ricci subcommand") {
  const auto r = call({"ricci", "--metric", "1,2,3"});
  REQUIRE(r.code == 0);
  const auto row = r.out.substr(r.out.find('\n') + 1);
  double r12 = 0, r13 = 0, r23 = 0;
  REQUIRE(std::sscanf(row.c_str(), "%*[^,],%*[^,],%*[^,],%lf,%lf,%lf", &r12, &r13, &r23) == 3);
  CHECK(std::abs(r12 - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(r13 - 1.0 / 6.0) < 1e-15);
  CHECK(std::abs(r23 - 2.0 / 9.0) < 1e-15);
  CHECK(call({"ricci", "--metric", "1,-2,3"}).code == 1);
}

TEST_CASE("unknown flags, commands and config keys exit 1") {
  CHECK(call({"integrate", "--x0", "1,1,1", "--bogus", "3"}).code == 1);
  CHECK(call({"frobnicate"}).code == 1);
  CHECK(call({}).code == 1);
  const auto cfg = temp_file("unknown.cfg");
  std::ofstream(cfg) << "# comment\nseed = 3\nfoo = 1\n";
  const auto r = call({"--config", cfg.string(), "verify", "--lines"});
  CHECK(r.code == 1);
  CHECK(r.err.find("unknown key 'foo'") != std::string::npos);
  std::ofstream(cfg) << "seed 3\n";
  CHECK(call({"--config", cfg.string(), "verify", "--lines"}).code == 1);
  CHECK(call({"--config", "/nonexistent/flagflow.cfg", "verify", "--lines"}).code == 1);
  std::filesystem::remove(cfg);
}

TEST_CASE("flags override config, config overrides the environment") {
  auto first_start = [](const Result& r) { return json::parse(r.out)["records"][0]["start"].dump(); };
  const auto cfg = temp_file("seed.cfg");
  std::ofstream(cfg) << "seed = 3   # trailing comment\nsamples = 1\nline = 2\n";
  const auto by_default = call({"basin", "--samples", "1"});
  const auto seed3 = call({"--seed", "3", "basin", "--samples", "1"});
  const auto seed11 = call({"--seed", "11", "basin", "--samples", "1"});
  REQUIRE(by_default.code == 0);
  CHECK(first_start(by_default) != first_start(seed3));

  ::setenv("FLAGFLOW_SEED", "11", 1);
  CHECK(first_start(call({"basin", "--samples", "1"})) == first_start(seed11));
  CHECK(first_start(call({"--config", cfg.string(), "basin"})) == first_start(seed3));
  CHECK(first_start(call({"--config", cfg.string(), "--seed", "11", "basin"})) == first_start(seed11));
  ::unsetenv("FLAGFLOW_SEED");
  std::filesystem::remove(cfg);
}

TEST_CASE("reports are byte-identical across runs and --out writes the file") {
  const auto a = call({"basin", "--line", "4", "--samples", "6", "--seed", "5"});
  const auto b = call({"basin", "--line", "4", "--samples", "6", "--seed", "5", "--threads", "1"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);

  const auto path = temp_file("out.json");
  const auto c = call({"--out", path.string(), "basin", "--line", "4", "--samples", "6", "--seed", "5"});
  CHECK(c.code == 0);
  CHECK(c.out.empty());
  std::ifstream in(path, std::ios::binary);
  std::stringstream content;
  content << in.rdbuf();
  CHECK(content.str() == a.out);
  std::filesystem::remove(path);
}

TEST_CASE("lyapunov table output") {
  const auto r = call({"lyapunov", "--t-max", "40"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("line,chart,lambda1,lambda2,lambda3,t_used,converged\n", 0) == 0);
  CHECK(call({"lyapunov", "--charts", "U1,V2"}).code == 1);
  // Too short to pass the convergence test.
  const auto short_run = call({"lyapunov", "--t-max", "15"});
  CHECK(short_run.code == 2);
  CHECK(short_run.err.find("did not converge") != std::string::npos);
}

TEST_CASE("limit subcommand") {
  const auto r = call({"limit", "--metric", "1.2,1.25,1.2"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["kind"] == "normal_einstein");
}

TEST_CASE("plot writes a static svg portrait") {
  const auto r = call({"plot", "--plot-samples", "1", "--t-end", "50"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("<svg", 0) == 0);
  CHECK(r.out.find("</svg>") != std::string::npos);
  CHECK(r.out.find("<polyline") != std::string::npos);
  std::size_t markers = 0;
  for (auto pos = r.out.find("r=\"6\""); pos != std::string::npos; pos = r.out.find("r=\"6\"", pos + 1)) ++markers;
  CHECK(markers == 10);
  CHECK(call({"plot", "--x0", "1,2,3;0.5,0.5,2", "--t-end", "50"}).code == 0);
  CHECK(call({"plot", "--x0", "1,2"}).code == 1);
}

TEST_CASE("help names the construct behind each command") {
  const auto top = call({"--help"});
  CHECK(top.code == 0);
  CHECK(top.out.find("SU(3)/T") != std::string::npos);
  const std::pair<const char*, const char*> expected[] = {
      {"ricci", "Ricci components"},      {"integrate", "Poincare ball"},
      {"infinity", "Singularities at infinity"}, {"lyapunov", "Lyapunov exponents"},
      {"verify", "invariant Einstein lines"},   {"basin", "Cylinder basin"},
      {"plot", "phase portrait"},              {"limit", "Limit metric"}};
  for (const auto& [cmd, phrase] : expected) {
    const auto r = call({cmd, "--help"});
    CHECK(r.code == 0);
    CHECK_MESSAGE(r.out.find(phrase) != std::string::npos, cmd);
  }
}
