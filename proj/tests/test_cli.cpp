#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "qicsim/cli.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = qicsim::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(QICSIM_TEST_TMP) / "cli" / name;
  fs::create_directories(p.parent_path());
  fs::remove(p);
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

std::vector<double> fields(const std::string& row) {
  std::vector<double> out;
  std::stringstream ss(row);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(std::stod(f));
  return out;
}

bool matches_table(const json& report, const std::array<double, 7>& ref) {
  for (std::size_t i = 0; i < 7; ++i) {
    const double c = report["capacities"][i]["capacity"].get<double>();
    if (ref[i] == 0.0 ? c > 1e-8 : std::abs(c - ref[i]) > 5e-3 * ref[i]) return false;
  }
  return true;
}

const std::array<double, 7> table_d2{0.00167331, 0.00872886, 0.0, 0.0102214, 0.0140338, 0.00167926, 0.0154962};

}  // namespace

TEST_CASE("capacity report for the d=3 preset") {
  const auto r = run({"capacity", "--dim", "3", "--preset", "table1"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["dim"] == 3);
  CHECK(j["log_base"] == "2");
  CHECK(j["scenario"]["bobs"][1]["geometry"] == "on_cone");
  CHECK(j["scenario"]["delta_t"] == 2.0);
  REQUIRE(j["capacities"].size() == 7);
  CHECK(j["capacities"][6]["subset"] == "B1B2B3");
  CHECK(j["capacities"][1]["quadrature_error_bound"].get<double>() <= 1e-9);
  CHECK(matches_table(j, {0.0, 3.39083e-5, 0.0, 3.45126e-5, 3.73605e-5, 0.0, 3.79689e-5}));
}

TEST_CASE("only base 2 reproduces the d=2 row") {
  const auto two = run({"capacity", "--dim", "2", "--preset", "table1", "--log-base", "2"});
  const auto e = run({"capacity", "--dim", "2", "--preset", "table1", "--log-base", "e"});
  REQUIRE(two.code == 0);
  REQUIRE(e.code == 0);
  CHECK(matches_table(json::parse(two.out), table_d2));
  CHECK_FALSE(matches_table(json::parse(e.out), table_d2));
}

TEST_CASE("an unknown preset fails without output") {
  const auto path = scratch("bad.json");
  const auto r = run({"capacity", "--preset", "table9", "--out", path.string()});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(r.err.find("table9") != std::string::npos);
  CHECK_FALSE(fs::exists(path));
}

TEST_CASE("evolve shows the light-cone ridge in the F2 column") {
  const auto r = run({"evolve", "--dim", "3", "--preset", "single", "--t", "4", "--grid", "0:6:0.05,0,0"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 3 + 121);
  CHECK(ls[0].rfind("# ", 0) == 0);
  CHECK(ls[1].find("sigma^2 F^(1)") != std::string::npos);
  CHECK(ls[2] == "# x,y,z,F1_1,F2_1,G1_1,G2_1");
  double best = 0, at = -1;
  for (std::size_t i = 3; i < ls.size(); ++i) {
    const auto f = fields(ls[i]);
    REQUIRE(f.size() == 7);
    if (std::abs(f[4]) > best) {
      best = std::abs(f[4]);
      at = f[0];
    }
  }
  CHECK(std::abs(at - 4.0) <= 0.4);
}

TEST_CASE("d=2 shockwave writes twelve weighting columns") {
  const auto r = run({"evolve", "--dim", "2", "--preset", "shockwave", "--t", "8", "--grid", "0:16:2,-2:2:2"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls[2] == "# x,y,F1_1,F2_1,G1_1,G2_1,F1_2,F2_2,G1_2,G2_2,F1_3,F2_3,G1_3,G2_3");
  REQUIRE(ls.size() == 3 + 9 * 3);
  for (std::size_t i = 3; i < ls.size(); ++i) {
    const auto f = fields(ls[i]);
    CHECK(f.size() == 14);
    for (double v : f) CHECK(std::isfinite(v));
  }
  const auto alias = run({"shockwave", "--dim", "2", "--grid", "0:16:2,-2:2:2"});
  CHECK(alias.code == 0);
  CHECK(alias.out == r.out);
  CHECK(run({"shockwave", "--preset", "single"}).code == 2);
}

TEST_CASE("evolve rejects empty and malformed grids") {
  CHECK(run({"evolve", "--grid", "1:0:0.1,0:0:0.1,0"}).code == 2);
  CHECK(run({"evolve", "--grid", "0:1:0,0,0"}).code == 2);
  CHECK(run({"evolve", "--grid", "0:1:abc,0,0"}).code == 2);
  CHECK(run({"evolve", "--dim", "2", "--grid", "0:1:0.5,0,0"}).code == 2);
}

TEST_CASE("evolve output is identical for any thread count") {
  const auto a = scratch("t1.csv"), b = scratch("t4.csv");
  const std::vector<std::string> base{"evolve", "--dim", "2", "--preset", "shockwave", "--grid", "4:14:0.5,-3:3:0.5"};
  auto args = base;
  args.insert(args.end(), {"--threads", "1", "--out", a.string()});
  REQUIRE(run(args).code == 0);
  args = base;
  args.insert(args.end(), {"--threads", "4", "--out", b.string()});
  REQUIRE(run(args).code == 0);
  CHECK(read(a) == read(b));
  CHECK(read(a).size() > 1000);
}

TEST_CASE("several snapshot times go to separate files") {
  const auto out = scratch("single.csv");
  const auto r = run({"evolve", "--dim", "3", "--grid", "0:1:0.5,0,0", "--out", out.string()});
  REQUIRE(r.code == 0);
  for (const char* t : {"0", "2", "4"}) {
    const auto p = out.parent_path() / (std::string("single_t") + t + ".csv");
    CHECK(fs::exists(p));
    CHECK(read(p).find(std::string("t=") + t + " ") != std::string::npos);
  }
}

TEST_CASE("config files: schema, inline scenarios and flag precedence") {
  const auto cfg = scratch("run.json");
  {
    std::ofstream f(cfg);
    f << R"({"dim": 2, "times": [1.5],
             "grid": [{"min": 0, "max": 2, "step": 1}, 0],
             "scenario": {"generators": [
               {"kind": "gaussian", "sigma": 0.3, "center": [0.5, 0]},
               {"kind": "gaussian", "sigma": 0.3, "center": [1.0, 0], "time": 0.5}]}})";
  }
  const auto r = run({"evolve", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  CHECK(ls[0].find("dim=2") != std::string::npos);
  CHECK(ls[0].find("t=1.5") != std::string::npos);
  CHECK(ls[0].find("modes=2") != std::string::npos);
  CHECK(ls.size() == 3 + 3);

  const auto over = run({"evolve", "--config", cfg.string(), "--t", "2.5"});
  REQUIRE(over.code == 0);
  CHECK(lines(over.out)[0].find("t=2.5") != std::string::npos);

  // A --preset flag replaces the inline scenario.
  const auto preset = run({"evolve", "--config", cfg.string(), "--preset", "single", "--t", "0"});
  REQUIRE(preset.code == 0);
  CHECK(lines(preset.out)[0].find("scenario=single") != std::string::npos);

  const auto bad = scratch("bad.json");
  {
    std::ofstream f(bad);
    f << R"({"dim": 3, "sigma": 0.2})";
  }
  const auto rb = run({"capacity", "--config", bad.string()});
  CHECK(rb.code == 2);
  CHECK(rb.err.find("unknown key 'sigma'") != std::string::npos);

  const auto nested = scratch("nested.json");
  {
    std::ofstream f(nested);
    f << R"({"scenario": {"generators": [{"kind": "gaussian", "sigma": 0.2, "radius": 1}]}})";
  }
  CHECK(run({"evolve", "--config", nested.string()}).code == 2);
  CHECK(run({"evolve", "--config", (cfg.parent_path() / "missing.json").string()}).code == 2);
}

TEST_CASE("capacity from an inline channel definition") {
  const auto cfg = scratch("channel.json");
  {
    std::ofstream f(cfg);
    f << R"({"dim": 3, "log_base": "e", "scenario": {
              "alice": {"kind": "hard_shell", "r_outer": 1},
              "bobs": [
                {"kind": "hard_shell", "r_outer": 0.9, "time": 2, "coupling": 0.2},
                {"kind": "hard_shell", "r_inner": 1.1, "r_outer": 2.9, "time": 2, "coupling": 0.2},
                {"kind": "hard_shell", "r_inner": 3.1, "r_outer": 4, "time": 2, "coupling": 0.2}]}})";
  }
  const auto r = run({"capacity", "--config", cfg.string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["log_base"] == "e");
  CHECK(j["capacities"][1]["capacity"].get<double>() ==
        doctest::Approx(3.39083e-5 * std::log(2.0)).epsilon(5e-3));
  const auto flag = run({"capacity", "--config", cfg.string(), "--log-base", "2"});
  CHECK(json::parse(flag.out)["log_base"] == "2");
}

TEST_CASE("validate reports every check and filters by group") {
  const auto all = run({"validate"});
  CHECK(all.code == 0);
  CHECK(all.out.find("FAIL") == std::string::npos);
  CHECK(all.out.find("0 failed") != std::string::npos);

  const auto only = run({"validate", "--only", "huygens"});
  CHECK(only.code == 0);
  const auto ls = lines(only.out);
  REQUIRE(ls.size() == 3);
  CHECK(ls[0].rfind("PASS huygens d3/C_B1", 0) == 0);
  CHECK(ls[1].rfind("PASS huygens d2/C_B1", 0) == 0);

  CHECK(run({"validate", "--only", "nonsense"}).code == 2);
}

TEST_CASE("a loose tolerance keeps normalization but breaks Table I") {
  const auto r = run({"validate", "--tol", "0.1", "--only", "normalization,table1"});
  CHECK(r.code == 1);
  for (const auto& l : lines(r.out)) {
    if (l.find(" normalization ") != std::string::npos) CHECK(l.rfind("PASS", 0) == 0);
  }
  CHECK(r.out.find("FAIL table1") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"capacity", "--log-base", "10"}).code == 2);
  CHECK(run({"capacity", "--dim", "4"}).code == 2);
  CHECK(run({"capacity", "--tol", "-1"}).code == 2);
  CHECK(run({"capacity", "--preset", "single"}).code == 2);
  const auto help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("capacity") != std::string::npos);
}
