#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ccm/equilibria.hpp"
#include "ccm/errors.hpp"
#include "ccm/experiment.hpp"
#include "ccm/linear_analysis.hpp"

using namespace ccm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ccm_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream ss(csv);
  std::string line;
  while (std::getline(ss, line)) out.push_back(split(line));
  return out;
}

ExperimentSpec tiny_spec() {
  std::istringstream cfg(R"(# small sweep
scenario = invader
a = 2/3
m = 0
sweep.parameter = b
sweep.values = 0.4, 2/3
length = 60
dx = 0.2
t_end = 10
)");
  return spec_from_key_values(parse_key_values(cfg), "tiny");
}

double invader_speed(const PointResult& r, Scenario sc) {
  REQUIRE(r.status == "ok");
  return r.speeds->species[static_cast<std::size_t>(roles(sc).invader)].speed;
}

}  // namespace

TEST_CASE("key-value parsing") {
  std::istringstream in("# comment\n a = 1 \n\nname=x # trailing\nb = 2/3\n");
  const auto kv = parse_key_values(in);
  CHECK(kv.size() == 3);
  CHECK(kv.at("a") == "1");
  CHECK(kv.at("name") == "x");
  CHECK(parse_number("b", kv.at("b")) == doctest::Approx(2.0 / 3));
  CHECK(parse_number("x", "1024/3") == doctest::Approx(1024.0 / 3));
  CHECK(parse_number("x", "1e-2") == 0.01);
  CHECK_THROWS_AS(parse_number("x", "abc"), ConfigError);
  CHECK_THROWS_AS(parse_number("x", "1/0"), ConfigError);

  std::istringstream bad("a 1\n");
  CHECK_THROWS_WITH_AS(parse_key_values(bad), doctest::Contains("line 1"), ConfigError);
  CHECK_THROWS_AS(parse_key_values_file("/nonexistent/ccm.cfg"), ConfigError);
}

TEST_CASE("experiment specs from key-value maps") {
  const ExperimentSpec s = tiny_spec();
  CHECK(s.name == "tiny");
  CHECK(s.sweep.parameter == SweepParameter::B);
  CHECK(s.sweep.values.size() == 2);
  CHECK(s.params.a == doctest::Approx(2.0 / 3));
  CHECK(s.params.l == doctest::Approx(9.0 / 20));
  CHECK(s.params.L == doctest::Approx(1.0 / 3));
  CHECK(s.sim.dx == 0.2);

  std::map<std::string, std::string> kv{{"preset", "figure4a"}, {"dx", "0.5"}};
  const ExperimentSpec p = spec_from_key_values(kv, "ignored");
  CHECK(p.name == "figure4a");
  CHECK(p.scenario == Scenario::Resident);
  CHECK(p.sim.dx == 0.5);

  CHECK_THROWS_AS(spec_from_key_values({{"colour", "red"}}, "x"), ConfigError);
  CHECK_THROWS_AS(spec_from_key_values({{"sweep.parameter", "q"}}, "x"), ConfigError);
  CHECK_THROWS_AS(spec_from_key_values({{"sweep.grid", "cubic"}}, "x"), ConfigError);
  const ExperimentSpec lin = spec_from_key_values(
      {{"sweep.grid", "linear"}, {"sweep.start", "0"}, {"sweep.stop", "1"}, {"sweep.count", "5"}},
      "x");
  CHECK(lin.sweep.values == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
}

TEST_CASE("log grids") {
  const auto g = log_grid(0.01, 100.0);
  CHECK(g.size() == 37);
  CHECK(g.front() == 0.01);
  CHECK(g.back() == 100.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(g[9] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(log_grid(0.1, 1024.0 / 3).back() == 1024.0 / 3);
  CHECK_THROWS_AS(log_grid(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(log_grid(2.0, 1.0), ConfigError);
}

TEST_CASE("presets") {
  CHECK(preset_names().size() == 5);
  for (const std::string& n : preset_names()) {
    const ExperimentSpec s = preset(n);
    CHECK_NOTHROW(s.validate());
    CHECK(s.name == n);
    CHECK(s.params.alpha == 1.0);
    CHECK(s.params.l == doctest::Approx(0.45));
    CHECK(s.params.L == doctest::Approx(1.0 / 3));
    CHECK(s.sim.length == 400.0);
    CHECK(s.sim.dx == 0.1);
  }
  const ExperimentSpec f2 = preset("figure2");
  CHECK(f2.scenario == Scenario::Invader);
  CHECK(f2.sweep.parameter == SweepParameter::B);
  CHECK(f2.params.m == 0.0);
  const ExperimentSpec f4b = preset("figure4b");
  CHECK(f4b.scenario == Scenario::Resident);
  CHECK(f4b.sweep.parameter == SweepParameter::M);
  CHECK(f4b.params.a == doctest::Approx(1024.0 / 3));
  CHECK(f4b.params.b == doctest::Approx(2.0 / 3));
  CHECK_THROWS_AS(preset("figure9"), ConfigError);
}

TEST_CASE("an empty sweep is rejected before anything is written") {
  ExperimentSpec s = tiny_spec();
  s.sweep.values.clear();
  const fs::path out = scratch("empty");
  CHECK_THROWS_AS(run_experiment(s, out), ConfigError);
  CHECK_FALSE(fs::exists(out));

  s.sweep.values = {0.5, 0.4};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.sweep.values = {-1.0};
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("summary output is deterministic and complete") {
  ExperimentSpec s = tiny_spec();
  s.save_trajectories = true;
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const ExperimentResult ra = run_experiment(s, a);
  const ExperimentResult rb = run_experiment(s, b);
  CHECK_FALSE(ra.any_failed());
  CHECK(slurp(a / "summary.csv") == slurp(b / "summary.csv"));
  CHECK(fs::exists(a / "trajectory_0.csv"));
  CHECK(fs::exists(a / "trajectory_1.csv"));
  const std::string meta = slurp(a / "meta.txt");
  CHECK(meta.find("tiny") != std::string::npos);
  CHECK(meta.find("wall_seconds") != std::string::npos);
  CHECK(meta.find("speed_bound_only") != std::string::npos);

  const auto table = rows(slurp(a / "summary.csv"));
  REQUIRE(table.size() == 3);
  CHECK(table[0] == summary_columns());
  for (std::size_t r = 1; r < table.size(); ++r) CHECK(table[r].size() == table[0].size());
  const auto col = [&](const std::string& name) {
    const auto it = std::find(table[0].begin(), table[0].end(), name);
    REQUIRE(it != table[0].end());
    return static_cast<std::size_t>(it - table[0].begin());
  };
  CHECK(table[1][col("status")] == "ok");
  CHECK(table[1][col("sweep_parameter")] == "b");
  CHECK(std::stod(table[1][col("b")]) == 0.4);
  CHECK(std::stod(table[2][col("b")]) == doctest::Approx(2.0 / 3));
  CHECK(std::stod(table[1][col("l")]) == 0.45);
  CHECK(std::stod(table[1][col("dx")]) == 0.2);
  CHECK(table[1][col("target")] == "E7plus");
  CHECK(std::stod(table[2][col("c1")]) == doctest::Approx(2.0 / std::sqrt(3.0)));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("failing and non-invadable points are recorded in their rows") {
  ExperimentSpec s = tiny_spec();
  s.sim.length = 40.0;
  s.sweep.values = {0.5, 1e4};
  const ExperimentResult r = run_experiment(s, std::nullopt);
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].status == "ok");
  CHECK(r.points[1].status == "failed");
  // Blow-up surfaces either as growth past the bound or as a reaction
  // denominator crossing zero.
  const std::string& msg = r.points[1].message;
  CHECK((msg.rfind("StabilityError:", 0) == 0 || msg.rfind("DomainError:", 0) == 0));
  CHECK(r.any_failed());

  ExperimentSpec n = tiny_spec();
  n.sweep.parameter = SweepParameter::A;
  n.sweep.values = {1.0, 2.0};
  const ExperimentResult rn = run_experiment(n, std::nullopt);
  CHECK(rn.points[0].status == "not_invadable");
  CHECK(rn.points[1].status == "not_invadable");
  CHECK_FALSE(rn.any_failed());
}

TEST_CASE("analysis report") {
  const ModelParams base = ModelParams::baseline(2.0 / 3, 2.0 / 3, 0.0);
  std::ostringstream text;
  write_analysis(text, base, Scenario::Invader, false);
  CHECK(text.str().find("target E7plus") != std::string::npos);
  CHECK(text.str().find("c1 = 1.154700538") != std::string::npos);
  CHECK(text.str().find("linearly determinate") != std::string::npos);

  std::ostringstream csv;
  write_analysis(csv, base, Scenario::Invader, true);
  CHECK(csv.str().rfind("key,value\n", 0) == 0);
  CHECK(csv.str().find("verdict.linear_determinate,true") != std::string::npos);
  CHECK(csv.str().find("condition.ineq18.pass,true") != std::string::npos);

  std::ostringstream edge;
  write_analysis(edge, ModelParams::baseline(2.0 / 3, 1.0, 0.0), Scenario::Invader, false);
  CHECK(edge.str().find("coincides with E6") != std::string::npos);

  ModelParams ni = ModelParams::baseline(4.0 / 3, 2.0 / 3, 1.0);
  std::ostringstream none;
  write_analysis(none, ni, Scenario::Invader, false);
  CHECK(none.str().find("NotInvadable: gamma1(0) = 0") != std::string::npos);
}

TEST_CASE("reinvasion gates and targets") {
  const ModelParams p = ModelParams::baseline(1.5, 2.0 / 3, 1.0);
  CHECK_THROWS_AS(run_reinvasion(p, p.L), ConfigError);
  CHECK_THROWS_AS(run_reinvasion(ModelParams::baseline(1.2, 2.0 / 3, 1.0), 1.0), ConfigError);
  CHECK_THROWS_AS(run_reinvasion(ModelParams::baseline(1.5, 1.5, 1.0), 1.0), ConfigError);

  const InvasionClassification c1 = classify_invasion(p, Scenario::Resident);
  REQUIRE(c1.target);
  CHECK(c1.target->label == EquilibriumLabel::E4);
  ModelParams q = p;
  q.L = 1.0;
  const InvasionClassification c2 = classify_invasion(q, Scenario::Invader);
  REQUIRE(c2.target);
  CHECK(c2.target->label == EquilibriumLabel::E7Plus);
  CHECK(c2.source.label == EquilibriumLabel::E4);
}

TEST_CASE("central distance") {
  const ModelParams p = ModelParams::baseline(0.5, 0.5, 1.0);
  Field f(Grid{40.0, 41});
  for (std::size_t i = 0; i < f.size(); ++i) f.set(i, {0.0, 1.0, p.L});
  f.values[0][5] = 0.7;  // outside the central half
  CHECK(central_distance(f, {0.0, 1.0, p.L}, p) == 0.0);
  f.values[1][20] = 0.9;
  CHECK(central_distance(f, {0.0, 1.0, p.L}, p) == doctest::Approx(0.1));
}

TEST_CASE("figure2 points at small and large b") {
  ExperimentSpec s = preset("figure2");
  const PointResult small = run_point(s, 0, 0.1);
  const double c_small = small.linear->c;
  CHECK(std::abs(invader_speed(small, Scenario::Invader) - c_small) <= 0.05 * c_small);
  const PointResult large = run_point(s, 1, 1024.0 / 3);
  const double c_large = large.linear->c;
  CHECK(invader_speed(large, Scenario::Invader) >= 0.95 * c_large);
  CHECK(large.speeds->species[1].speed >= 0.95 * c_large);
}

TEST_CASE("figure3a speed does not decrease with m") {
  ExperimentSpec s = preset("figure3a");
  double prev = 0.0;
  for (double m : {0.01, 1.0, 10.0}) {
    const PointResult r = run_point(s, 0, m);
    const double v = invader_speed(r, Scenario::Invader);
    CHECK(v >= prev - 0.01 * v);
    CHECK(std::abs(v - r.linear->c) <= 0.05 * r.linear->c);
    prev = v;
  }
}

TEST_CASE("figure4b resident and mutualist fronts move together") {
  ExperimentSpec s = preset("figure4b");
  for (double m : {0.1, 10.0}) {
    const PointResult r = run_point(s, 0, m);
    REQUIRE(r.status == "ok");
    const Roles ro = roles(Scenario::Resident);
    const auto& sp = r.speeds->species;
    const double vi = sp[static_cast<std::size_t>(ro.invader)].speed;
    const double vr = sp[static_cast<std::size_t>(ro.resident)].speed;
    const double vm = sp[static_cast<std::size_t>(ro.mutualist)].speed;
    CHECK(std::abs(vr - vm) <= 0.05 * vr);
    const double c1 = r.linear->c;
    for (double v : {vi, vr, vm}) CHECK(v >= 0.95 * c1);
  }
}
