#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ccm/equilibria.hpp"
#include "ccm/errors.hpp"
#include "ccm/experiment.hpp"
#include "ccm/solver.hpp"
#include "ccm/speed.hpp"
#include "oracles.hpp"

using namespace ccm;

namespace {

SimConfig small_config(const ModelParams& p, Scenario sc, double length = 60.0, double dx = 0.2,
                       double t_end = 10.0) {
  SimSettings s;
  s.length = length;
  s.dx = dx;
  s.t_end = t_end;
  return make_sim_config(p, sc, s);
}

double max_abs_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t i = 0; i < a.size(); ++i)
      d = std::max(d, std::abs(a.values[s][i] - b.values[s][i]));
  return d;
}

}  // namespace

TEST_CASE("initial condition places the bump on the invading species") {
  const ModelParams p = ModelParams::baseline(2.0 / 3, 2.0 / 3, 0.5);
  SimConfig cfg = small_config(p, Scenario::Invader);
  const Field f = initial_condition(cfg);
  const std::size_t mid = (cfg.grid.n - 1) / 2;
  CHECK(f.values[0][mid] == doctest::Approx(1.0));
  CHECK(f.values[0][0] == 0.0);
  CHECK(f.values[1][0] == 1.0);
  CHECK(f.values[2][0] == doctest::Approx(p.L));
  CHECK(f.values[1][mid] == 1.0);

  SimConfig res = small_config(p, Scenario::Resident);
  const Field r = initial_condition(res);
  CHECK(r.values[0][mid] == 1.0);
  CHECK(r.values[1][mid] == doctest::Approx(1.0));
  CHECK(r.values[1][0] == 0.0);
  CHECK(r.values[2][mid] == doctest::Approx(p.L + p.l));

  cfg.bump.width = 1.5 * cfg.grid.dx();
  CHECK_THROWS_AS(initial_condition(cfg), ConfigError);
}

TEST_CASE("an equilibrium field is a fixed point") {
  const ModelParams p = ModelParams::baseline(0.5, 2.0 / 3, 0.5);
  for (const Equilibrium& e : enumerate_equilibria(p)) {
    if (!e.admissible) continue;
    Field f(Grid{40.0, 201});
    for (std::size_t i = 0; i < f.size(); ++i) f.set(i, e.coords.values());
    const Field once = step(f, p, System::CCM, 0.01);
    CHECK(max_abs_diff(f, once) <= 1e-12);
  }
  CHECK(oracle::equilibrium_drift(p, 10.0) <= 1e-10);
}

TEST_CASE("pure diffusion of a Gaussian matches the heat kernel") {
  ModelParams p = ModelParams::baseline(2.0 / 3, 2.0 / 3, 0.0);
  p.D1 = 1.3;
  SimConfig cfg = small_config(p, Scenario::Invader, 80.0, 0.1, 1.0);
  cfg.reaction_enabled = false;
  cfg.bump.width = 2.0;
  cfg.bump.amplitude = 1.0;
  const Trajectory t = simulate(cfg);
  const Field& end = t.snapshots.back();
  const double s0 = cfg.bump.width;
  const double s2 = s0 * s0 + 2.0 * p.D1 * 1.0;
  const double amp = s0 / std::sqrt(s2);
  double err = 0.0;
  for (std::size_t i = 0; i < end.size(); ++i) {
    const double d = end.grid.x(i) - 0.5 * cfg.grid.length;
    err = std::max(err, std::abs(end.values[0][i] - amp * std::exp(-d * d / (2.0 * s2))));
  }
  CHECK(err / amp <= 1e-3);
  // Untouched species stay at the source values.
  CHECK(end.values[1][end.size() / 2] == 1.0);
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
  const ModelParams p = ModelParams::baseline(0.7, 0.4, 2.0);
  const Grid g{50.0, 501};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (System s : {System::CCM, System::InvaderG, System::ResidentH, System::ResidentH0}) {
    Field in(g, coordinates_of(s));
    for (auto& comp : in.values)
      for (double& v : comp) v = 0.8 * U(rng);
    RhsContext ctx;
    ctx.system = s;
    ctx.params = &p;
    ctx.diffusivity = diffusivities(s, p);
    ctx.inv_dx2 = 1.0 / (g.dx() * g.dx());
    Field a(g), b(g);
    const RhsStatus sa = rhs_serial(ctx, in.view(), a.span(), g.n);
    const RhsStatus sb = rhs_parallel(ctx, in.view(), b.span(), g.n);
    CHECK(sa.first_bad_node == sb.first_bad_node);
    CHECK(sa.max_rate == sb.max_rate);
    CHECK(a.values == b.values);
    CHECK(a.values[0][0] == 0.0);
  }

  SimConfig cfg = small_config(p, Scenario::Invader, 60.0, 0.2, 5.0);
  cfg.kernel = KernelMode::Serial;
  const Trajectory ts = simulate(cfg);
  cfg.kernel = KernelMode::Parallel;
  const Trajectory tp = simulate(cfg);
  REQUIRE(ts.snapshots.size() == tp.snapshots.size());
  for (std::size_t k = 0; k < ts.snapshots.size(); ++k)
    CHECK(ts.snapshots[k].values == tp.snapshots[k].values);
}

TEST_CASE("cooperative systems preserve the order of initial data") {
  const ModelParams p = ModelParams::baseline(0.6, 0.5, 1.0);
  CHECK(oracle::order_violation(System::InvaderG, p, 3, 5) <= 1e-12);
  CHECK(oracle::order_violation(System::ResidentH, p, 4, 5) <= 1e-12);
  CHECK(oracle::order_violation(System::ResidentH0, p, 5, 5) <= 1e-12);
}

TEST_CASE("mutualism never pushes the resident system above the comparison system") {
  for (double m : {0.0, 0.5, 3.0}) {
    const ModelParams p = ModelParams::baseline(0.5, 2.0 / 3, m);
    SimConfig cfg = small_config(p, Scenario::Resident, 60.0, 0.2, 10.0);
    const ComparisonResult r = comparison_run(cfg);
    CHECK(r.max_violation <= 1e-8);
    const auto& a = r.with_mutualism.snapshots;
    const auto& b = r.without_mutualism.snapshots;
    CHECK(a.front().values == b.front().values);
    if (m == 0.0) {
      for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].values == b[k].values);
    }
  }
  const ModelParams p = ModelParams::baseline(0.5, 2.0 / 3, 0.5);
  CHECK_THROWS_AS(comparison_run(small_config(p, Scenario::Invader)), ConfigError);
}

TEST_CASE("invader solutions stay inside the order interval up to the target") {
  for (double b : {0.4, 2.0 / 3, 1.5}) {
    for (double m : {0.0, 1.0}) {
      const ModelParams p = ModelParams::baseline(0.5, b, m);
      const InvasionClassification cls = classify_invasion(p, Scenario::Invader);
      REQUIRE(cls.target);
      const Vec3 beta = to_transformed(Scenario::Invader, cls.target->coords.values(), p);
      SimConfig cfg = small_config(p, Scenario::Invader, 60.0, 0.2, 15.0);
      cfg.system = System::InvaderG;
      cfg.bump.amplitude = beta[0];
      const Trajectory t = simulate(cfg);
      for (const Field& f : t.snapshots)
        for (std::size_t c = 0; c < 3; ++c)
          for (double v : f.values[c]) {
            CHECK(v >= -1e-8);
            CHECK(v <= beta[c] + 1e-8);
          }
    }
  }
}

TEST_CASE("front position converges under grid refinement") {
  const ModelParams p = ModelParams::baseline(2.0 / 3, 2.0 / 3, 0.0);
  const SpeciesLevels lv = scenario_levels(p, Scenario::Invader);
  double x[2] = {};
  const double dx[2] = {0.2, 0.1};
  for (int k = 0; k < 2; ++k) {
    SimSettings s;
    s.dx = dx[k];
    s.t_end = 60.0;
    s.snapshot_interval = 60.0;
    const Trajectory t = simulate(make_sim_config(p, Scenario::Invader, s));
    const Field& f = t.snapshots.back();
    x[k] = front_position(f.values[0], f.grid, lv[0]->level, lv[0]->band).value();
  }
  CHECK(std::abs(x[0] - x[1]) <= 2.0 * dx[0]);
}

TEST_CASE("snapshot schedule") {
  const ModelParams p = ModelParams::baseline(2.0 / 3, 2.0 / 3, 0.0);
  SimConfig cfg = small_config(p, Scenario::Invader);
  cfg.t_end = 0.0;
  const Trajectory t = simulate(cfg);
  CHECK(t.snapshots.size() == 1);
  CHECK(t.snapshots[0].t == 0.0);

  cfg.t_end = 2.5;
  cfg.snapshot_interval = 1.0;
  const std::vector<double> times = cfg.effective_snapshot_times();
  CHECK(times == std::vector<double>{0.0, 1.0, 2.0, 2.5});
  cfg.snapshot_times = {2.0, 0.5};
  CHECK(cfg.effective_snapshot_times() == std::vector<double>{0.0, 0.5, 2.0, 2.5});
}

TEST_CASE("config validation and stable time step") {
  const ModelParams p = ModelParams::baseline(2.0 / 3, 2.0 / 3, 0.0);
  SimConfig cfg = small_config(p, Scenario::Invader);
  CHECK(max_stable_dt(cfg.grid, {1.0, 2.0, 0.5}, 0.4) == doctest::Approx(0.4 * 0.04 / 2.0));
  SimConfig bad = cfg;
  bad.cfl = 0.6;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.t_end = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.grid.n = 2;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("blow-up is reported with time and node") {
  ModelParams p = ModelParams::baseline(2.0 / 3, 2.0 / 3, 0.0);
  p.alpha = 1e4;
  p.l = 0.0;
  SimConfig cfg = small_config(p, Scenario::Invader, 20.0, 0.1, 1.0);
  try {
    simulate(cfg);
    FAIL("expected StabilityError");
  } catch (const StabilityError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.node() > 0);
    CHECK(e.node() + 1 < cfg.grid.n);
  }
}

TEST_CASE("trajectory CSV round trip") {
  const ModelParams p = ModelParams::baseline(0.5, 2.0 / 3, 0.5);
  SimConfig cfg = small_config(p, Scenario::Resident, 20.0, 0.5, 2.0);
  cfg.system = System::ResidentH;
  const Trajectory t = simulate(cfg);
  std::stringstream ss;
  write_trajectory_csv(ss, t);
  const std::string text = ss.str();
  CHECK(text.rfind("#", 0) == 0);
  CHECK(text.find("t,x,p1,p2,u\n") != std::string::npos);
  const Trajectory back = read_trajectory_csv(ss);
  REQUIRE(back.snapshots.size() == t.snapshots.size());
  CHECK(back.config.grid == t.config.grid);
  for (std::size_t k = 0; k < t.snapshots.size(); ++k) {
    CHECK(back.snapshots[k].t == t.snapshots[k].t);
    CHECK(back.snapshots[k].coords == Coordinates::Original);
    for (std::size_t i = 0; i < t.snapshots[k].size(); ++i) {
      const Vec3 orig = convert(Coordinates::Resident, Coordinates::Original,
                                t.snapshots[k].at(i), p);
      for (std::size_t c = 0; c < 3; ++c)
        CHECK(back.snapshots[k].values[c][i] == doctest::Approx(orig[c]).epsilon(1e-15));
    }
  }
  std::istringstream junk("t,x,p1,p2,u\n0,0,abc,0,0\n");
  CHECK_THROWS_AS(read_trajectory_csv(junk), IoError);
}
