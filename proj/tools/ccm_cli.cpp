// ccm: analysis, simulation and parameter sweeps for the diffusive
// competitor-competitor-mutualist system.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "ccm/csv.hpp"
#include "ccm/errors.hpp"
#include "ccm/experiment.hpp"
#include "ccm/sampling.hpp"
#include "ccm/version.hpp"

namespace fs = std::filesystem;
using namespace ccm;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kIo = 3 };

struct ParamArgs {
  ModelParams p = ModelParams::baseline(2.0 / 3.0, 2.0 / 3.0, 0.0);
  std::string scenario = "invader";
  std::optional<std::string> config;

  void add(CLI::App* app) {
    app->add_option("--alpha", p.alpha, "growth rate of p1");
    app->add_option("--beta", p.beta, "growth rate of p2");
    app->add_option("--gamma", p.gamma, "growth rate of u");
    app->add_option("-a", p.a, "competition of p2 on p1");
    app->add_option("-b", p.b, "competition of p1 on p2");
    app->add_option("-m", p.m, "mutualist relief of competition on p1");
    app->add_option("-l", p.l, "carrying-capacity gain of u per unit p1");
    app->add_option("-L", p.L, "self carrying capacity of u");
    app->add_option("--D1", p.D1, "diffusivity of p1");
    app->add_option("--D2", p.D2, "diffusivity of p2");
    app->add_option("--D3", p.D3, "diffusivity of u");
    app->add_option("--params", config, "key = value file with parameter overrides");
    app->add_option("--scenario", scenario, "invader | resident")
        ->check(CLI::IsMember({"invader", "resident"}));
  }

  // File values apply first so explicit flags win.
  ModelParams resolve(const CLI::App* app,
                      ModelParams out = ModelParams::baseline(2.0 / 3.0, 2.0 / 3.0, 0.0)) const {
    if (config) apply_param_keys(parse_key_values_file(*config), out);
    const std::pair<const char*, double ModelParams::*> flags[] = {
        {"--alpha", &ModelParams::alpha}, {"--beta", &ModelParams::beta},
        {"--gamma", &ModelParams::gamma}, {"-a", &ModelParams::a},
        {"-b", &ModelParams::b},          {"-m", &ModelParams::m},
        {"-l", &ModelParams::l},          {"-L", &ModelParams::L},
        {"--D1", &ModelParams::D1},       {"--D2", &ModelParams::D2},
        {"--D3", &ModelParams::D3}};
    for (const auto& [flag, member] : flags) {
      if (app->count(flag) > 0) out.*member = p.*member;
    }
    out.validate();
    return out;
  }
};

struct SimArgs {
  SimSettings s;

  void add(CLI::App* app) {
    app->add_option("--dx", s.dx, "grid spacing")->check(CLI::PositiveNumber);
    app->add_option("--length", s.length, "domain length")->check(CLI::PositiveNumber);
    app->add_option("--t-end", s.t_end, "final time")->check(CLI::PositiveNumber);
    app->add_option("--snapshot-interval", s.snapshot_interval, "time between snapshots")
        ->check(CLI::PositiveNumber);
    app->add_option("--cfl", s.cfl, "dt = cfl dx^2 / max D")->check(CLI::PositiveNumber);
    app->add_option("--bump-width", s.bump.width, "standard deviation of the initial bump");
    app->add_option("--bump-amplitude", s.bump.amplitude, "peak of the initial bump");
  }
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  return f;
}

void write_meta(const fs::path& dir, const std::string& what, const SimConfig& cfg,
                const std::string& columns) {
  std::ofstream meta = open_out(dir / "meta.txt");
  meta << what << '\n' << "tool ccm " << kVersion << '\n';
  for (const std::string& line : describe_config(cfg)) meta << line << '\n';
  meta << '\n' << columns;
}

void print_speeds(std::ostream& os, const SpeedReport& r) {
  os << std::setprecision(8);
  os << "speed window [" << r.t1 << ", " << r.t2 << "]\n";
  for (const SpeciesSpeed& s : r.species) {
    os << "  " << std::left << std::setw(3) << species_name(r.coords, s.species) << std::right;
    if (!s.measured) {
      os << " unmeasured\n";
      continue;
    }
    os << " speed=" << s.speed << " r2=" << s.r_squared << " level=" << s.level
       << " samples=" << s.n_samples << '\n';
  }
  os << "  slowest=" << r.slowest << " fastest=" << r.fastest << '\n';
  for (const auto& w : r.warnings) os << "  warning: " << w << '\n';
}

int report(const std::exception& e) {
  std::cerr << "ccm: " << e.what() << '\n';
  if (dynamic_cast<const IoError*>(&e)) return kIo;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const NotInvadable*>(&e)) {
    return kConfig;
  }
  if (dynamic_cast<const Error*>(&e)) return kNumerical;
  return kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invasion waves in the diffusive competitor-competitor-mutualist system"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "equilibria, linear speed and determinacy");
  ParamArgs an_params;
  an_params.add(analyze);
  bool an_csv = false;
  analyze->add_flag("--csv", an_csv, "key,value output");

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "integrate one invasion and export snapshots");
  ParamArgs sim_params;
  sim_params.add(simulate_cmd);
  SimArgs sim_args;
  sim_args.add(simulate_cmd);
  std::string sim_system = "ccm";
  simulate_cmd->add_option("--system", sim_system, "ccm | invader_g | resident_h | resident_h0");
  std::optional<std::string> sim_out;
  simulate_cmd->add_option("--out", sim_out, "directory for trajectory.csv and meta.txt");

  // speed
  auto* speed_cmd = app.add_subcommand("speed", "measure front speeds");
  ParamArgs sp_params;
  sp_params.add(speed_cmd);
  SimArgs sp_args;
  sp_args.add(speed_cmd);
  std::optional<std::string> sp_from;
  speed_cmd->add_option("--from", sp_from, "trajectory CSV to analyse instead of simulating");
  std::optional<std::string> sp_out;
  speed_cmd->add_option("--out", sp_out, "directory for speeds.csv and meta.txt");
  bool sp_csv = false;
  speed_cmd->add_flag("--csv", sp_csv, "CSV to stdout");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "run a preset or a key = value sweep file");
  std::string exp_what;
  exp_cmd->add_option("spec", exp_what, "figure2 | figure3a | figure3b | figure4a | figure4b | FILE")
      ->required();
  std::optional<std::string> exp_out;
  exp_cmd->add_option("--out", exp_out, "output directory (default results/<name>)");
  bool exp_save = false;
  exp_cmd->add_flag("--save-trajectories", exp_save, "write trajectory_<i>.csv per point");
  std::optional<double> exp_dx, exp_t_end;
  exp_cmd->add_option("--dx", exp_dx, "grid spacing override")->check(CLI::PositiveNumber);
  exp_cmd->add_option("--t-end", exp_t_end, "final time override")->check(CLI::PositiveNumber);

  // reinvasion
  auto* re_cmd = app.add_subcommand("reinvasion", "extinction by the invader, then reinvasion after raising L");
  ParamArgs re_params;
  re_params.add(re_cmd);
  double L_prime = 1.0;
  re_cmd->add_option("--L-prime", L_prime, "restored self carrying capacity of u");
  SimArgs re_args;
  re_args.s = reinvasion_settings();
  re_args.add(re_cmd);
  std::optional<std::string> re_out;
  re_cmd->add_option("--out", re_out, "directory for reinvasion.csv and trajectories");
  bool re_csv = false;
  re_cmd->add_flag("--csv", re_csv, "CSV to stdout");

  // check
  auto* check_cmd = app.add_subcommand("check", "randomized residual and speed checks");
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  check_cmd->add_option("--seed", seed, "random seed");
  check_cmd->add_option("--samples", samples, "number of parameter sets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*analyze) {
      const ModelParams p = an_params.resolve(analyze);
      write_analysis(std::cout, p, parse_scenario(an_params.scenario), an_csv);
      return kOk;
    }

    if (*simulate_cmd) {
      const ModelParams p = sim_params.resolve(simulate_cmd);
      SimConfig cfg = make_sim_config(p, parse_scenario(sim_params.scenario), sim_args.s);
      cfg.system = parse_system(sim_system);
      const Trajectory traj = simulate(cfg);
      if (sim_out) {
        const fs::path dir(*sim_out);
        ensure_dir(dir);
        std::ofstream f = open_out(dir / "trajectory.csv");
        write_trajectory_csv(f, traj);
        write_meta(dir, "simulate", cfg,
                   "trajectory.csv columns: t,x,p1,p2,u (original coordinates, one row per node "
                   "per snapshot)\n");
        const Diagnostics& d = traj.diagnostics;
        std::cout << "snapshots=" << traj.snapshots.size() << " steps=" << d.steps
                  << " dt=" << fmt17(d.dt) << " clamp_count=" << d.clamp_count << '\n';
      } else {
        write_trajectory_csv(std::cout, traj);
      }
      return kOk;
    }

    if (*speed_cmd) {
      const ModelParams p = sp_params.resolve(speed_cmd);
      const Scenario sc = parse_scenario(sp_params.scenario);
      Trajectory traj;
      SimConfig cfg = make_sim_config(p, sc, sp_args.s);
      if (sp_from) {
        std::ifstream in(*sp_from);
        if (!in) throw IoError("cannot open " + *sp_from);
        traj = read_trajectory_csv(in);
        cfg.grid = traj.config.grid;
        cfg.t_end = traj.config.t_end;
      } else {
        traj = simulate(cfg);
      }
      const SpeedReport r = estimate_speeds(traj, scenario_levels(p, sc), sp_args.s.window);
      if (sp_out) {
        const fs::path dir(*sp_out);
        ensure_dir(dir);
        std::ofstream f = open_out(dir / "speeds.csv");
        write_speed_csv(f, r);
        write_meta(dir, "speed", cfg,
                   "speeds.csv columns: species,speed,intercept,r_squared,n_samples,level,t1,t2\n"
                   "  speed is the right-front propagation speed from a least-squares fit\n");
      }
      if (sp_csv) {
        write_speed_csv(std::cout, r);
      } else {
        const SpeedResult c1 = linear_speed(sc, p);
        std::cout << "c1=" << fmt17(c1.c) << " mu_bar=" << fmt17(c1.mu_bar) << '\n';
        print_speeds(std::cout, r);
      }
      return kOk;
    }

    if (*exp_cmd) {
      ExperimentSpec spec;
      const auto names = preset_names();
      if (std::find(names.begin(), names.end(), exp_what) != names.end()) {
        spec = preset(exp_what);
      } else {
        const fs::path file(exp_what);
        spec = spec_from_key_values(parse_key_values_file(file), file.stem().string());
      }
      if (exp_dx) spec.sim.dx = *exp_dx;
      if (exp_t_end) spec.sim.t_end = *exp_t_end;
      if (exp_save) spec.save_trajectories = true;
      const fs::path dir = exp_out ? fs::path(*exp_out) : fs::path("results") / spec.name;
      const ExperimentResult res = run_experiment(spec, dir);
      const Roles role = roles(spec.scenario);
      std::cout << spec.name << ": " << res.points.size() << " points, wall "
                << std::setprecision(4) << res.wall_seconds << " s, output " << dir.string()
                << '\n';
      std::cout << std::setprecision(6);
      for (const PointResult& pt : res.points) {
        std::cout << "  " << std::setw(3) << pt.index << ' ' << to_string(spec.sweep.parameter)
                  << '=' << std::setw(10) << pt.sweep_value << ' ' << std::setw(13) << pt.status;
        if (pt.linear) std::cout << " c1=" << std::setw(9) << pt.linear->c;
        if (pt.speeds) {
          for (int s : {role.invader, role.resident, role.mutualist}) {
            const SpeciesSpeed& sp = pt.speeds->species[static_cast<std::size_t>(s)];
            std::cout << ' ' << species_name(Coordinates::Original, s) << '='
                      << (sp.measured ? fmt17(sp.speed).substr(0, 8) : std::string("nan"));
          }
        }
        if (!pt.message.empty()) std::cout << "  [" << pt.message << ']';
        std::cout << '\n';
      }
      return res.any_failed() ? kNumerical : kOk;
    }

    if (*re_cmd) {
      // The reinvasion defaults differ from the sweep baseline.
      const ModelParams base = re_params.resolve(re_cmd, ModelParams::baseline(1.5, 2.0 / 3.0, 1.0));
      const ReinvasionResult r = run_reinvasion(base, L_prime, re_args.s);
      if (re_out) {
        const fs::path dir(*re_out);
        ensure_dir(dir);
        std::ofstream f = open_out(dir / "reinvasion.csv");
        write_reinvasion_csv(f, r);
        std::ofstream t1 = open_out(dir / "trajectory_extinction.csv");
        write_trajectory_csv(t1, r.extinction.trajectory);
        std::ofstream t2 = open_out(dir / "trajectory_reinvasion.csv");
        write_trajectory_csv(t2, r.reinvasion.trajectory);
        write_meta(dir, "reinvasion L_prime=" + fmt17(L_prime), r.extinction.trajectory.config,
                   "reinvasion.csv: one row per phase (extinction, reinvasion) with target "
                   "equilibrium, L-infinity distance of the final state over the central half "
                   "of the domain, c1 and measured speeds of invader, resident and mutualist\n");
      }
      if (re_csv) {
        write_reinvasion_csv(std::cout, r);
      } else {
        for (const PhaseResult* ph : {&r.extinction, &r.reinvasion}) {
          std::cout << ph->name << " (" << to_string(ph->scenario) << ", L=" << ph->params.L
                    << "): " << to_string(ph->classification.source.label) << " -> "
                    << to_string(ph->classification.target->label) << ", final distance "
                    << ph->final_distance << ", c1 " << ph->linear->c << '\n';
          if (ph->speeds) print_speeds(std::cout, *ph->speeds);
        }
      }
      return kOk;
    }

    if (*check_cmd) {
      const CheckSummary s = run_random_checks(seed, samples);
      std::cout << "seed=" << seed << " samples=" << s.samples
                << " invadable_cases=" << s.invadable_cases
                << " max_equilibrium_residual=" << fmt17(s.max_equilibrium_residual)
                << " max_speed_mismatch=" << fmt17(s.max_speed_mismatch) << '\n';
      const bool ok = s.max_equilibrium_residual <= 1e-10 && s.max_speed_mismatch <= 1e-8;
      return ok ? kOk : kNumerical;
    }
  } catch (const std::exception& e) {
    return report(e);
  }
  return kOk;
}
