#include "ccm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "ccm/csv.hpp"
#include "ccm/equilibria.hpp"
#include "ccm/errors.hpp"

namespace ccm {

namespace {

constexpr double kClampTolerance = 1e-12;

const char* to_string(SourceKind k) {
  switch (k) {
    case SourceKind::Invader: return "invader";
    case SourceKind::Resident: return "resident";
    case SourceKind::Custom: return "custom";
  }
  return "?";
}

}  // namespace

void Grid::validate() const {
  if (n < 3) throw ConfigError("grid needs at least 3 nodes");
  if (!std::isfinite(length) || !(length > 0.0)) throw ConfigError("grid length must be > 0");
}

Field::Field(Grid g, Coordinates c) : grid(g), coords(c) {
  for (auto& v : values) v.assign(grid.n, 0.0);
}

void Field::set(std::size_t i, const Vec3& v) {
  values[0][i] = v[0];
  values[1][i] = v[1];
  values[2][i] = v[2];
}

ComponentsView Field::view() const {
  return {{values[0].data(), values[1].data(), values[2].data()}};
}

ComponentsSpan Field::span() { return {{values[0].data(), values[1].data(), values[2].data()}}; }

void SimConfig::validate() const {
  params.validate();
  grid.validate();
  if (!std::isfinite(t_end) || t_end < 0.0) throw ConfigError("t_end must be >= 0");
  if (!(cfl > 0.0 && cfl < 0.5)) throw ConfigError("cfl safety factor must lie in (0, 0.5)");
  if (snapshot_times.empty() && !(snapshot_interval > 0.0)) {
    throw ConfigError("snapshot_interval must be > 0");
  }
  for (double t : snapshot_times) {
    if (!(t >= 0.0 && t <= t_end)) throw ConfigError("snapshot times must lie in [0, t_end]");
  }
  if (!(bump.width > 0.0)) throw ConfigError("bump width must be > 0");
  if (!(bump.amplitude >= 0.0)) throw ConfigError("bump amplitude must be >= 0");
  if (source == SourceKind::Custom && (custom_species < 0 || custom_species > 2)) {
    throw ConfigError("custom invading species index must be 0, 1 or 2");
  }
  const Coordinates c = coordinates_of(system);
  if (c == Coordinates::Invader && source == SourceKind::Resident) {
    throw ConfigError("the invader cooperative system needs the invader source");
  }
  if (c == Coordinates::Resident && source == SourceKind::Invader) {
    throw ConfigError("the resident cooperative systems need the resident source");
  }
}

std::vector<double> SimConfig::effective_snapshot_times() const {
  std::vector<double> times{0.0};
  if (snapshot_times.empty()) {
    for (std::size_t k = 1;; ++k) {
      const double t = static_cast<double>(k) * snapshot_interval;
      if (t >= t_end * (1.0 - 1e-12)) break;
      times.push_back(t);
    }
  } else {
    times.insert(times.end(), snapshot_times.begin(), snapshot_times.end());
  }
  times.push_back(t_end);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  return times;
}

Vec3 SimConfig::source_state() const {
  switch (source) {
    case SourceKind::Invader: return {0.0, 1.0, params.L};
    case SourceKind::Resident: return {1.0, 0.0, params.L + params.l};
    case SourceKind::Custom: return custom_source;
  }
  return {};
}

int SimConfig::invading_species() const {
  switch (source) {
    case SourceKind::Invader: return 0;
    case SourceKind::Resident: return 1;
    case SourceKind::Custom: return custom_species;
  }
  return 0;
}

SimConfig make_config(const ModelParams& params, Scenario scenario) {
  SimConfig c;
  c.params = params;
  c.source = scenario == Scenario::Invader ? SourceKind::Invader : SourceKind::Resident;
  return c;
}

double max_stable_dt(const Grid& grid, const Vec3& diffusivity, double cfl) {
  const double dmax = std::max({diffusivity[0], diffusivity[1], diffusivity[2]});
  const double dx = grid.dx();
  return cfl * dx * dx / dmax;
}

Field initial_condition(const SimConfig& config) {
  config.validate();
  const Grid& g = config.grid;
  const double dx = g.dx();
  if (config.bump.width < 2.0 * dx) {
    std::ostringstream os;
    os << "bump width " << config.bump.width << " is below 2 dx = " << 2.0 * dx;
    throw ConfigError(os.str());
  }
  const Coordinates coords = coordinates_of(config.system);
  const Vec3 source = config.source_state();
  const int species = config.invading_species();
  const double center = config.bump.center.value_or(0.5 * g.length);
  const double two_var = 2.0 * config.bump.width * config.bump.width;

  Field f(g, coords);
  for (std::size_t i = 0; i < g.n; ++i) {
    Vec3 p = source;
    if (i != 0 && i + 1 != g.n) {
      const double d = g.x(i) - center;
      p[static_cast<std::size_t>(species)] += config.bump.amplitude * std::exp(-d * d / two_var);
    }
    f.set(i, convert(Coordinates::Original, coords, p, config.params));
  }
  return f;
}

double default_blowup_bound(const ModelParams& params, Coordinates coords) {
  double biggest = 1.0;
  for (const Equilibrium& e : enumerate_equilibria(params)) {
    if (!e.admissible) continue;
    const Vec3 x = convert(Coordinates::Original, coords, e.coords.values(), params);
    for (double c : x) biggest = std::max(biggest, std::abs(c));
  }
  return 10.0 * biggest;
}

Integrator::Integrator(const ModelParams& params, System system, const Grid& grid,
                       StepOptions options)
    : params_(params),
      system_(system),
      grid_(grid),
      options_(options),
      k1_(grid),
      k2_(grid),
      k3_(grid),
      k4_(grid),
      stage_(grid) {
  grid_.validate();
  if (options_.blowup_bound <= 0.0) {
    options_.blowup_bound = default_blowup_bound(params_, coordinates_of(system_));
  }
  const double dx = grid_.dx();
  ctx_.system = system_;
  ctx_.params = &params_;
  ctx_.diffusivity = diffusivities(system_, params_);
  ctx_.inv_dx2 = 1.0 / (dx * dx);
  ctx_.reaction_enabled = options_.reaction_enabled;
}

void Integrator::step(Field& y, double dt) {
  if (!(y.grid == grid_)) throw ConfigError("field grid does not match the integrator grid");
  const std::size_t n = grid_.n;
  const KernelMode mode = options_.kernel;
  const auto rhs = [&](const Field& in, Field& out, double t_stage) {
    const RhsStatus st = evaluate_rhs(mode, ctx_, in.view(), out.span(), n);
    if (st.first_bad_node < n) {
      std::ostringstream os;
      os << "reaction denominator vanished at node " << st.first_bad_node << ", t = " << t_stage;
      throw DomainError(os.str());
    }
    return st;
  };
  const auto axpy = [&](const Field& base, double h, const Field& k, Field& out) {
    if (mode == KernelMode::Parallel) {
      axpy_parallel(base.view(), h, k.view(), out.span(), n);
    } else {
      axpy_serial(base.view(), h, k.view(), out.span(), n);
    }
  };

  const RhsStatus first = rhs(y, k1_, y.t);
  diag_.max_rate = std::max(diag_.max_rate, first.max_rate);
  axpy(y, 0.5 * dt, k1_, stage_);
  rhs(stage_, k2_, y.t + 0.5 * dt);
  axpy(y, 0.5 * dt, k2_, stage_);
  rhs(stage_, k3_, y.t + 0.5 * dt);
  axpy(y, dt, k3_, stage_);
  rhs(stage_, k4_, y.t + dt);
  if (mode == KernelMode::Parallel) {
    rk4_combine_parallel(y.span(), dt, k1_.view(), k2_.view(), k3_.view(), k4_.view(), n);
  } else {
    rk4_combine_serial(y.span(), dt, k1_.view(), k2_.view(), k3_.view(), k4_.view(), n);
  }
  y.t += dt;
  ++diag_.steps;
  diag_.dt = std::max(diag_.dt, dt);
  check(y);
}

void Integrator::check(Field& y) {
  const double bound = options_.blowup_bound;
  for (std::size_t s = 0; s < 3; ++s) {
    std::vector<double>& v = y.values[s];
    for (std::size_t i = 0; i < v.size(); ++i) {
      double& x = v[i];
      if (options_.clamp_negative && x < 0.0 && x > -kClampTolerance) {
        x = 0.0;
        ++diag_.clamp_count;
      }
      if (!std::isfinite(x) || std::abs(x) > bound) {
        std::ostringstream os;
        os << "blow-up: component " << s << " at node " << i << " (x = " << y.grid.x(i)
           << ") reached " << x << " at t = " << y.t;
        throw StabilityError(os.str(), y.t, i);
      }
    }
  }
}

Field step(const Field& field, const ModelParams& params, System system, double dt,
           const StepOptions& options) {
  Integrator integrator(params, system, field.grid, options);
  Field out = field;
  integrator.step(out, dt);
  return out;
}

Trajectory simulate_from(const SimConfig& config, Field initial) {
  config.validate();
  if (!(initial.grid == config.grid)) throw ConfigError("initial field grid mismatch");
  if (initial.coords != coordinates_of(config.system)) {
    throw ConfigError("initial field coordinates do not match the system");
  }
  StepOptions options;
  options.clamp_negative = config.clamp_negative;
  options.reaction_enabled = config.reaction_enabled;
  options.kernel = config.kernel;
  Integrator integrator(config.params, config.system, config.grid, options);
  const double dt_max =
      max_stable_dt(config.grid, diffusivities(config.system, config.params), config.cfl);

  Trajectory traj;
  traj.config = config;
  const std::vector<double> times = config.effective_snapshot_times();
  initial.t = 0.0;
  traj.snapshots.reserve(times.size());
  traj.snapshots.push_back(initial);
  Field y = std::move(initial);
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double interval = times[k] - times[k - 1];
    const auto nsteps =
        static_cast<std::size_t>(std::max(1.0, std::ceil(interval / dt_max - 1e-9)));
    const double dt = interval / static_cast<double>(nsteps);
    for (std::size_t s = 0; s < nsteps; ++s) integrator.step(y, dt);
    y.t = times[k];
    traj.snapshots.push_back(y);
  }
  traj.diagnostics = integrator.diagnostics();
  if (traj.diagnostics.dt == 0.0) traj.diagnostics.dt = dt_max;
  return traj;
}

Trajectory simulate(const SimConfig& config) {
  return simulate_from(config, initial_condition(config));
}

ComparisonResult comparison_run(const SimConfig& config) {
  if (config.source != SourceKind::Resident) {
    throw ConfigError("comparison_run needs the resident source");
  }
  SimConfig with = config;
  with.system = System::ResidentH;
  SimConfig without = config;
  without.system = System::ResidentH0;
  const Field q0 = initial_condition(with);

  ComparisonResult r;
  r.with_mutualism = simulate_from(with, q0);
  r.without_mutualism = simulate_from(without, q0);
  const auto& a = r.with_mutualism.snapshots;
  const auto& b = r.without_mutualism.snapshots;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t s = 0; s < 3; ++s) {
      for (std::size_t i = 0; i < a[k].size(); ++i) {
        const double excess = a[k].values[s][i] - b[k].values[s][i];
        if (excess > r.max_violation) {
          r.max_violation = excess;
          r.violation_time = a[k].t;
        }
      }
    }
  }
  return r;
}

std::vector<std::string> describe_config(const SimConfig& c) {
  const ModelParams& p = c.params;
  std::vector<std::string> lines;
  std::ostringstream os;
  os << "params alpha=" << fmt17(p.alpha) << " beta=" << fmt17(p.beta)
     << " gamma=" << fmt17(p.gamma) << " a=" << fmt17(p.a) << " b=" << fmt17(p.b)
     << " m=" << fmt17(p.m) << " l=" << fmt17(p.l) << " L=" << fmt17(p.L)
     << " D1=" << fmt17(p.D1) << " D2=" << fmt17(p.D2) << " D3=" << fmt17(p.D3);
  lines.push_back(os.str());
  os.str("");
  os << "source=" << to_string(c.source) << " system=" << to_string(c.system)
     << " invading_species=" << c.invading_species();
  if (c.source == SourceKind::Custom) {
    os << " custom_source=" << fmt17(c.custom_source[0]) << ',' << fmt17(c.custom_source[1])
       << ',' << fmt17(c.custom_source[2]);
  }
  lines.push_back(os.str());
  os.str("");
  os << "grid length=" << fmt17(c.grid.length) << " n=" << c.grid.n
     << " dx=" << fmt17(c.grid.dx()) << " t_end=" << fmt17(c.t_end);
  if (c.snapshot_times.empty()) {
    os << " snapshot_interval=" << fmt17(c.snapshot_interval);
  } else {
    os << " snapshot_times=" << c.snapshot_times.size();
  }
  lines.push_back(os.str());
  os.str("");
  os << "bump amplitude=" << fmt17(c.bump.amplitude) << " width=" << fmt17(c.bump.width)
     << " center=" << fmt17(c.bump.center.value_or(0.5 * c.grid.length));
  lines.push_back(os.str());
  os.str("");
  os << "integrator rk4 cfl=" << fmt17(c.cfl)
     << " dt=" << fmt17(max_stable_dt(c.grid, diffusivities(c.system, c.params), c.cfl))
     << " clamp_negative=" << fmt_bool(c.clamp_negative)
     << " reaction=" << fmt_bool(c.reaction_enabled) << " boundary=dirichlet-source";
  lines.push_back(os.str());
  return lines;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  for (const std::string& line : describe_config(traj.config)) os << "# " << line << '\n';
  const Diagnostics& d = traj.diagnostics;
  os << "# diagnostics dt=" << fmt17(d.dt) << " steps=" << d.steps
     << " max_rate=" << fmt17(d.max_rate) << " clamp_count=" << d.clamp_count << '\n';
  os << "t,x,p1,p2,u\n";
  for (const Field& f : traj.snapshots) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Vec3 p = convert(f.coords, Coordinates::Original, f.at(i), traj.config.params);
      os << fmt17(f.t) << ',' << fmt17(f.grid.x(i)) << ',' << fmt17(p[0]) << ','
         << fmt17(p[1]) << ',' << fmt17(p[2]) << '\n';
    }
  }
  if (!os) throw IoError("failed writing trajectory CSV");
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  bool header = false;
  std::map<double, std::vector<std::array<double, 4>>> rows;  // t -> (x, p1, p2, u)
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "t,x,p1,p2,u") throw IoError("unexpected trajectory CSV header: " + line);
      header = true;
      continue;
    }
    std::array<double, 5> v{};
    std::istringstream ls(line);
    std::string cell;
    for (std::size_t k = 0; k < 5; ++k) {
      if (!std::getline(ls, cell, ',')) throw IoError("short trajectory CSV row: " + line);
      try {
        v[k] = std::stod(cell);
      } catch (const std::exception&) {
        throw IoError("bad number in trajectory CSV row: " + line);
      }
    }
    rows[v[0]].push_back({v[1], v[2], v[3], v[4]});
  }
  if (rows.empty()) throw IoError("trajectory CSV holds no rows");

  const auto& first = rows.begin()->second;
  if (first.size() < 3) throw IoError("trajectory snapshots need at least 3 nodes");
  Grid g;
  g.n = first.size();
  g.length = first.back()[0] - first.front()[0];
  Trajectory traj;
  traj.config.grid = g;
  for (const auto& [t, pts] : rows) {
    if (pts.size() != g.n) throw IoError("trajectory snapshots differ in node count");
    Field f(g, Coordinates::Original);
    f.t = t;
    for (std::size_t i = 0; i < g.n; ++i) f.set(i, {pts[i][1], pts[i][2], pts[i][3]});
    traj.snapshots.push_back(std::move(f));
  }
  traj.config.t_end = traj.snapshots.back().t;
  return traj;
}

}  // namespace ccm
