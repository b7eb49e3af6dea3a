#include "ccm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "ccm/csv.hpp"
#include "ccm/errors.hpp"
#include "ccm/version.hpp"

namespace ccm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::string cell;
  std::istringstream is(text);
  while (std::getline(is, cell, ',')) {
    cell = trim(cell);
    if (!cell.empty()) out.push_back(parse_number(key, cell));
  }
  return out;
}

double& sweep_target(ModelParams& p, SweepParameter s) {
  switch (s) {
    case SweepParameter::A: return p.a;
    case SweepParameter::B: return p.b;
    case SweepParameter::M: return p.m;
  }
  return p.a;
}

SweepParameter parse_sweep_parameter(const std::string& s) {
  if (s == "a") return SweepParameter::A;
  if (s == "b") return SweepParameter::B;
  if (s == "m") return SweepParameter::M;
  throw ConfigError("sweep parameter must be one of a, b, m (got '" + s + "')");
}

std::string num_or_nan(const std::optional<double>& v) {
  return v ? fmt17(*v) : std::string("nan");
}

std::optional<double> measured_speed(const std::optional<SpeedReport>& r, int species) {
  if (!r) return std::nullopt;
  const SpeciesSpeed& s = r->species[static_cast<std::size_t>(species)];
  if (!s.measured) return std::nullopt;
  return s.speed;
}

std::optional<double> measured_r2(const std::optional<SpeedReport>& r, int species) {
  if (!r) return std::nullopt;
  const SpeciesSpeed& s = r->species[static_cast<std::size_t>(species)];
  if (!s.measured) return std::nullopt;
  return s.r_squared;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const StabilityError*>(&e)) return "StabilityError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const NotInvadable*>(&e)) return "NotInvadable";
  if (dynamic_cast<const InsufficientSamples*>(&e)) return "InsufficientSamples";
  if (dynamic_cast<const LevelError*>(&e)) return "LevelError";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  return "Error";
}

// CSV cells must not contain separators.
std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> parse_key_values_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_key_values(in);
}

double parse_number(const std::string& key, const std::string& text) {
  // Accept simple fractions such as 1024/3.
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash != std::string::npos) {
      const std::string num = trim(text.substr(0, slash));
      const std::string den = trim(text.substr(slash + 1));
      std::size_t u2 = 0;
      const double n = std::stod(num, &used);
      const double d = std::stod(den, &u2);
      if (used != num.size() || u2 != den.size() || d == 0.0) throw std::invalid_argument(text);
      return n / d;
    }
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse number '" + text + "'");
  }
}

void apply_param_keys(const std::map<std::string, std::string>& kv, ModelParams& p) {
  const std::pair<const char*, double*> fields[] = {
      {"alpha", &p.alpha}, {"beta", &p.beta}, {"gamma", &p.gamma}, {"a", &p.a},
      {"b", &p.b},         {"m", &p.m},       {"l", &p.l},         {"L", &p.L},
      {"D1", &p.D1},       {"D2", &p.D2},     {"D3", &p.D3}};
  for (const auto& [key, target] : fields) {
    const auto it = kv.find(key);
    if (it != kv.end()) *target = parse_number(key, it->second);
  }
}

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::A: return "a";
    case SweepParameter::B: return "b";
    case SweepParameter::M: return "m";
  }
  return "?";
}

std::vector<double> log_grid(double start, double stop, int points_per_decade) {
  if (!(start > 0.0 && stop > start) || points_per_decade < 1) {
    throw ConfigError("log grid needs 0 < start < stop and points_per_decade >= 1");
  }
  const double decades = std::log10(stop / start);
  const int n = std::max(2, static_cast<int>(std::lround(points_per_decade * decades)) + 1);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    v[static_cast<std::size_t>(k)] = start * std::pow(10.0, decades * k / (n - 1));
  }
  v.front() = start;
  v.back() = stop;
  return v;
}

std::vector<double> linear_grid(double start, double stop, int count) {
  if (!(stop > start) || count < 2) {
    throw ConfigError("linear grid needs start < stop and count >= 2");
  }
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    v[static_cast<std::size_t>(k)] = start + (stop - start) * k / (count - 1);
  }
  return v;
}

void ExperimentSpec::validate() const {
  params.validate();
  if (sweep.values.empty()) throw ConfigError("experiment '" + name + "' has an empty sweep grid");
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    const double v = sweep.values[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw ConfigError("sweep value " + fmt17(v) + " is not a valid " +
                        std::string(to_string(sweep.parameter)));
    }
    if (i > 0 && !(v > sweep.values[i - 1])) {
      throw ConfigError("sweep values must be strictly increasing");
    }
  }
  if (!(sim.dx > 0.0) || !(sim.length > 0.0)) throw ConfigError("length and dx must be > 0");
  make_sim_config(params, scenario, sim).validate();
}

std::vector<std::string> preset_names() {
  return {"figure2", "figure3a", "figure3b", "figure4a", "figure4b"};
}

ExperimentSpec preset(const std::string& name) {
  // Large competition values stop at 1024/3, the largest value the
  // experiments use; the explicit step stays stable there at dx = 0.1.
  constexpr double kLarge = 1024.0 / 3.0;
  ExperimentSpec s;
  s.name = name;
  if (name == "figure2") {
    s.scenario = Scenario::Invader;
    s.params = ModelParams::baseline(2.0 / 3.0, 2.0 / 3.0, 0.0);
    s.sweep = {SweepParameter::B, "log", log_grid(0.1, kLarge)};
  } else if (name == "figure3a" || name == "figure3b") {
    s.scenario = Scenario::Invader;
    s.params = ModelParams::baseline(2.0 / 3.0, name == "figure3a" ? 2.0 / 3.0 : kLarge, 0.0);
    s.sweep = {SweepParameter::M, "log", log_grid(0.01, 100.0)};
  } else if (name == "figure4a") {
    s.scenario = Scenario::Resident;
    s.params = ModelParams::baseline(0.5, 2.0 / 3.0, 0.5);
    s.sweep = {SweepParameter::A, "log", log_grid(0.1, kLarge)};
  } else if (name == "figure4b") {
    s.scenario = Scenario::Resident;
    s.params = ModelParams::baseline(kLarge, 2.0 / 3.0, 0.5);
    s.sweep = {SweepParameter::M, "log", log_grid(0.01, 100.0)};
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return s;
}

ExperimentSpec spec_from_key_values(const std::map<std::string, std::string>& kv,
                                    const std::string& default_name) {
  static const char* known[] = {
      "preset", "name", "scenario", "alpha", "beta", "gamma", "a", "b", "m", "l", "L",
      "D1", "D2", "D3", "sweep.parameter", "sweep.grid", "sweep.start", "sweep.stop",
      "sweep.count", "sweep.points_per_decade", "sweep.values", "length", "dx", "t_end",
      "snapshot_interval", "cfl", "bump.amplitude", "bump.width", "window.begin",
      "window.end", "save_trajectories"};
  for (const auto& [key, value] : kv) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  const auto get = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  const auto num = [&](const char* key, double fallback) {
    const auto v = get(key);
    return v ? parse_number(key, *v) : fallback;
  };

  ExperimentSpec s;
  if (const auto p = get("preset")) {
    s = preset(*p);
  } else {
    s.name = default_name;
    s.params = ModelParams::baseline(2.0 / 3.0, 2.0 / 3.0, 0.0);
    s.sweep.values.clear();
  }
  if (const auto n = get("name")) s.name = *n;
  if (const auto sc = get("scenario")) s.scenario = parse_scenario(*sc);
  apply_param_keys(kv, s.params);

  if (const auto sp = get("sweep.parameter")) s.sweep.parameter = parse_sweep_parameter(*sp);
  const auto grid = get("sweep.grid");
  if (grid) {
    s.sweep.grid = *grid;
    if (*grid == "log") {
      const int ppd = static_cast<int>(num("sweep.points_per_decade", 9.0));
      s.sweep.values = log_grid(num("sweep.start", 0.0), num("sweep.stop", 0.0), ppd);
    } else if (*grid == "linear") {
      s.sweep.values = linear_grid(num("sweep.start", 0.0), num("sweep.stop", 0.0),
                                   static_cast<int>(num("sweep.count", 0.0)));
    } else if (*grid == "list") {
      s.sweep.values = parse_list("sweep.values", get("sweep.values").value_or(""));
    } else {
      throw ConfigError("sweep.grid must be linear, log or list");
    }
  } else if (const auto vals = get("sweep.values")) {
    s.sweep.grid = "list";
    s.sweep.values = parse_list("sweep.values", *vals);
  }

  s.sim.length = num("length", s.sim.length);
  s.sim.dx = num("dx", s.sim.dx);
  s.sim.t_end = num("t_end", s.sim.t_end);
  s.sim.snapshot_interval = num("snapshot_interval", s.sim.snapshot_interval);
  s.sim.cfl = num("cfl", s.sim.cfl);
  s.sim.bump.amplitude = num("bump.amplitude", s.sim.bump.amplitude);
  s.sim.bump.width = num("bump.width", s.sim.bump.width);
  s.sim.window.begin = num("window.begin", s.sim.window.begin);
  s.sim.window.end = num("window.end", s.sim.window.end);
  if (const auto st = get("save_trajectories")) {
    if (*st != "true" && *st != "false") throw ConfigError("save_trajectories must be true|false");
    s.save_trajectories = *st == "true";
  }
  return s;
}

SimConfig make_sim_config(const ModelParams& params, Scenario scenario, const SimSettings& sim) {
  if (!(sim.dx > 0.0) || !(sim.length > 0.0)) throw ConfigError("length and dx must be > 0");
  SimConfig c = make_config(params, scenario);
  c.grid.length = sim.length;
  c.grid.n = static_cast<std::size_t>(std::llround(sim.length / sim.dx)) + 1;
  c.t_end = sim.t_end;
  c.snapshot_interval = sim.snapshot_interval;
  c.cfl = sim.cfl;
  c.bump = sim.bump;
  return c;
}

Roles roles(Scenario scenario) {
  if (scenario == Scenario::Invader) return {0, 1, 2};
  return {1, 0, 2};
}

bool ExperimentResult::any_failed() const {
  return std::any_of(points.begin(), points.end(),
                     [](const PointResult& p) { return p.status == "failed"; });
}

PointResult run_point(const ExperimentSpec& spec, std::size_t index, double value,
                      Trajectory* keep_trajectory) {
  PointResult r;
  r.index = index;
  r.sweep_value = value;
  r.params = spec.params;
  sweep_target(r.params, spec.sweep.parameter) = value;
  try {
    r.params.validate();
    r.classification = classify_invasion(r.params, spec.scenario);
    r.verdict = check_linear_determinacy(spec.scenario, r.params);
    if (!r.classification.invadable) {
      r.status = "not_invadable";
      r.message = "gamma1(0) = " + fmt17(r.classification.gamma1_at_zero);
      return r;
    }
    r.linear = linear_speed(spec.scenario, r.params);
    const SimConfig cfg = make_sim_config(r.params, spec.scenario, spec.sim);
    Trajectory traj = simulate(cfg);
    r.diagnostics = traj.diagnostics;
    r.speeds = estimate_speeds(traj, scenario_levels(r.params, spec.scenario), spec.sim.window);
    r.status = "ok";
    if (!r.speeds->warnings.empty()) {
      std::string joined;
      for (const auto& w : r.speeds->warnings) joined += (joined.empty() ? "" : "; ") + w;
      r.message = joined;
    }
    if (keep_trajectory) *keep_trajectory = std::move(traj);
  } catch (const Error& e) {
    r.status = "failed";
    r.message = error_kind(e) + ": " + e.what();
  }
  return r;
}

std::vector<std::string> summary_columns() {
  return {"index",          "status",          "sweep_parameter", "sweep_value",
          "scenario",       "alpha",            "beta",            "gamma",
          "a",              "b",                "m",               "l",
          "L",              "D1",               "D2",              "D3",
          "length",         "n",                "dx",              "t_end",
          "snapshot_interval", "cfl",           "bump_amplitude",  "bump_width",
          "window_begin",   "window_end",       "invadable",       "gamma1_0",
          "source",         "target",           "single_speed",    "c1",
          "mu_bar",         "linear_determinate", "speed_bound_only", "speed_invader",
          "r2_invader",     "speed_resident",   "r2_resident",     "speed_mutualist",
          "r2_mutualist",   "slowest",          "fastest",         "message"};
}

void write_summary_csv(std::ostream& os, const ExperimentResult& result) {
  const auto cols = summary_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  const ExperimentSpec& spec = result.spec;
  const SimConfig grid_cfg = make_sim_config(spec.params, spec.scenario, spec.sim);
  const Roles role = roles(spec.scenario);
  for (const PointResult& r : result.points) {
    const ModelParams& p = r.params;
    const auto& c = r.classification;
    const bool has_speeds = r.speeds.has_value();
    os << r.index << ',' << r.status << ',' << to_string(spec.sweep.parameter) << ','
       << fmt17(r.sweep_value) << ',' << to_string(spec.scenario) << ',' << fmt17(p.alpha)
       << ',' << fmt17(p.beta) << ',' << fmt17(p.gamma) << ',' << fmt17(p.a) << ','
       << fmt17(p.b) << ',' << fmt17(p.m) << ',' << fmt17(p.l) << ',' << fmt17(p.L) << ','
       << fmt17(p.D1) << ',' << fmt17(p.D2) << ',' << fmt17(p.D3) << ','
       << fmt17(grid_cfg.grid.length) << ',' << grid_cfg.grid.n << ','
       << fmt17(grid_cfg.grid.dx()) << ',' << fmt17(spec.sim.t_end) << ','
       << fmt17(spec.sim.snapshot_interval) << ',' << fmt17(spec.sim.cfl) << ','
       << fmt17(spec.sim.bump.amplitude) << ',' << fmt17(spec.sim.bump.width) << ','
       << fmt17(spec.sim.window.begin) << ',' << fmt17(spec.sim.window.end) << ','
       << fmt_bool(c.invadable) << ',' << fmt17(c.gamma1_at_zero) << ','
       << to_string(c.source.label) << ','
       << (c.target ? std::string(to_string(c.target->label)) : std::string("none")) << ','
       << fmt_bool(c.single_speed_guaranteed) << ','
       << num_or_nan(r.linear ? std::optional<double>(r.linear->c) : std::nullopt) << ','
       << num_or_nan(r.linear ? std::optional<double>(r.linear->mu_bar) : std::nullopt) << ','
       << fmt_bool(r.verdict.linear_determinate) << ',' << fmt_bool(r.verdict.speed_bound_only)
       << ',' << num_or_nan(measured_speed(r.speeds, role.invader)) << ','
       << num_or_nan(measured_r2(r.speeds, role.invader)) << ','
       << num_or_nan(measured_speed(r.speeds, role.resident)) << ','
       << num_or_nan(measured_r2(r.speeds, role.resident)) << ','
       << num_or_nan(measured_speed(r.speeds, role.mutualist)) << ','
       << num_or_nan(measured_r2(r.speeds, role.mutualist)) << ','
       << num_or_nan(has_speeds ? std::optional<double>(r.speeds->slowest) : std::nullopt)
       << ','
       << num_or_nan(has_speeds ? std::optional<double>(r.speeds->fastest) : std::nullopt)
       << ',' << sanitize(r.message) << '\n';
  }
}

std::string column_documentation() {
  return R"(summary.csv columns:
  index              sweep point number (rows are in sweep order)
  status             ok | not_invadable | failed
  sweep_parameter    a, b or m
  sweep_value        value of the swept parameter at this point
  scenario           invader (mutualist helps the invader, source E4) | resident (source E6)
  alpha..D3          full effective model parameters
  length,n,dx        spatial grid
  t_end              simulated time
  snapshot_interval  time between stored profiles
  cfl                dt = cfl * dx^2 / max(D)
  bump_amplitude     peak of the Gaussian invader bump
  bump_width         standard deviation of the bump
  window_begin/end   fit window as fractions of t_end
  invadable          principal growth rate gamma1(0) > 0
  gamma1_0           gamma1(0)
  source,target      equilibrium labels (E0..E7minus)
  single_speed       no boundary equilibria between source and target
  c1,mu_bar          linear spreading speed and its minimizer
  linear_determinate sufficient conditions for linear determinacy hold
  speed_bound_only   only the lower bound c* >= c1 is established
  speed_<role>       fitted right-front speed of the invader, resident, mutualist (nan if unmeasured)
  r2_<role>          coefficient of determination of that fit
  slowest,fastest    min and max |speed| over measured species
  message            warnings or the error that failed the point
trajectory_<i>.csv columns (when saved): t,x,p1,p2,u with config echo in '#' lines
)";
}

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::optional<std::filesystem::path>& out_dir) {
  spec.validate();
  ExperimentResult result;
  result.spec = spec;
  if (out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir->string() + ": " + ec.message());
  }

  const auto start = std::chrono::steady_clock::now();
  const std::size_t count = spec.sweep.values.size();
  result.points.resize(count);
  std::vector<std::string> io_errors(count);
  const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    Trajectory traj;
    const bool keep = spec.save_trajectories && out_dir.has_value();
    result.points[idx] = run_point(spec, idx, spec.sweep.values[idx], keep ? &traj : nullptr);
    if (keep && !traj.snapshots.empty()) {
      const auto path = *out_dir / ("trajectory_" + std::to_string(idx) + ".csv");
      std::ofstream f(path);
      try {
        if (!f) throw IoError("cannot open " + path.string());
        write_trajectory_csv(f, traj);
      } catch (const IoError& e) {
        io_errors[idx] = e.what();
      }
    }
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& e : io_errors) {
    if (!e.empty()) throw IoError(e);
  }

  if (out_dir) {
    std::ofstream summary(*out_dir / "summary.csv");
    if (!summary) throw IoError("cannot write summary.csv in " + out_dir->string());
    write_summary_csv(summary, result);
    std::ofstream meta(*out_dir / "meta.txt");
    if (!meta) throw IoError("cannot write meta.txt in " + out_dir->string());
    const SimConfig cfg = make_sim_config(spec.params, spec.scenario, spec.sim);
    meta << "experiment " << spec.name << '\n'
         << "tool ccm " << kVersion << '\n'
         << "finished_utc " << now_utc() << '\n'
         << "wall_seconds " << fmt17(result.wall_seconds) << '\n'
         << "points " << count << '\n'
         << "sweep " << to_string(spec.sweep.parameter) << ' ' << spec.sweep.grid << '\n';
    for (const std::string& line : describe_config(cfg)) meta << line << '\n';
    meta << "speed_window " << fmt17(spec.sim.window.begin) << ' '
         << fmt17(spec.sim.window.end) << " (fractions of t_end)\n"
         << "front_levels midpoint between source and target values, right front\n\n"
         << column_documentation();
    if (!summary || !meta) throw IoError("failed writing experiment output");
  }
  return result;
}

double central_distance(const Field& field, const Vec3& target, const ModelParams& params) {
  const double lo = 0.25 * field.grid.length;
  const double hi = 0.75 * field.grid.length;
  double d = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double x = field.grid.x(i);
    if (x < lo || x > hi) continue;
    const Vec3 p = convert(field.coords, Coordinates::Original, field.at(i), params);
    for (std::size_t s = 0; s < 3; ++s) d = std::max(d, std::abs(p[s] - target[s]));
  }
  return d;
}

SimSettings reinvasion_settings() {
  SimSettings s;
  s.t_end = 150.0;
  return s;
}

namespace {

PhaseResult run_phase(const std::string& name, const ModelParams& params, Scenario scenario,
                      const SimSettings& sim) {
  PhaseResult ph;
  ph.name = name;
  ph.params = params;
  ph.scenario = scenario;
  ph.classification = classify_invasion(params, scenario);
  ph.verdict = check_linear_determinacy(scenario, params);
  ph.linear = linear_speed(scenario, params);
  ph.trajectory = simulate(make_sim_config(params, scenario, sim));
  try {
    ph.speeds = estimate_speeds(ph.trajectory, scenario_levels(params, scenario), sim.window);
  } catch (const InsufficientSamples&) {
    ph.speeds.reset();
  }
  const Field& last = ph.trajectory.snapshots.back();
  ph.final_distance = central_distance(last, ph.classification.target->coords.values(), params);
  ph.distance_to_e4 = central_distance(last, {0.0, 1.0, params.L}, params);
  return ph;
}

}  // namespace

ReinvasionResult run_reinvasion(const ModelParams& params, double L_prime,
                                const SimSettings& sim) {
  params.validate();
  const double K = 1.0 + params.m * params.L;
  const double K_prime = 1.0 + params.m * L_prime;
  if (!(params.a > K)) throw ConfigError("reinvasion needs a > 1 + mL for the extinction phase");
  if (!(L_prime > 0.0) || !(params.a < K_prime)) {
    throw ConfigError("reinvasion needs a < 1 + m L' for the reinvasion phase");
  }
  if (!(params.b < 1.0)) throw ConfigError("reinvasion needs b < 1");

  ReinvasionResult r;
  r.sim = sim;
  r.L_prime = L_prime;
  r.extinction = run_phase("extinction", params, Scenario::Resident, sim);
  ModelParams restored = params;
  restored.L = L_prime;
  r.reinvasion = run_phase("reinvasion", restored, Scenario::Invader, sim);
  return r;
}

void write_reinvasion_csv(std::ostream& os, const ReinvasionResult& result) {
  os << "phase,scenario,L,source,target,target_p1,target_p2,target_u,final_distance,"
        "distance_to_E4,c1,linear_determinate,speed_invader,speed_resident,speed_mutualist,"
        "length,dx,t_end\n";
  for (const PhaseResult* ph : {&result.extinction, &result.reinvasion}) {
    const auto& tgt = *ph->classification.target;
    const Roles role = roles(ph->scenario);
    const Grid& g = ph->trajectory.config.grid;
    os << ph->name << ',' << to_string(ph->scenario) << ',' << fmt17(ph->params.L) << ','
       << to_string(ph->classification.source.label) << ',' << to_string(tgt.label) << ','
       << fmt17(tgt.coords.p1) << ',' << fmt17(tgt.coords.p2) << ',' << fmt17(tgt.coords.u)
       << ',' << fmt17(ph->final_distance) << ',' << fmt17(ph->distance_to_e4) << ','
       << fmt17(ph->linear->c) << ',' << fmt_bool(ph->verdict.linear_determinate) << ','
       << num_or_nan(measured_speed(ph->speeds, role.invader)) << ','
       << num_or_nan(measured_speed(ph->speeds, role.resident)) << ','
       << num_or_nan(measured_speed(ph->speeds, role.mutualist)) << ',' << fmt17(g.length)
       << ',' << fmt17(g.dx()) << ',' << fmt17(ph->trajectory.config.t_end) << '\n';
  }
}

void write_analysis(std::ostream& os, const ModelParams& p, Scenario scenario, bool csv) {
  p.validate();
  const auto eq = enumerate_equilibria(p);
  const InvasionClassification c = classify_invasion(p, scenario);
  const DeterminacyVerdict v = check_linear_determinacy(scenario, p);
  std::optional<SpeedResult> speed;
  std::optional<Vec3> zeta;
  std::string zeta_note;
  if (c.invadable) {
    speed = linear_speed(scenario, p);
    try {
      zeta = principal_eigenvector(scenario, p, speed->mu_bar);
    } catch (const DegenerateEigenvalue& e) {
      zeta_note = e.what();
    }
  }

  if (csv) {
    os << "key,value\n";
    const std::pair<const char*, double> params[] = {
        {"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"a", p.a},
        {"b", p.b},         {"m", p.m},       {"l", p.l},         {"L", p.L},
        {"D1", p.D1},       {"D2", p.D2},     {"D3", p.D3}};
    for (const auto& [k, val] : params) os << "param." << k << ',' << fmt17(val) << '\n';
    os << "scenario," << to_string(scenario) << '\n';
    for (const Equilibrium& e : eq) {
      const std::string base = "equilibrium." + std::string(to_string(e.label));
      os << base << ".p1," << fmt17(e.coords.p1) << '\n'
         << base << ".p2," << fmt17(e.coords.p2) << '\n'
         << base << ".u," << fmt17(e.coords.u) << '\n'
         << base << ".admissible," << fmt_bool(e.admissible) << '\n';
      for (EquilibriumLabel other : e.coincides_with) {
        os << base << ".coincides_with," << to_string(other) << '\n';
      }
    }
    os << "classification.invadable," << fmt_bool(c.invadable) << '\n'
       << "classification.gamma1_0," << fmt17(c.gamma1_at_zero) << '\n'
       << "classification.source," << to_string(c.source.label) << '\n'
       << "classification.target," << (c.target ? to_string(c.target->label) : "none") << '\n'
       << "classification.single_speed," << fmt_bool(c.single_speed_guaranteed) << '\n'
       << "classification.boundary_equilibria," << fmt_bool(c.boundary_equilibria_present)
       << '\n'
       << "classification.note," << sanitize(c.note) << '\n';
    if (speed) {
      os << "linear.c1," << fmt17(speed->c) << '\n' << "linear.mu_bar," << fmt17(speed->mu_bar) << '\n';
    }
    if (zeta) {
      for (std::size_t i = 0; i < 3; ++i) {
        os << "linear.zeta1_" << i + 1 << ',' << fmt17((*zeta)[i]) << '\n';
      }
    }
    for (const Condition& cond : v.conditions) {
      const std::string base = "condition." + cond.name;
      os << base << ".lhs," << fmt17(cond.lhs) << '\n'
         << base << ".rhs," << fmt17(cond.rhs) << '\n'
         << base << ".residual," << fmt17(cond.residual()) << '\n'
         << base << ".pass," << fmt_bool(cond.holds) << '\n';
    }
    os << "verdict.linear_determinate," << fmt_bool(v.linear_determinate) << '\n'
       << "verdict.speed_bound_only," << fmt_bool(v.speed_bound_only) << '\n';
    if (scenario == Scenario::Resident) {
      os << "verdict.first_two_at_c1," << fmt_bool(v.first_two_at_c1) << '\n'
         << "verdict.direct_cone_route," << fmt_bool(v.direct_cone_route) << '\n';
    }
    os << "verdict.note," << sanitize(v.note) << '\n';
    return;
  }

  os << std::setprecision(10);
  os << "parameters: alpha=" << p.alpha << " beta=" << p.beta << " gamma=" << p.gamma
     << " a=" << p.a << " b=" << p.b << " m=" << p.m << " l=" << p.l << " L=" << p.L
     << " D1=" << p.D1 << " D2=" << p.D2 << " D3=" << p.D3 << '\n';
  os << "scenario: " << to_string(scenario) << "\n\nequilibria:\n";
  for (const Equilibrium& e : eq) {
    os << "  " << std::left << std::setw(8) << to_string(e.label) << std::right;
    if (!e.defined) {
      os << "  (undefined)\n";
      continue;
    }
    os << " (" << e.coords.p1 << ", " << e.coords.p2 << ", " << e.coords.u << ")  "
       << (e.admissible ? "admissible" : "inadmissible");
    for (EquilibriumLabel other : e.coincides_with) os << "  = " << to_string(other);
    os << '\n';
  }
  os << "\nclassification:\n";
  if (!c.invadable) {
    os << "  NotInvadable: gamma1(0) = " << c.gamma1_at_zero << " (" << c.note << ")\n";
  } else {
    os << "  invadable, gamma1(0) = " << c.gamma1_at_zero << '\n'
       << "  source " << to_string(c.source.label) << " -> target " << to_string(c.target->label)
       << '\n'
       << "  single speed guaranteed: " << (c.single_speed_guaranteed ? "yes" : "no")
       << "; boundary equilibria: " << (c.boundary_equilibria_present ? "yes" : "no") << '\n'
       << "  note: " << c.note << '\n';
    for (EquilibriumLabel other : c.target->coincides_with) {
      os << "  note: target " << to_string(c.target->label) << " coincides with "
         << to_string(other) << '\n';
    }
  }
  if (speed) {
    os << "\nlinear speed: c1 = " << speed->c << ", mu_bar = " << speed->mu_bar << '\n';
    if (zeta) {
      os << "zeta1(mu_bar) = (" << (*zeta)[0] << ", " << (*zeta)[1] << ", " << (*zeta)[2]
         << ")\n";
    } else {
      os << "zeta1(mu_bar): " << zeta_note << '\n';
    }
  }
  os << "\nlinear determinacy conditions:\n";
  for (const Condition& cond : v.conditions) {
    os << "  " << std::left << std::setw(11) << cond.name << std::right << " lhs=" << cond.lhs
       << " rhs=" << cond.rhs << " residual=" << cond.residual() << "  "
       << (cond.holds ? "pass" : "fail") << '\n';
  }
  os << "verdict: " << (v.linear_determinate ? "linearly determinate" : "not established")
     << " (" << v.note << ")\n";
}

}  // namespace ccm
