#include "ccm/speed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "ccm/csv.hpp"
#include "ccm/equilibria.hpp"
#include "ccm/errors.hpp"

namespace ccm {

namespace {

constexpr std::size_t kMinSamples = 4;
constexpr double kRSquaredWarning = 0.999;

}  // namespace

bool LevelBand::strictly_inside(double level) const {
  const double lo = std::min(source, target);
  const double hi = std::max(source, target);
  return level > lo && level < hi;
}

std::optional<double> front_position(std::span<const double> profile, const Grid& grid,
                                     double level, LevelBand band, Side side) {
  if (!band.strictly_inside(level)) {
    std::ostringstream os;
    os << "level " << level << " is not strictly between " << band.source << " and "
       << band.target;
    throw LevelError(os.str());
  }
  if (profile.size() != grid.n) throw LevelError("profile size does not match the grid");
  const std::size_t n = profile.size();
  const double dx = grid.dx();
  const auto crossing = [&](std::size_t outer, std::size_t inner) -> std::optional<double> {
    const double vo = profile[outer] - level;
    const double vi = profile[inner] - level;
    if (vi == 0.0) return grid.x(inner);
    if ((vo > 0.0) == (vi > 0.0) && vo != 0.0) return std::nullopt;
    // Linear interpolation between inner and outer nodes.
    const double frac = vi / (vi - vo);
    const double xi = grid.x(inner);
    return outer > inner ? xi + frac * dx : xi - frac * dx;
  };
  if (side == Side::Right) {
    for (std::size_t i = n - 1; i > 0; --i) {
      if (auto x = crossing(i, i - 1)) return x;
    }
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (auto x = crossing(i, i + 1)) return x;
    }
  }
  return std::nullopt;
}

SpeciesLevels default_levels(const Vec3& source, const Vec3& target) {
  SpeciesLevels out;
  for (std::size_t s = 0; s < 3; ++s) {
    if (std::abs(source[s] - target[s]) <= 1e-9) continue;
    LevelBand band{source[s], target[s]};
    out[s] = SpeciesLevel{band.midpoint(), band};
  }
  return out;
}

SpeciesLevels scenario_levels(const ModelParams& params, Scenario scenario, Coordinates coords) {
  const InvasionClassification c = classify_invasion(params, scenario);
  if (!c.invadable || !c.target) {
    throw NotInvadable("scenario source is not invadable", c.gamma1_at_zero);
  }
  const Vec3 src = convert(Coordinates::Original, coords, c.source.coords.values(), params);
  const Vec3 tgt = convert(Coordinates::Original, coords, c.target->coords.values(), params);
  return default_levels(src, tgt);
}

LineFit fit_line(std::span<const double> t, std::span<const double> x) {
  const std::size_t n = t.size();
  LineFit f;
  if (n == 0 || x.size() != n) return f;
  double tm = 0.0, xm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tm += t[i];
    xm += x[i];
  }
  tm /= static_cast<double>(n);
  xm /= static_cast<double>(n);
  double stt = 0.0, stx = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = t[i] - tm;
    const double dxv = x[i] - xm;
    stt += dt * dt;
    stx += dt * dxv;
    sxx += dxv * dxv;
  }
  if (stt == 0.0) return f;
  f.slope = stx / stt;
  f.intercept = xm - f.slope * tm;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = x[i] - (f.intercept + f.slope * t[i]);
    ssr += e * e;
  }
  if (sxx == 0.0) {
    f.r_squared = ssr == 0.0 ? 1.0 : 0.0;
  } else {
    f.r_squared = std::clamp(1.0 - ssr / sxx, 0.0, 1.0);
  }
  return f;
}

std::string species_name(Coordinates coords, int species) {
  static constexpr const char* original[] = {"p1", "p2", "u"};
  static constexpr const char* transformed[] = {"q1", "q2", "v"};
  const auto idx = static_cast<std::size_t>(species);
  return coords == Coordinates::Original ? original[idx] : transformed[idx];
}

SpeedReport estimate_speeds(const Trajectory& traj, const SpeciesLevels& levels,
                            SpeedWindow window, Side side) {
  if (!(window.begin >= 0.0 && window.begin < window.end && window.end <= 1.0)) {
    throw ConfigError("speed window fractions must satisfy 0 <= begin < end <= 1");
  }
  SpeedReport report;
  const double t_end = traj.snapshots.empty() ? 0.0 : traj.snapshots.back().t;
  report.t1 = window.begin * t_end;
  report.t2 = window.end * t_end;
  report.coords = traj.snapshots.empty() ? Coordinates::Original : traj.snapshots.front().coords;

  std::vector<const Field*> inside;
  const double slack = 1e-9 * std::max(1.0, t_end);
  for (const Field& f : traj.snapshots) {
    if (f.t >= report.t1 - slack && f.t <= report.t2 + slack) inside.push_back(&f);
  }
  if (inside.size() < kMinSamples) {
    std::ostringstream os;
    os << "only " << inside.size() << " snapshots lie in the window [" << report.t1 << ", "
       << report.t2 << "]; at least " << kMinSamples << " are needed";
    throw InsufficientSamples(os.str());
  }

  double slowest = std::numeric_limits<double>::infinity();
  double fastest = 0.0;
  bool any = false;
  for (int s = 0; s < 3; ++s) {
    SpeciesSpeed& sp = report.species[static_cast<std::size_t>(s)];
    sp.species = s;
    const auto& lv = levels[static_cast<std::size_t>(s)];
    if (!lv) continue;
    sp.level = lv->level;
    std::vector<double> ts, xs;
    for (const Field* f : inside) {
      const auto x = front_position(f->values[static_cast<std::size_t>(s)], f->grid, lv->level,
                                    lv->band, side);
      if (!x) continue;
      ts.push_back(f->t);
      xs.push_back(*x);
      sp.samples.push_back({f->t, *x, s, lv->level});
    }
    sp.n_samples = ts.size();
    const std::string name = species_name(report.coords, s);
    if (ts.size() < kMinSamples) {
      report.warnings.push_back(name + ": fewer than 4 front crossings in the window");
      continue;
    }
    const LineFit fit = fit_line(ts, xs);
    // Left-side fronts move toward decreasing x; report the propagation speed.
    sp.speed = side == Side::Right ? fit.slope : -fit.slope;
    sp.intercept = fit.intercept;
    sp.r_squared = fit.r_squared;
    sp.measured = true;
    any = true;
    if (fit.r_squared < kRSquaredWarning) {
      report.warnings.push_back(name + ": r_squared " + fmt17(fit.r_squared) + " below 0.999");
    }
    slowest = std::min(slowest, std::abs(sp.speed));
    fastest = std::max(fastest, std::abs(sp.speed));
  }
  if (!any) throw InsufficientSamples("no species produced enough front crossings");
  report.slowest = slowest;
  report.fastest = fastest;
  return report;
}

void write_speed_csv(std::ostream& os, const SpeedReport& report) {
  os << "species,speed,intercept,r_squared,n_samples,level,t1,t2\n";
  for (const SpeciesSpeed& s : report.species) {
    if (!s.measured) continue;
    os << species_name(report.coords, s.species) << ',' << fmt17(s.speed) << ','
       << fmt17(s.intercept) << ',' << fmt17(s.r_squared) << ',' << s.n_samples << ','
       << fmt17(s.level) << ',' << fmt17(report.t1) << ',' << fmt17(report.t2) << '\n';
  }
}

}  // namespace ccm
