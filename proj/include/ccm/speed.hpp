#pragma once

// Front tracking by level crossings and least-squares speed fits.

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccm/model.hpp"
#include "ccm/solver.hpp"

namespace ccm {

enum class Side { Right, Left };

/// Values a species takes ahead of (source) and behind (target) its front.
struct LevelBand {
  double source = 0.0;
  double target = 0.0;

  double midpoint() const { return 0.5 * (source + target); }
  bool strictly_inside(double level) const;
};

/// Outermost crossing of `level`, scanning from the chosen end toward the
/// centre and interpolating linearly between the bracketing nodes.  Empty if
/// the profile never crosses.  LevelError unless level lies strictly inside
/// the band.
std::optional<double> front_position(std::span<const double> profile, const Grid& grid,
                                     double level, LevelBand band, Side side = Side::Right);

struct SpeciesLevel {
  double level = 0.0;
  LevelBand band;
};

using SpeciesLevels = std::array<std::optional<SpeciesLevel>, 3>;

/// Midpoint levels between source and target; species whose two values agree
/// to 1e-9 have no front and get no level.
SpeciesLevels default_levels(const Vec3& source, const Vec3& target);

/// Midpoint levels for a scenario, in the given coordinates.  Throws
/// NotInvadable when the scenario has no target.
SpeciesLevels scenario_levels(const ModelParams& params, Scenario scenario,
                              Coordinates coords = Coordinates::Original);

struct FrontSample {
  double t = 0.0;
  double x = 0.0;
  int species = 0;
  double level = 0.0;
};

struct SpeciesSpeed {
  int species = 0;
  bool measured = false;
  double speed = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_samples = 0;
  double level = 0.0;
  std::vector<FrontSample> samples;
};

struct SpeedReport {
  std::array<SpeciesSpeed, 3> species;
  double slowest = 0.0;  // min |speed| over measured species
  double fastest = 0.0;  // max |speed| over measured species
  double t1 = 0.0;
  double t2 = 0.0;
  Coordinates coords = Coordinates::Original;
  std::vector<std::string> warnings;
};

struct SpeedWindow {
  double begin = 0.5;  // fractions of t_end
  double end = 0.9;
};

/// Fits x(t) = speed * t + intercept per species over snapshots inside the
/// window.  Throws InsufficientSamples when fewer than 4 snapshots fall in
/// the window or no species yields 4 crossings; a single species short of
/// samples is reported unmeasured with a warning.
SpeedReport estimate_speeds(const Trajectory& trajectory, const SpeciesLevels& levels,
                            SpeedWindow window = {}, Side side = Side::Right);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(std::span<const double> t, std::span<const double> x);

std::string species_name(Coordinates coords, int species);

/// Rows `species,speed,intercept,r_squared,n_samples,level,t1,t2` for the
/// measured species, header included.
void write_speed_csv(std::ostream& os, const SpeedReport& report);

}  // namespace ccm
