#pragma once

// Method-of-lines integration of the reaction-diffusion system on an
// interval: second-order central differences in space, classical RK4 in
// time, Dirichlet boundaries held at the source equilibrium.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ccm/kernels.hpp"
#include "ccm/model.hpp"

namespace ccm {

struct Grid {
  double length = 400.0;
  std::size_t n = 4001;

  double dx() const { return length / static_cast<double>(n - 1); }
  double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
  void validate() const;
  bool operator==(const Grid&) const = default;
};

/// Densities of the three species on a grid, in the coordinates of the system
/// that produced them (original (p1, p2, u) unless a cooperative system is
/// integrated).
struct Field {
  Grid grid;
  double t = 0.0;
  Coordinates coords = Coordinates::Original;
  std::array<std::vector<double>, 3> values;

  explicit Field(Grid g = {}, Coordinates c = Coordinates::Original);
  std::size_t size() const { return grid.n; }
  Vec3 at(std::size_t i) const { return {values[0][i], values[1][i], values[2][i]}; }
  void set(std::size_t i, const Vec3& v);
  ComponentsView view() const;
  ComponentsSpan span();
};

enum class SourceKind { Invader, Resident, Custom };

struct Bump {
  double amplitude = 1.0;
  double width = 2.0;        // standard deviation of the Gaussian
  std::optional<double> center;  // defaults to the middle of the interval
};

struct SimConfig {
  ModelParams params;
  SourceKind source = SourceKind::Invader;
  /// Custom source state (original coordinates) and invading species index.
  Vec3 custom_source{};
  int custom_species = 0;
  System system = System::CCM;
  Grid grid;
  double t_end = 100.0;
  /// Explicit snapshot times; when empty, snapshots are every
  /// `snapshot_interval` (plus t_end).
  std::vector<double> snapshot_times;
  double snapshot_interval = 1.0;
  Bump bump;
  double cfl = 0.4;
  bool clamp_negative = true;
  bool reaction_enabled = true;  // false integrates pure diffusion (testing)
  KernelMode kernel = KernelMode::Parallel;

  void validate() const;
  /// Sorted snapshot times starting at 0 and ending at t_end.
  std::vector<double> effective_snapshot_times() const;
  /// Source equilibrium in original coordinates.
  Vec3 source_state() const;
  /// Index (original coordinates) of the species the bump is added to.
  int invading_species() const;
};

SimConfig make_config(const ModelParams& params, Scenario scenario);

struct Diagnostics {
  double max_rate = 0.0;
  std::size_t clamp_count = 0;
  double dt = 0.0;
  std::size_t steps = 0;
};

struct Trajectory {
  SimConfig config;
  std::vector<Field> snapshots;
  Diagnostics diagnostics;
};

/// Largest dt allowed by  dt <= cfl dx^2 / max(D).
double max_stable_dt(const Grid& grid, const Vec3& diffusivity, double cfl);

/// Gaussian bump on the invading species over a constant source state.
/// ConfigError when the bump width is below 2 dx.
Field initial_condition(const SimConfig& config);

struct StepOptions {
  bool clamp_negative = true;
  bool reaction_enabled = true;
  KernelMode kernel = KernelMode::Parallel;
  /// Values with magnitude above this (or non-finite) raise StabilityError.
  double blowup_bound = 0.0;  // 0 picks 10x the largest equilibrium component
};

/// Allocation-reusing RK4 stepper for one system.
class Integrator {
public:
  Integrator(const ModelParams& params, System system, const Grid& grid, StepOptions options);

  /// Advances `field` in place by dt.  Throws DomainError or StabilityError.
  void step(Field& field, double dt);

  const Diagnostics& diagnostics() const { return diag_; }
  double blowup_bound() const { return options_.blowup_bound; }

private:
  void check(Field& field);

  ModelParams params_;
  System system_;
  Grid grid_;
  StepOptions options_;
  RhsContext ctx_;
  Field k1_, k2_, k3_, k4_, stage_;
  Diagnostics diag_;
};

/// Single RK4 step; convenience wrapper around Integrator.
Field step(const Field& field, const ModelParams& params, System system, double dt,
           const StepOptions& options = {});

/// 10 x the largest |component| over admissible equilibria in the given
/// coordinates (and at least 10).
double default_blowup_bound(const ModelParams& params, Coordinates coords);

Trajectory simulate(const SimConfig& config);
/// Integrates from an explicit initial field (which must match the grid and
/// the coordinates of config.system).
Trajectory simulate_from(const SimConfig& config, Field initial);

struct ComparisonResult {
  Trajectory with_mutualism;     // ResidentH
  Trajectory without_mutualism;  // ResidentH0
  double max_violation = 0.0;    // max over snapshots of (q - q0)+
  double violation_time = 0.0;
};

/// Runs h and h0 from the same initial data in resident coordinates.
ComparisonResult comparison_run(const SimConfig& config);

/// Snapshot export: `#` config echo, then `t,x,p1,p2,u` per node per snapshot
/// in original coordinates with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

/// Reads a file written by write_trajectory_csv back into original
/// coordinates.  The config echo is not parsed; the returned trajectory only
/// carries grid, t_end and snapshots.
Trajectory read_trajectory_csv(std::istream& is);

/// Comment lines (without the leading '#') describing a config.
std::vector<std::string> describe_config(const SimConfig& config);

}  // namespace ccm
