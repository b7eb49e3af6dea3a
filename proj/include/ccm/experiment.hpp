#pragma once

// Parameter sweeps, the reinvasion pipeline and the text/CSV reports the
// command-line tool prints.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccm/equilibria.hpp"
#include "ccm/linear_analysis.hpp"
#include "ccm/model.hpp"
#include "ccm/solver.hpp"
#include "ccm/speed.hpp"

namespace ccm {

/// Flat `key = value` text with `#` comments.  Later keys override earlier.
std::map<std::string, std::string> parse_key_values(std::istream& is);
std::map<std::string, std::string> parse_key_values_file(const std::filesystem::path& path);

/// Overrides fields of `params` from alpha/beta/gamma/a/b/m/l/L/D1/D2/D3 keys.
/// Unknown keys are left for the caller.
void apply_param_keys(const std::map<std::string, std::string>& kv, ModelParams& params);

double parse_number(const std::string& key, const std::string& text);

enum class SweepParameter { A, B, M };

std::string_view to_string(SweepParameter p);

struct Sweep {
  SweepParameter parameter = SweepParameter::B;
  std::string grid = "log";  // linear | log | list
  std::vector<double> values;
};

/// `points_per_decade` log-spaced values spanning [start, stop] inclusive.
std::vector<double> log_grid(double start, double stop, int points_per_decade = 9);
std::vector<double> linear_grid(double start, double stop, int count);

struct SimSettings {
  double length = 400.0;
  double dx = 0.1;
  double t_end = 100.0;
  double snapshot_interval = 1.0;
  double cfl = 0.4;
  Bump bump;
  SpeedWindow window;
};

struct ExperimentSpec {
  std::string name;
  Scenario scenario = Scenario::Invader;
  ModelParams params;
  Sweep sweep;
  SimSettings sim;
  bool save_trajectories = false;

  /// ConfigError on an empty or non-increasing sweep or invalid parameters.
  void validate() const;
};

std::vector<std::string> preset_names();
/// figure2, figure3a, figure3b, figure4a, figure4b.  ConfigError otherwise.
ExperimentSpec preset(const std::string& name);
ExperimentSpec spec_from_key_values(const std::map<std::string, std::string>& kv,
                                    const std::string& default_name);

/// Grid and run settings for a single simulation.
SimConfig make_sim_config(const ModelParams& params, Scenario scenario, const SimSettings& sim);

/// Species index (original coordinates) playing each role in a scenario.
struct Roles {
  int invader = 0;
  int resident = 1;
  int mutualist = 2;
};
Roles roles(Scenario scenario);

struct PointResult {
  std::size_t index = 0;
  std::string status;  // ok | not_invadable | failed
  std::string message;
  double sweep_value = 0.0;
  ModelParams params;
  InvasionClassification classification;
  std::optional<SpeedResult> linear;
  DeterminacyVerdict verdict;
  std::optional<SpeedReport> speeds;
  Diagnostics diagnostics;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<PointResult> points;
  double wall_seconds = 0.0;

  bool any_failed() const;
};

/// Runs one sweep point: classification, linear speed, verdict, simulation
/// and speed estimation.  Numerical failures are recorded in the result.
PointResult run_point(const ExperimentSpec& spec, std::size_t index, double value,
                      Trajectory* keep_trajectory = nullptr);

/// Runs every sweep point (in parallel when OpenMP is available).  When
/// `out_dir` is set writes summary.csv, meta.txt and, if requested,
/// trajectory_<i>.csv there.
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::optional<std::filesystem::path>& out_dir);

void write_summary_csv(std::ostream& os, const ExperimentResult& result);
std::vector<std::string> summary_columns();

struct PhaseResult {
  std::string name;
  ModelParams params;
  Scenario scenario = Scenario::Invader;
  InvasionClassification classification;
  std::optional<SpeedResult> linear;
  DeterminacyVerdict verdict;
  std::optional<SpeedReport> speeds;
  /// L-infinity distance of the final state to the target over the central
  /// half of the domain.
  double final_distance = 0.0;
  /// Same distance to E4 (phase 1) for reference.
  double distance_to_e4 = 0.0;
  Trajectory trajectory;
};

struct ReinvasionResult {
  PhaseResult extinction;   // resident scenario from E6
  PhaseResult reinvasion;   // invader scenario from E4 with L replaced by L'
  SimSettings sim;
  double L_prime = 0.0;
};

/// Reinvasion settings: a longer run so that both waves clear the central
/// half of the domain before the end.
SimSettings reinvasion_settings();

/// Requires a > 1 + mL, a < 1 + m L' and b < 1; ConfigError otherwise.
ReinvasionResult run_reinvasion(const ModelParams& params, double L_prime,
                                const SimSettings& sim = reinvasion_settings());

void write_reinvasion_csv(std::ostream& os, const ReinvasionResult& result);

/// L-infinity distance between a field (any coordinates) and an original
/// coordinate state over the central half of the grid.
double central_distance(const Field& field, const Vec3& target, const ModelParams& params);

/// Human-readable (or CSV) analysis: equilibria, classification, c1, mu_bar,
/// zeta1(mu_bar) and every determinacy condition.
void write_analysis(std::ostream& os, const ModelParams& params, Scenario scenario, bool csv);

/// Column documentation written into meta.txt.
std::string column_documentation();

}  // namespace ccm
