#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccm/model.hpp"

namespace ccm {

enum class EquilibriumLabel { E0, E1, E2, E3, E4, E5, E6, E7Plus, E7Minus };

inline constexpr std::size_t kEquilibriumCount = 9;

std::string_view to_string(EquilibriumLabel label);

/// Coordinates within this distance of zero from below count as zero.
inline constexpr double kAdmissibilityTolerance = 1e-12;

struct Equilibrium {
  EquilibriumLabel label = EquilibriumLabel::E0;
  StateVec coords;
  bool defined = true;  // false when the formula has no finite value (e.g. E5 at ab = 1)
  bool admissible = false;
  std::vector<EquilibriumLabel> coincides_with;
};

/// Roots of  ml z^2 + B z - (1 + mL - a) = 0  with B = 1 + mL - ml - ab.
struct CoexistenceRoots {
  double B = 0.0;
  double disc = 0.0;
  std::optional<double> z_plus;
  std::optional<double> z_minus;
  bool degenerate = false;  // ml = 0: the equation is linear
};

CoexistenceRoots coexistence_roots(const ModelParams& params);

/// E0..E7- in label order.
std::array<Equilibrium, kEquilibriumCount> enumerate_equilibria(const ModelParams& params);

const Equilibrium& find(const std::array<Equilibrium, kEquilibriumCount>& all,
                        EquilibriumLabel label);

struct A1Threshold {
  double a1 = 0.0;
  double a2 = 0.0;
};

/// Roots a1 < a2 of the discriminant viewed as a quadratic in a.
/// Requires b < 1 and ml > 0, else DomainError.
A1Threshold a1_threshold(const ModelParams& params);

/// The resident-scenario gate ml > (1 + mL)(1 - b) under which a1 governs
/// admissibility of E7+- above a = 1 + mL.
bool a1_gate_active(const ModelParams& params);

struct InvasionClassification {
  Scenario scenario = Scenario::Invader;
  Equilibrium source;
  std::optional<Equilibrium> target;  // empty when not invadable
  bool invadable = false;
  double gamma1_at_zero = 0.0;
  bool boundary_equilibria_present = false;
  bool single_speed_guaranteed = false;
  std::string note;
};

/// Source, target and single-speed status for a scenario.  A non-invadable
/// source is reported through `invadable = false`, not by throwing.
InvasionClassification classify_invasion(const ModelParams& params, Scenario scenario);

struct TransformedEquilibrium {
  std::string label;  // "F0".."F7minus" or "G0".."G7minus"
  EquilibriumLabel source_label = EquilibriumLabel::E0;
  Vec3 coords{};
  bool defined = true;
  bool admissible = false;
};

std::vector<TransformedEquilibrium> transformed_equilibria(const ModelParams& params,
                                                           Scenario scenario);

/// CSV rows `label,p1,p2,u,admissible`, header included.
void write_equilibria_csv(std::ostream& os,
                          const std::array<Equilibrium, kEquilibriumCount>& all);

}  // namespace ccm
