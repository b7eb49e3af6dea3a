#pragma once

// Linearization at the source equilibrium (the origin of the cooperative
// coordinates).  In both scenarios f'(0) is lower-triangular, so the block
// eigenvalues of C(mu) = f'(0) + mu^2 D are its diagonal entries
// gamma_i(mu) = r_i + D_i mu^2.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ccm/model.hpp"

namespace ccm {

struct GrowthCoefficient {
  double r = 0.0;  // gamma_i(0)
  double D = 0.0;  // diffusivity of the block
};

std::array<GrowthCoefficient, 3> growth_coefficients(Scenario scenario,
                                                      const ModelParams& params);

Vec3 block_eigenvalues(Scenario scenario, const ModelParams& params, double mu);

/// C(mu) assembled from the analytic Jacobian of the cooperative system at
/// the origin.
Mat3 linearization_matrix(Scenario scenario, const ModelParams& params, double mu);

/// Closed-form eigenvector of C(mu) for gamma_1(mu).  Throws
/// DegenerateEigenvalue when gamma_1 is within 1e-12 * scale of another
/// block eigenvalue.
Vec3 principal_eigenvector(Scenario scenario, const ModelParams& params, double mu);

struct SpeedResult {
  double c = 0.0;
  double mu_bar = 0.0;
};

/// c1 = 2 sqrt(r1 D), attained at mu_bar = sqrt(r1 / D).  Throws NotInvadable
/// when r1 <= 0.
SpeedResult linear_speed(Scenario scenario, const ModelParams& params);

/// inf over mu > 0 of (r + D mu^2) / mu found numerically, by bisection on
/// the derivative after doubling the upper bracket until the objective
/// increases.  Throws DomainError unless r > 0 and D > 0.
SpeedResult numeric_min_speed(double r, double D);

struct Condition {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool strict = false;  // lhs < rhs rather than lhs <= rhs
  bool holds = false;

  double residual() const { return lhs - rhs; }
};

struct DeterminacyVerdict {
  Scenario scenario = Scenario::Invader;
  std::vector<Condition> conditions;
  /// Invader: every condition holds.  Resident: the first two components
  /// spread at c1 and the target is E7plus.
  bool linear_determinate = false;
  /// Resident only: invader and resident spread (recede) at c1, mutualist
  /// not covered.
  bool first_two_at_c1 = false;
  /// Only the lower bound c* >= c1 is established.
  bool speed_bound_only = false;
  /// Resident only: the direct cone-condition route is open (D3 = 2 D2).
  bool direct_cone_route = false;
  std::string note;

  const Condition& condition(const std::string& name) const;
};

DeterminacyVerdict check_linear_determinacy(Scenario scenario, const ModelParams& params);

struct ConeCheck {
  bool holds = false;
  /// Per component of the reaction; >= 0 means satisfied.  For the resident
  /// third component this is -|xi3 - l xi2| / scale.
  Vec3 residual{};
  /// Which components enter `holds`.
  std::array<bool, 3> required{};
};

/// Whether f(rho xi) <= rho f'(0) xi holds for all rho > 0, decided in
/// closed form.  Invader: both component inequalities.  Resident: the third
/// component equality xi3 = l xi2; the first two components are reported at
/// rho -> 0+ but not required.  Throws DomainError unless xi >> 0.
ConeCheck cone_condition(Scenario scenario, const Vec3& xi, const ModelParams& params);

/// Rows `condition,lhs,rhs,residual,pass`, header included.
void write_verdict_csv(std::ostream& os, const DeterminacyVerdict& verdict);

}  // namespace ccm
