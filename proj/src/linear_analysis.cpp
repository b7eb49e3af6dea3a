#include "ccm/linear_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ccm/csv.hpp"
#include "ccm/equilibria.hpp"
#include "ccm/errors.hpp"

namespace ccm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDegeneracyTolerance = 1e-12;
constexpr double kEqualityTolerance = 1e-12;

System cooperative_system(Scenario s) {
  return s == Scenario::Invader ? System::InvaderG : System::ResidentH;
}

Condition make_condition(std::string name, double lhs, double rhs, bool strict) {
  Condition c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.strict = strict;
  c.holds = strict ? lhs < rhs : lhs <= rhs;
  return c;
}

}  // namespace

std::array<GrowthCoefficient, 3> growth_coefficients(Scenario scenario,
                                                      const ModelParams& p) {
  if (scenario == Scenario::Invader) {
    return {{{p.alpha * (1.0 - p.a / (1.0 + p.m * p.L)), p.D1},
             {-p.beta, p.D2},
             {-p.gamma, p.D3}}};
  }
  return {{{p.beta * (1.0 - p.b), p.D2}, {-p.alpha, p.D1}, {-p.gamma, p.D3}}};
}

Vec3 block_eigenvalues(Scenario scenario, const ModelParams& params, double mu) {
  if (!(mu >= 0.0)) throw DomainError("block_eigenvalues requires mu >= 0");
  const auto g = growth_coefficients(scenario, params);
  const double mu2 = mu * mu;
  return {g[0].r + g[0].D * mu2, g[1].r + g[1].D * mu2, g[2].r + g[2].D * mu2};
}

Mat3 linearization_matrix(Scenario scenario, const ModelParams& params, double mu) {
  const System s = cooperative_system(scenario);
  Mat3 C = jacobian(s, Vec3{0.0, 0.0, 0.0}, params);
  const Vec3 D = diffusivities(s, params);
  for (std::size_t i = 0; i < 3; ++i) C[i][i] += mu * mu * D[i];
  return C;
}

Vec3 principal_eigenvector(Scenario scenario, const ModelParams& p, double mu) {
  const Vec3 g = block_eigenvalues(scenario, p, mu);
  const double scale =
      std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2]), std::numeric_limits<double>::min()});
  const double d12 = g[0] - g[1];
  const double d13 = g[0] - g[2];
  if (std::abs(d12) <= kDegeneracyTolerance * scale ||
      std::abs(d13) <= kDegeneracyTolerance * scale) {
    throw DegenerateEigenvalue("gamma_1 coincides with another block eigenvalue");
  }
  if (scenario == Scenario::Invader) {
    return {d12 * d13, p.beta * p.b * d13, p.gamma * p.l * d12};
  }
  const double k = p.alpha * p.a / (1.0 + p.m * p.L + p.m * p.l);
  return {d12 * d13, k * d13, k * p.gamma * p.l};
}

SpeedResult linear_speed(Scenario scenario, const ModelParams& params) {
  const auto g = growth_coefficients(scenario, params);
  if (!(g[0].r > 0.0)) {
    throw NotInvadable("principal growth rate gamma_1(0) is not positive", g[0].r);
  }
  return {2.0 * std::sqrt(g[0].r * g[0].D), std::sqrt(g[0].r / g[0].D)};
}

SpeedResult numeric_min_speed(double r, double D) {
  if (!(r > 0.0)) throw DomainError("numeric_min_speed requires r > 0 (infimum is 0 otherwise)");
  if (!(D > 0.0)) throw DomainError("numeric_min_speed requires D > 0");
  const auto objective = [&](double mu) { return r / mu + D * mu; };

  double hi = 1.0;
  for (int i = 0; i < 1100 && objective(2.0 * hi) <= objective(hi); ++i) hi *= 2.0;
  hi *= 2.0;
  double lo = std::numeric_limits<double>::min();

  // The derivative D - r / mu^2 is increasing; its sign is that of D mu^2 - r.
  for (int i = 0; i < 4000; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (D * mid * mid < r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mu = objective(lo) <= objective(hi) ? lo : hi;
  return {objective(mu), mu};
}

const Condition& DeterminacyVerdict::condition(const std::string& name) const {
  for (const Condition& c : conditions) {
    if (c.name == name) return c;
  }
  throw DomainError("no determinacy condition named '" + name + "'");
}

DeterminacyVerdict check_linear_determinacy(Scenario scenario, const ModelParams& p) {
  DeterminacyVerdict v;
  v.scenario = scenario;
  const double K = 1.0 + p.m * p.L;

  if (scenario == Scenario::Invader) {
    const double theta = 1.0 - p.a / K;
    const bool invadable = p.a < K;
    v.conditions.push_back(make_condition("a_lt_1pmL", p.a, K, true));
    v.conditions.push_back(make_condition("D2_le_2D1", p.D2, 2.0 * p.D1, false));
    const double d3_rhs = invadable ? 2.0 * p.D1 + (p.gamma / p.alpha) / theta * p.D1 : kNaN;
    v.conditions.push_back(make_condition("D3_bound", p.D3, d3_rhs, true));

    double lhs18 = kNaN;
    double rhs18 = kNaN;
    if (invadable) {
      const double two_minus_d2 = 2.0 - p.D2 / p.D1;
      const double two_minus_d3 = 2.0 - p.D3 / p.D1;
      // Second cone inequality at zeta1(mu_bar), divided through by
      // beta * theta; the mutualist term keeps its 1/theta factor.
      lhs18 = (p.a * p.b - K) / (K - p.a);
      rhs18 = p.alpha / p.beta * two_minus_d2 -
              (p.gamma / p.beta) * (p.m * p.a * p.l / (K * K)) / theta *
                  (p.alpha * two_minus_d2 * theta + p.beta) /
                  (p.alpha * two_minus_d3 * theta + p.gamma);
    }
    v.conditions.push_back(make_condition("ineq18", lhs18, rhs18, false));

    v.linear_determinate = std::all_of(v.conditions.begin(), v.conditions.end(),
                                       [](const Condition& c) { return c.holds; });
    v.speed_bound_only = invadable && !v.linear_determinate;
    v.note = invadable ? (v.linear_determinate ? "single spreading speed c1"
                                               : "only c* >= c1 is guaranteed")
                       : "not invadable";
    return v;
  }

  const bool invadable = p.b < 1.0;
  v.conditions.push_back(make_condition("b_lt_1", p.b, 1.0, true));
  v.conditions.push_back(make_condition("D1_le_2D2", p.D1, 2.0 * p.D2, false));
  const double lhs28 = invadable ? (p.a * p.b - 1.0) / (1.0 - p.b) : kNaN;
  const double rhs28 = p.beta / p.alpha * (2.0 - p.D1 / p.D2);
  v.conditions.push_back(make_condition("ineq28", lhs28, rhs28, false));

  Condition exact;
  exact.name = "D3_eq_2D2";
  exact.lhs = p.D3;
  exact.rhs = 2.0 * p.D2;
  exact.holds = std::abs(p.D3 - 2.0 * p.D2) <= kEqualityTolerance * 2.0 * p.D2;
  v.conditions.push_back(exact);
  v.direct_cone_route = exact.holds;

  v.first_two_at_c1 = v.conditions[0].holds && v.conditions[1].holds && v.conditions[2].holds;
  bool coexistence_target = false;
  if (invadable) {
    const InvasionClassification c = classify_invasion(p, Scenario::Resident);
    coexistence_target = c.target && c.target->label == EquilibriumLabel::E7Plus;
  }
  v.linear_determinate = v.first_two_at_c1 && coexistence_target;
  v.speed_bound_only = invadable && !v.first_two_at_c1;
  if (!invadable) {
    v.note = "not invadable";
  } else if (v.linear_determinate) {
    v.note = "single spreading speed c1 via comparison with the m = 0 system";
  } else if (v.first_two_at_c1) {
    v.note = "invader and resident spread at c1; mutualist not covered";
  } else {
    v.note = "only c* >= c1 is guaranteed";
  }
  if (invadable && !v.direct_cone_route) {
    v.note += "; direct cone condition fails unless D3 = 2 D2";
  }
  return v;
}

ConeCheck cone_condition(Scenario scenario, const Vec3& xi, const ModelParams& p) {
  for (double x : xi) {
    if (!(x > 0.0)) throw DomainError("cone_condition requires xi >> 0");
  }
  ConeCheck c;
  if (scenario == Scenario::Invader) {
    const double K = 1.0 + p.m * p.L;
    c.residual[0] = xi[0] - (p.a * xi[1] / K + p.a * p.m * xi[2] / (K * K));
    c.residual[1] = p.b * xi[0] - xi[1];
    c.residual[2] = 0.0;  // the third component always holds
    c.required = {true, true, false};
    c.holds = c.residual[0] >= 0.0 && c.residual[1] >= 0.0;
    return c;
  }
  const double Kr = 1.0 + p.m * p.L + p.m * p.l;
  c.residual[0] = xi[0] - p.b * xi[1];
  c.residual[1] = xi[1] * (p.a * xi[0] / Kr - xi[1]) - p.a * p.m * xi[0] * xi[2] / (Kr * Kr);
  const double scale = std::max(xi[2], p.l * xi[1]);
  c.residual[2] = -std::abs(xi[2] - p.l * xi[1]) / scale;
  c.required = {false, false, true};
  c.holds = c.residual[2] >= -kEqualityTolerance;
  return c;
}

void write_verdict_csv(std::ostream& os, const DeterminacyVerdict& verdict) {
  os << "condition,lhs,rhs,residual,pass\n";
  for (const Condition& c : verdict.conditions) {
    os << c.name << ',' << fmt17(c.lhs) << ',' << fmt17(c.rhs) << ',' << fmt17(c.residual())
       << ',' << fmt_bool(c.holds) << '\n';
  }
}

}  // namespace ccm
