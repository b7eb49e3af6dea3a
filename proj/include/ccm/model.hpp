#pragma once

// Competitor-competitor-mutualist reaction terms in original and cooperative
// coordinates, their Jacobians, and the affine maps between coordinate sets.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace ccm {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

struct ModelParams {
  double alpha = 1.0;  // growth rate of competitor 1
  double beta = 1.0;   // growth rate of competitor 2
  double gamma = 1.0;  // growth rate of the mutualist
  double a = 0.0;      // competition of 2 on 1
  double b = 0.0;      // competition of 1 on 2
  double m = 0.0;      // mutualist relief of competition on 1
  double l = 0.0;      // contribution of 1 to the mutualist carrying capacity
  double L = 1.0;      // self-carrying capacity of the mutualist
  double D1 = 1.0;
  double D2 = 1.0;
  double D3 = 1.0;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  /// The fixed rates used throughout the numerical experiments:
  /// l = 9/20, L = 1/3, unit growth rates and unit diffusivities.
  static ModelParams baseline(double a, double b, double m);

  bool operator==(const ModelParams&) const = default;
};

/// Which reaction vector field is evaluated.
enum class System {
  CCM,         // original densities (p1, p2, u)
  InvaderG,    // cooperative form around E4, mutualist helps the invader
  ResidentH,   // cooperative form around E6, mutualist helps the resident
  ResidentH0,  // ResidentH with m = 0 (comparison system)
};

enum class Scenario { Invader, Resident };

/// Coordinate set a state vector is expressed in.
enum class Coordinates { Original, Invader, Resident };

std::string_view to_string(System s);
std::string_view to_string(Scenario s);
std::string_view to_string(Coordinates c);
System parse_system(std::string_view s);
Scenario parse_scenario(std::string_view s);

Coordinates coordinates_of(System s);

struct StateVec {
  double p1 = 0.0;
  double p2 = 0.0;
  double u = 0.0;  // p3

  Vec3 values() const { return {p1, p2, u}; }
  static StateVec from(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

struct TransformedState {
  double q1 = 0.0;
  double q2 = 0.0;
  double v = 0.0;  // q3
  Scenario tag = Scenario::Invader;

  Vec3 values() const { return {q1, q2, v}; }
};

TransformedState to_transformed(Scenario scenario, const StateVec& p,
                                const ModelParams& params);
StateVec to_original(const TransformedState& q, const ModelParams& params);

/// Raw affine maps on 3-vectors.
Vec3 to_transformed(Scenario scenario, const Vec3& p, const ModelParams& params);
Vec3 to_original(Scenario scenario, const Vec3& q, const ModelParams& params);

/// Converts between any two coordinate sets by way of the original one.
Vec3 convert(Coordinates from, Coordinates to, const Vec3& x, const ModelParams& params);

/// Diffusion coefficients in the species order of the system.  The resident
/// transform swaps the two competitors, so the first two entries swap too.
Vec3 diffusivities(System s, const ModelParams& params);

/// Reaction rates.  Throws DomainError when a denominator is within 1e-12 of
/// zero or negative.
Vec3 reaction(System s, const Vec3& x, const ModelParams& params);
Vec3 reaction(const StateVec& p, const ModelParams& params);
Vec3 reaction(System s, const TransformedState& q, const ModelParams& params);

/// Analytic Jacobian d(reaction_i)/d(x_j).  Same domain checks as reaction().
Mat3 jacobian(System s, const Vec3& x, const ModelParams& params);

struct CooperativityReport {
  double min_off_diagonal = 0.0;
  Vec3 witness{};
  std::size_t row = 0;
  std::size_t col = 0;
  std::size_t samples = 0;
};

/// Smallest off-diagonal Jacobian entry over a Halton sample of the box
/// [0, corner] (origin included).
CooperativityReport cooperativity_report(System s, const ModelParams& params,
                                         const Vec3& corner, std::size_t n_samples);

namespace detail {

inline constexpr double kDenominatorGuard = 1e-12;

/// Unchecked pointwise evaluation used by the grid kernels.  Returns false if
/// any denominator failed the guard; `out` is then unspecified.
inline bool reaction_pointwise(System s, double x0, double x1, double x2,
                               const ModelParams& p, double* out) noexcept {
  switch (s) {
    case System::CCM: {
      const double d1 = 1.0 + p.m * x2;
      const double d3 = p.L + p.l * x0;
      out[0] = p.alpha * x0 * (1.0 - x0 - p.a * x1 / d1);
      out[1] = p.beta * x1 * (1.0 - x1 - p.b * x0);
      out[2] = p.gamma * x2 * (1.0 - x2 / d3);
      return d1 > kDenominatorGuard && d3 > kDenominatorGuard;
    }
    case System::InvaderG: {
      const double d1 = 1.0 + p.m * p.L + p.m * x2;
      const double d3 = p.L + p.l * x0;
      const double w = x2 + p.L;
      out[0] = p.alpha * x0 * (1.0 - x0 + p.a * (x1 - 1.0) / d1);
      out[1] = p.beta * (1.0 - x1) * (p.b * x0 - x1);
      out[2] = p.gamma * w * (1.0 - w / d3);
      return d1 > kDenominatorGuard && d3 > kDenominatorGuard;
    }
    case System::ResidentH:
    case System::ResidentH0: {
      const double m = s == System::ResidentH ? p.m : 0.0;
      const double d2 = 1.0 + m * p.L + m * p.l - m * x2;
      const double d3 = p.L + p.l - p.l * x1;
      const double w = p.L + p.l - x2;
      out[0] = p.beta * x0 * (1.0 - p.b - x0 + p.b * x1);
      out[1] = p.alpha * (1.0 - x1) * (p.a * x0 / d2 - x1);
      out[2] = p.gamma * w * (w / d3 - 1.0);
      return d2 > kDenominatorGuard && d3 > kDenominatorGuard;
    }
  }
  return false;
}

}  // namespace detail

}  // namespace ccm
