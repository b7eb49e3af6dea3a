#include "ccm/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ccm/errors.hpp"

namespace ccm {

namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    std::ostringstream os;
    os << "parameter " << name << " must be finite and > 0 (got " << v << ")";
    throw ConfigError(os.str());
  }
}

void require_nonnegative(double v, const char* name) {
  if (!std::isfinite(v) || !(v >= 0.0)) {
    std::ostringstream os;
    os << "parameter " << name << " must be finite and >= 0 (got " << v << ")";
    throw ConfigError(os.str());
  }
}

// Radical inverse in the given base; building block of the Halton sequence.
double radical_inverse(std::size_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

[[noreturn]] void throw_domain(System s, const Vec3& x) {
  std::ostringstream os;
  os.precision(17);
  os << "state (" << x[0] << ", " << x[1] << ", " << x[2] << ") is outside the domain of "
     << to_string(s) << " (singular denominator)";
  throw DomainError(os.str());
}

}  // namespace

void ModelParams::validate() const {
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  require_positive(gamma, "gamma");
  require_positive(L, "L");
  require_positive(D1, "D1");
  require_positive(D2, "D2");
  require_positive(D3, "D3");
  require_nonnegative(a, "a");
  require_nonnegative(b, "b");
  require_nonnegative(m, "m");
  require_nonnegative(l, "l");
}

ModelParams ModelParams::baseline(double a, double b, double m) {
  ModelParams p;
  p.a = a;
  p.b = b;
  p.m = m;
  p.l = 9.0 / 20.0;
  p.L = 1.0 / 3.0;
  return p;
}

std::string_view to_string(System s) {
  switch (s) {
    case System::CCM: return "ccm";
    case System::InvaderG: return "invader_g";
    case System::ResidentH: return "resident_h";
    case System::ResidentH0: return "resident_h0";
  }
  return "?";
}

std::string_view to_string(Scenario s) {
  return s == Scenario::Invader ? "invader" : "resident";
}

std::string_view to_string(Coordinates c) {
  switch (c) {
    case Coordinates::Original: return "original";
    case Coordinates::Invader: return "invader";
    case Coordinates::Resident: return "resident";
  }
  return "?";
}

System parse_system(std::string_view s) {
  if (s == "ccm") return System::CCM;
  if (s == "invader_g") return System::InvaderG;
  if (s == "resident_h") return System::ResidentH;
  if (s == "resident_h0") return System::ResidentH0;
  throw ConfigError("unknown system '" + std::string(s) + "'");
}

Scenario parse_scenario(std::string_view s) {
  if (s == "invader") return Scenario::Invader;
  if (s == "resident") return Scenario::Resident;
  throw ConfigError("unknown scenario '" + std::string(s) + "'");
}

Coordinates coordinates_of(System s) {
  switch (s) {
    case System::CCM: return Coordinates::Original;
    case System::InvaderG: return Coordinates::Invader;
    case System::ResidentH:
    case System::ResidentH0: return Coordinates::Resident;
  }
  return Coordinates::Original;
}

Vec3 to_transformed(Scenario scenario, const Vec3& p, const ModelParams& params) {
  if (scenario == Scenario::Invader) {
    return {p[0], 1.0 - p[1], p[2] - params.L};
  }
  return {p[1], 1.0 - p[0], params.L + params.l - p[2]};
}

Vec3 to_original(Scenario scenario, const Vec3& q, const ModelParams& params) {
  if (scenario == Scenario::Invader) {
    return {q[0], 1.0 - q[1], q[2] + params.L};
  }
  return {1.0 - q[1], q[0], params.L + params.l - q[2]};
}

TransformedState to_transformed(Scenario scenario, const StateVec& p,
                                const ModelParams& params) {
  const Vec3 q = to_transformed(scenario, p.values(), params);
  return {q[0], q[1], q[2], scenario};
}

StateVec to_original(const TransformedState& q, const ModelParams& params) {
  return StateVec::from(to_original(q.tag, q.values(), params));
}

Vec3 convert(Coordinates from, Coordinates to, const Vec3& x, const ModelParams& params) {
  if (from == to) return x;
  Vec3 p = x;
  if (from == Coordinates::Invader) p = to_original(Scenario::Invader, x, params);
  if (from == Coordinates::Resident) p = to_original(Scenario::Resident, x, params);
  if (to == Coordinates::Invader) return to_transformed(Scenario::Invader, p, params);
  if (to == Coordinates::Resident) return to_transformed(Scenario::Resident, p, params);
  return p;
}

Vec3 diffusivities(System s, const ModelParams& params) {
  if (coordinates_of(s) == Coordinates::Resident) {
    return {params.D2, params.D1, params.D3};
  }
  return {params.D1, params.D2, params.D3};
}

Vec3 reaction(System s, const Vec3& x, const ModelParams& params) {
  Vec3 out{};
  if (!detail::reaction_pointwise(s, x[0], x[1], x[2], params, out.data())) {
    throw_domain(s, x);
  }
  return out;
}

Vec3 reaction(const StateVec& p, const ModelParams& params) {
  return reaction(System::CCM, p.values(), params);
}

Vec3 reaction(System s, const TransformedState& q, const ModelParams& params) {
  const Coordinates expected =
      q.tag == Scenario::Invader ? Coordinates::Invader : Coordinates::Resident;
  if (coordinates_of(s) != expected) {
    throw DomainError("transformed state tag does not match the coordinates of " +
                      std::string(to_string(s)));
  }
  return reaction(s, q.values(), params);
}

Mat3 jacobian(System s, const Vec3& x, const ModelParams& p) {
  Vec3 scratch{};
  if (!detail::reaction_pointwise(s, x[0], x[1], x[2], p, scratch.data())) {
    throw_domain(s, x);
  }
  Mat3 J{};
  switch (s) {
    case System::CCM: {
      // f1 = alpha p1 (1 - p1 - a p2 / d),  d = 1 + m u
      // f2 = beta p2 (1 - p2 - b p1)
      // f3 = gamma u (1 - u / s),           s = L + l p1
      const double p1 = x[0], p2 = x[1], u = x[2];
      const double d = 1.0 + p.m * u;
      const double sc = p.L + p.l * p1;
      J[0][0] = p.alpha * (1.0 - 2.0 * p1 - p.a * p2 / d);
      J[0][1] = -p.alpha * p.a * p1 / d;
      J[0][2] = p.alpha * p.a * p.m * p1 * p2 / (d * d);
      J[1][0] = -p.beta * p.b * p2;
      J[1][1] = p.beta * (1.0 - 2.0 * p2 - p.b * p1);
      J[1][2] = 0.0;
      J[2][0] = p.gamma * p.l * u * u / (sc * sc);
      J[2][1] = 0.0;
      J[2][2] = p.gamma * (1.0 - 2.0 * u / sc);
      break;
    }
    case System::InvaderG: {
      // Entry by entry as in the invader-coordinate Jacobian; with the
      // substitution (q1, q2, v) = (p1, 1 - p2, u - L) it equals
      // diag(1,-1,1) * J_CCM * diag(1,-1,1).
      const double q1 = x[0], q2 = x[1], v = x[2];
      const double d = 1.0 + p.m * p.L + p.m * v;
      const double w = v + p.L;
      const double sc = p.L + p.l * q1;
      J[0][0] = p.alpha * (1.0 - 2.0 * q1 + p.a * (q2 - 1.0) / d);
      J[0][1] = p.alpha * p.a * q1 / d;
      J[0][2] = p.alpha * p.m * p.a * q1 * (1.0 - q2) / (d * d);
      J[1][0] = p.beta * p.b * (1.0 - q2);
      J[1][1] = p.beta * (2.0 * q2 - p.b * q1 - 1.0);
      J[1][2] = 0.0;
      J[2][0] = p.gamma * p.l * w * w / (sc * sc);
      J[2][1] = 0.0;
      J[2][2] = p.gamma * (1.0 - 2.0 * w / sc);
      break;
    }
    case System::ResidentH:
    case System::ResidentH0: {
      // (q1, q2, v) = (p2, 1 - p1, L + l - u): rows and columns of J_CCM are
      // swapped in the first two indices and conjugated by diag(1,-1,-1).
      const double m = s == System::ResidentH ? p.m : 0.0;
      const double q1 = x[0], q2 = x[1], v = x[2];
      const double d = 1.0 + m * p.L + m * p.l - m * v;
      const double w = p.L + p.l - v;
      const double sc = p.L + p.l - p.l * q2;
      J[0][0] = p.beta * (1.0 - p.b - 2.0 * q1 + p.b * q2);
      J[0][1] = p.beta * p.b * q1;
      J[0][2] = 0.0;
      J[1][0] = p.alpha * p.a * (1.0 - q2) / d;
      J[1][1] = -p.alpha * (1.0 - 2.0 * q2 + p.a * q1 / d);
      J[1][2] = p.alpha * m * p.a * q1 * (1.0 - q2) / (d * d);
      J[2][0] = 0.0;
      J[2][1] = p.gamma * p.l * w * w / (sc * sc);
      J[2][2] = p.gamma * (1.0 - 2.0 * w / sc);
      break;
    }
  }
  return J;
}

CooperativityReport cooperativity_report(System s, const ModelParams& params,
                                         const Vec3& corner, std::size_t n_samples) {
  if (n_samples < 1) throw DomainError("cooperativity_report needs at least one sample");
  for (double c : corner) {
    if (!(c >= 0.0)) throw DomainError("region corner must be componentwise >= 0");
  }
  CooperativityReport report;
  report.min_off_diagonal = std::numeric_limits<double>::infinity();
  report.samples = n_samples;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const Vec3 x{corner[0] * radical_inverse(i, 2), corner[1] * radical_inverse(i, 3),
                 corner[2] * radical_inverse(i, 5)};
    const Mat3 J = jacobian(s, x, params);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) {
        if (r != c && J[r][c] < report.min_off_diagonal) {
          report.min_off_diagonal = J[r][c];
          report.witness = x;
          report.row = r;
          report.col = c;
        }
      }
    }
  }
  return report;
}

}  // namespace ccm
