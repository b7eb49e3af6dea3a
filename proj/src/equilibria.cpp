#include "ccm/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "ccm/csv.hpp"
#include "ccm/errors.hpp"

namespace ccm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kCoincidenceTolerance = 1e-9;

bool finite(const StateVec& s) {
  return std::isfinite(s.p1) && std::isfinite(s.p2) && std::isfinite(s.u);
}

// Clamps tiny negative undershoot to zero; returns admissibility.
bool admit(StateVec& s) {
  if (!finite(s)) return false;
  bool ok = true;
  for (double* c : {&s.p1, &s.p2, &s.u}) {
    if (*c < 0.0) {
      if (*c >= -kAdmissibilityTolerance) {
        *c = 0.0;
      } else {
        ok = false;
      }
    }
  }
  return ok;
}

double max_abs_diff(const StateVec& x, const StateVec& y) {
  return std::max({std::abs(x.p1 - y.p1), std::abs(x.p2 - y.p2), std::abs(x.u - y.u)});
}

double max_abs(const StateVec& x) {
  return std::max({std::abs(x.p1), std::abs(x.p2), std::abs(x.u)});
}

}  // namespace

std::string_view to_string(EquilibriumLabel label) {
  switch (label) {
    case EquilibriumLabel::E0: return "E0";
    case EquilibriumLabel::E1: return "E1";
    case EquilibriumLabel::E2: return "E2";
    case EquilibriumLabel::E3: return "E3";
    case EquilibriumLabel::E4: return "E4";
    case EquilibriumLabel::E5: return "E5";
    case EquilibriumLabel::E6: return "E6";
    case EquilibriumLabel::E7Plus: return "E7plus";
    case EquilibriumLabel::E7Minus: return "E7minus";
  }
  return "?";
}

CoexistenceRoots coexistence_roots(const ModelParams& p) {
  CoexistenceRoots r;
  const double ml = p.m * p.l;
  const double free_term = -(1.0 + p.m * p.L - p.a);
  r.B = 1.0 + p.m * p.L - ml - p.a * p.b;
  r.disc = r.B * r.B + 4.0 * ml * (1.0 + p.m * p.L - p.a);

  if (ml == 0.0) {
    r.degenerate = true;
    if (r.B != 0.0) r.z_plus = -free_term / r.B;
    return r;
  }

  // A discriminant lost to rounding at a double root (a = a1, say) is a tie.
  const double disc_scale = r.B * r.B + std::abs(4.0 * ml * free_term);
  double disc = r.disc;
  if (disc < 0.0 && disc >= -1e-14 * disc_scale) disc = 0.0;
  if (disc < 0.0) return r;

  // Larger-magnitude root first, the other from the product of roots.
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (r.B + std::copysign(sq, r.B));
  double z1 = 0.0;
  double z2 = 0.0;
  if (q != 0.0) {
    z1 = q / ml;
    z2 = free_term / q;
  }
  r.z_plus = std::max(z1, z2);
  r.z_minus = std::min(z1, z2);
  return r;
}

std::array<Equilibrium, kEquilibriumCount> enumerate_equilibria(const ModelParams& p) {
  std::array<Equilibrium, kEquilibriumCount> eq;
  const auto set = [&](EquilibriumLabel label, double p1, double p2, double u) {
    Equilibrium& e = eq[static_cast<std::size_t>(label)];
    e.label = label;
    e.coords = {p1, p2, u};
    e.defined = finite(e.coords);
    e.admissible = admit(e.coords);
  };

  set(EquilibriumLabel::E0, 0.0, 0.0, 0.0);
  set(EquilibriumLabel::E1, 1.0, 0.0, 0.0);
  set(EquilibriumLabel::E2, 0.0, 1.0, 0.0);
  set(EquilibriumLabel::E3, 0.0, 0.0, p.L);
  set(EquilibriumLabel::E4, 0.0, 1.0, p.L);
  const double one_ab = 1.0 - p.a * p.b;
  if (one_ab != 0.0) {
    set(EquilibriumLabel::E5, (1.0 - p.a) / one_ab, (1.0 - p.b) / one_ab, 0.0);
  } else {
    set(EquilibriumLabel::E5, kNaN, kNaN, 0.0);
  }
  set(EquilibriumLabel::E6, 1.0, 0.0, p.L + p.l);

  const CoexistenceRoots roots = coexistence_roots(p);
  const auto set_e7 = [&](EquilibriumLabel label, const std::optional<double>& z) {
    if (z) {
      set(label, *z, 1.0 - p.b * *z, p.L + p.l * *z);
    } else {
      set(label, kNaN, kNaN, kNaN);
    }
  };
  set_e7(EquilibriumLabel::E7Plus, roots.z_plus);
  set_e7(EquilibriumLabel::E7Minus, roots.z_minus);

  for (std::size_t i = 0; i < eq.size(); ++i) {
    if (!eq[i].defined) continue;
    for (std::size_t j = 0; j < eq.size(); ++j) {
      if (i == j || !eq[j].defined) continue;
      const double scale = std::max({1.0, max_abs(eq[i].coords), max_abs(eq[j].coords)});
      if (max_abs_diff(eq[i].coords, eq[j].coords) <= kCoincidenceTolerance * scale) {
        eq[i].coincides_with.push_back(eq[j].label);
      }
    }
  }
  return eq;
}

const Equilibrium& find(const std::array<Equilibrium, kEquilibriumCount>& all,
                        EquilibriumLabel label) {
  return all[static_cast<std::size_t>(label)];
}

A1Threshold a1_threshold(const ModelParams& p) {
  const double ml = p.m * p.l;
  if (!(p.b < 1.0)) throw DomainError("a1 threshold requires b < 1");
  if (!(ml > 0.0)) throw DomainError("a1 threshold requires m*l > 0");
  const double K = 1.0 + p.m * p.L;
  const double b2 = p.b * p.b;
  // a1 = (b K + (2 - b) ml - 2 sqrt(ml (1 - b)(b K + ml))) / b^2.  The larger
  // root carries no cancellation; a1 follows from a1 a2 = (K + ml)^2 / b^2.
  const double sq = 2.0 * std::sqrt(ml * (1.0 - p.b) * (p.b * K + ml));
  const double lead = p.b * K + (2.0 - p.b) * ml;
  A1Threshold t;
  if (b2 == 0.0) {
    // D(a) is linear in a when b = 0: -4 ml a + (K + ml)^2 = 0.
    t.a1 = (K + ml) * (K + ml) / (4.0 * ml);
    t.a2 = std::numeric_limits<double>::infinity();
    return t;
  }
  t.a2 = (lead + sq) / b2;
  t.a1 = (K + ml) * (K + ml) / (b2 * t.a2);
  return t;
}

bool a1_gate_active(const ModelParams& p) {
  return p.m * p.l > (1.0 + p.m * p.L) * (1.0 - p.b);
}

InvasionClassification classify_invasion(const ModelParams& p, Scenario scenario) {
  const auto all = enumerate_equilibria(p);
  InvasionClassification c;
  c.scenario = scenario;
  const double K = 1.0 + p.m * p.L;

  if (scenario == Scenario::Invader) {
    c.source = find(all, EquilibriumLabel::E4);
    c.gamma1_at_zero = p.alpha * (1.0 - p.a / K);
    c.invadable = p.a < K;
    if (!c.invadable) {
      c.note = "a >= 1 + mL: E4 is not invadable by competitor 1";
      return c;
    }
    if (p.b < 1.0) {
      c.target = find(all, EquilibriumLabel::E7Plus);
      c.single_speed_guaranteed = true;
      c.note = "three-species coexistence";
    } else {
      c.target = find(all, EquilibriumLabel::E6);
      c.boundary_equilibria_present = true;
      c.note = p.b == 1.0 ? "b = 1: E7plus coincides with E6" : "resident extinction";
    }
    return c;
  }

  c.source = find(all, EquilibriumLabel::E6);
  c.gamma1_at_zero = p.beta * (1.0 - p.b);
  c.invadable = p.b < 1.0;
  if (!c.invadable) {
    c.note = "b >= 1: E6 is not invadable by competitor 2";
    return c;
  }
  bool coexist = false;
  if (a1_gate_active(p)) {
    const A1Threshold t = a1_threshold(p);
    coexist = p.a <= t.a1;
    if (p.a == t.a1) c.note = "a = a1: E7plus coincides with E7minus";
  } else {
    coexist = p.a <= K;
  }
  if (coexist) {
    c.target = find(all, EquilibriumLabel::E7Plus);
    c.single_speed_guaranteed = true;
    if (c.note.empty()) c.note = "three-species coexistence";
  } else {
    c.target = find(all, EquilibriumLabel::E4);
    c.boundary_equilibria_present = true;
    c.note = "resident extinction";
  }
  return c;
}

std::vector<TransformedEquilibrium> transformed_equilibria(const ModelParams& p,
                                                           Scenario scenario) {
  const auto all = enumerate_equilibria(p);
  const char prefix = scenario == Scenario::Invader ? 'F' : 'G';
  std::vector<TransformedEquilibrium> out;
  out.reserve(all.size());
  for (const Equilibrium& e : all) {
    TransformedEquilibrium t;
    t.label = std::string(1, prefix) + std::string(to_string(e.label).substr(1));
    t.source_label = e.label;
    t.coords = to_transformed(scenario, e.coords.values(), p);
    t.defined = e.defined;
    t.admissible = e.admissible;
    out.push_back(std::move(t));
  }
  return out;
}

void write_equilibria_csv(std::ostream& os,
                          const std::array<Equilibrium, kEquilibriumCount>& all) {
  os << "label,p1,p2,u,admissible\n";
  for (const Equilibrium& e : all) {
    os << to_string(e.label) << ',' << fmt17(e.coords.p1) << ',' << fmt17(e.coords.p2) << ','
       << fmt17(e.coords.u) << ',' << fmt_bool(e.admissible) << '\n';
  }
}

}  // namespace ccm
