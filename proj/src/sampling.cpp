#include "ccm/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "ccm/equilibria.hpp"
#include "ccm/linear_analysis.hpp"

namespace ccm {

double log_uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

ModelParams random_params(Rng& rng) {
  std::uniform_real_distribution<double> rate(0.2, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ModelParams p;
  p.alpha = rate(rng);
  p.beta = rate(rng);
  p.gamma = rate(rng);
  p.a = log_uniform(rng, 0.05, 20.0);
  p.b = log_uniform(rng, 0.05, 20.0);
  p.m = unit(rng) < 0.1 ? 0.0 : log_uniform(rng, 0.01, 10.0);
  p.l = unit(rng) < 0.1 ? 0.0 : 2.0 * unit(rng);
  p.L = 0.05 + 2.95 * unit(rng);
  p.D1 = rate(rng);
  p.D2 = rate(rng);
  p.D3 = rate(rng);
  return p;
}

CheckSummary run_random_checks(std::uint64_t seed, std::size_t samples) {
  Rng rng(seed);
  CheckSummary s;
  s.samples = samples;
  for (std::size_t k = 0; k < samples; ++k) {
    const ModelParams p = random_params(rng);
    for (const Equilibrium& e : enumerate_equilibria(p)) {
      if (!e.admissible) continue;
      const Vec3 f = reaction(System::CCM, e.coords.values(), p);
      for (double v : f) s.max_equilibrium_residual = std::max(s.max_equilibrium_residual, std::abs(v));
    }
    for (Scenario sc : {Scenario::Invader, Scenario::Resident}) {
      const auto g = growth_coefficients(sc, p);
      if (!(g[0].r > 0.0)) continue;
      ++s.invadable_cases;
      const SpeedResult closed = linear_speed(sc, p);
      const SpeedResult numeric = numeric_min_speed(g[0].r, g[0].D);
      s.max_speed_mismatch =
          std::max(s.max_speed_mismatch, std::abs(closed.c - numeric.c) / closed.c);
    }
  }
  return s;
}

}  // namespace ccm
