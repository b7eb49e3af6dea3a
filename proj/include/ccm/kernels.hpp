#pragma once

// Semi-discrete right-hand side on a uniform 1-D grid:
//   du_i/dt = R(u_i) + D (u_{i-1} - 2 u_i + u_{i+1}) / dx^2
// for interior nodes; boundary nodes are Dirichlet and get zero rate.
//
// Two implementations share the per-node arithmetic: a plain loop kept as
// the reference and an OpenMP loop.  Every node is computed independently
// from the same inputs, so both produce bit-identical output.

#include <array>
#include <cstddef>

#include "ccm/model.hpp"

namespace ccm {

enum class KernelMode { Serial, Parallel };

struct RhsContext {
  System system = System::CCM;
  const ModelParams* params = nullptr;
  Vec3 diffusivity{};
  double inv_dx2 = 0.0;
  bool reaction_enabled = true;
};

struct ComponentsView {
  std::array<const double*, 3> c{};
};

struct ComponentsSpan {
  std::array<double*, 3> c{};
};

struct RhsStatus {
  /// Smallest interior node index whose reaction failed the denominator
  /// guard, or n when none did.
  std::size_t first_bad_node = 0;
  /// max |R(u_i)| over interior nodes (reaction part only).
  double max_rate = 0.0;
};

RhsStatus rhs_serial(const RhsContext& ctx, ComponentsView in, ComponentsSpan out, std::size_t n);
RhsStatus rhs_parallel(const RhsContext& ctx, ComponentsView in, ComponentsSpan out,
                       std::size_t n);

inline RhsStatus evaluate_rhs(KernelMode mode, const RhsContext& ctx, ComponentsView in,
                              ComponentsSpan out, std::size_t n) {
  return mode == KernelMode::Parallel ? rhs_parallel(ctx, in, out, n)
                                      : rhs_serial(ctx, in, out, n);
}

/// y_out = y + h * k on interior nodes; boundary nodes copied from y.
void axpy_serial(ComponentsView y, double h, ComponentsView k, ComponentsSpan y_out,
                 std::size_t n);
void axpy_parallel(ComponentsView y, double h, ComponentsView k, ComponentsSpan y_out,
                   std::size_t n);

/// y += dt/6 (k1 + 2 k2 + 2 k3 + k4) on interior nodes.
void rk4_combine_serial(ComponentsSpan y, double dt, ComponentsView k1, ComponentsView k2,
                        ComponentsView k3, ComponentsView k4, std::size_t n);
void rk4_combine_parallel(ComponentsSpan y, double dt, ComponentsView k1, ComponentsView k2,
                          ComponentsView k3, ComponentsView k4, std::size_t n);

}  // namespace ccm
