#include "ccm/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ccm {

namespace {

// Returns |R| max over components, or a negative value on a domain failure.
inline double rhs_node(const RhsContext& ctx, const ComponentsView& in,
                       const ComponentsSpan& out, std::size_t i) {
  const double x0 = in.c[0][i];
  const double x1 = in.c[1][i];
  const double x2 = in.c[2][i];
  double r[3] = {0.0, 0.0, 0.0};
  bool ok = true;
  if (ctx.reaction_enabled) {
    ok = detail::reaction_pointwise(ctx.system, x0, x1, x2, *ctx.params, r);
  }
  const double centre[3] = {x0, x1, x2};
  for (int s = 0; s < 3; ++s) {
    const double* u = in.c[s];
    const double lap = (u[i - 1] - 2.0 * centre[s] + u[i + 1]) * ctx.inv_dx2;
    out.c[s][i] = r[s] + ctx.diffusivity[s] * lap;
  }
  if (!ok) return -1.0;
  return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
}

inline void zero_boundary(const ComponentsSpan& out, std::size_t n) {
  for (int s = 0; s < 3; ++s) {
    out.c[s][0] = 0.0;
    out.c[s][n - 1] = 0.0;
  }
}

}  // namespace

RhsStatus rhs_serial(const RhsContext& ctx, ComponentsView in, ComponentsSpan out,
                     std::size_t n) {
  zero_boundary(out, n);
  RhsStatus st{n, 0.0};
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double rate = rhs_node(ctx, in, out, i);
    if (rate < 0.0) {
      st.first_bad_node = std::min(st.first_bad_node, i);
    } else {
      st.max_rate = std::max(st.max_rate, rate);
    }
  }
  return st;
}

RhsStatus rhs_parallel(const RhsContext& ctx, ComponentsView in, ComponentsSpan out,
                       std::size_t n) {
  zero_boundary(out, n);
  std::size_t first_bad = n;
  double max_rate = 0.0;
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n) - 1;
#pragma omp parallel for schedule(static) reduction(min : first_bad) reduction(max : max_rate)
  for (std::ptrdiff_t i = 1; i < last; ++i) {
    const double rate = rhs_node(ctx, in, out, static_cast<std::size_t>(i));
    if (rate < 0.0) {
      first_bad = std::min(first_bad, static_cast<std::size_t>(i));
    } else {
      max_rate = std::max(max_rate, rate);
    }
  }
  return {first_bad, max_rate};
}

void axpy_serial(ComponentsView y, double h, ComponentsView k, ComponentsSpan y_out,
                 std::size_t n) {
  for (int s = 0; s < 3; ++s) {
    y_out.c[s][0] = y.c[s][0];
    y_out.c[s][n - 1] = y.c[s][n - 1];
    for (std::size_t i = 1; i + 1 < n; ++i) y_out.c[s][i] = y.c[s][i] + h * k.c[s][i];
  }
}

void axpy_parallel(ComponentsView y, double h, ComponentsView k, ComponentsSpan y_out,
                   std::size_t n) {
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n) - 1;
  for (int s = 0; s < 3; ++s) {
    y_out.c[s][0] = y.c[s][0];
    y_out.c[s][n - 1] = y.c[s][n - 1];
    const double* ys = y.c[s];
    const double* ks = k.c[s];
    double* os = y_out.c[s];
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 1; i < last; ++i) os[i] = ys[i] + h * ks[i];
  }
}

void rk4_combine_serial(ComponentsSpan y, double dt, ComponentsView k1, ComponentsView k2,
                        ComponentsView k3, ComponentsView k4, std::size_t n) {
  const double w = dt / 6.0;
  for (int s = 0; s < 3; ++s) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      y.c[s][i] += w * (k1.c[s][i] + 2.0 * k2.c[s][i] + 2.0 * k3.c[s][i] + k4.c[s][i]);
    }
  }
}

void rk4_combine_parallel(ComponentsSpan y, double dt, ComponentsView k1, ComponentsView k2,
                          ComponentsView k3, ComponentsView k4, std::size_t n) {
  const double w = dt / 6.0;
  const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n) - 1;
  for (int s = 0; s < 3; ++s) {
    double* ys = y.c[s];
    const double *a = k1.c[s], *b = k2.c[s], *c = k3.c[s], *d = k4.c[s];
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 1; i < last; ++i) {
      ys[i] += w * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
    }
  }
}

}  // namespace ccm
