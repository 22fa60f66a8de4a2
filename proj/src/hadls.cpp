#include "hadamard/hadls.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hadamard/error.hpp"

namespace hadamard {

void validate(const HadlsProblem& p) {
  if (p.s.size() != p.a.rows() || p.b.size() != p.a.rows()) {
    throw DimensionError("hadls: s and b must have one entry per row of A");
  }
}

double objective(const HadlsProblem& p, std::span<const double> x) {
  validate(p);
  if (x.size() != p.a.cols()) throw DimensionError("hadls objective: x length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.a.rows(); ++i) {
    const double res = p.s[i] * dot(p.a.row(i), x) - p.b[i];
    acc += res * res;
  }
  return acc;
}

HadlsPrecompute precompute(const HadlsProblem& p) {
  validate(p);
  const std::size_t m = p.a.rows();
  const std::size_t r = p.a.cols();
  HadlsPrecompute pc{DenseMatrix(r, r, 0.0), Vector(r, 0.0)};
  for (std::size_t i = 0; i < m; ++i) {
    const double si = p.s[i];
    if (si == 0.0) continue;
    const double w = si * si;
    const double sb = si * p.b[i];
    auto ai = p.a.row(i);
    for (std::size_t k = 0; k < r; ++k) {
      const double wk = w * ai[k];
      auto hrow = pc.h.row(k);
      for (std::size_t l = 0; l <= k; ++l) hrow[l] += wk * ai[l];
      pc.d[k] += sb * ai[k];
    }
  }
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t l = 0; l < k; ++l) pc.h(l, k) = pc.h(k, l);
  return pc;
}

Vector gradient(const HadlsPrecompute& pc, std::span<const double> x) {
  Vector g = matvec(pc.h, x);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] -= pc.d[k];
  return g;
}

double lipschitz_constant(const HadlsPrecompute& pc) {
  const std::size_t r = pc.h.rows();
  double scale = 0.0;
  for (double v : pc.h.data()) scale = std::max(scale, std::abs(v));
  if (r == 0 || scale == 0.0) return 0.0;

  // Fixed irregular start vector; it is orthogonal to the dominant
  // eigenvector only on a measure-zero set.
  Vector v(r);
  for (std::size_t k = 0; k < r; ++k) {
    v[k] = 1.0 + 0.6180339887498949 * static_cast<double>(k % 7) +
           0.1 * std::sqrt(static_cast<double>(k + 2));
  }
  const double nv = norm2(v);
  for (double& e : v) e /= nv;

  double lambda = 0.0;
  constexpr std::size_t kMaxIters = 20000;
  for (std::size_t it = 0; it < kMaxIters; ++it) {
    Vector w = matvec(pc.h, v);
    const double next = dot(v, w);  // Rayleigh quotient of the unit v
    const double nw = norm2(w);
    if (nw == 0.0) return std::max(next, 0.0);
    for (std::size_t k = 0; k < r; ++k) v[k] = w[k] / nw;
    // The Rayleigh quotient converges at twice the rate of the vector, so a
    // tighter stopping threshold keeps the returned value within 1e-8.
    if (it > 0 && std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  // The Rayleigh quotient of the final iterate.
  Vector w = matvec(pc.h, v);
  return std::max(lambda, dot(v, w));
}

double lipschitz_constant(const HadlsProblem& p) { return lipschitz_constant(precompute(p)); }

double optimal_step(const HadlsPrecompute& pc, std::span<const double> g) {
  const double gg = dot(g, g);
  if (gg == 0.0) throw ZeroGradientError("optimal_step: zero gradient");
  const double curvature = dot(g, matvec(pc.h, g));
  if (curvature <= 1e-300) {
    double trace = 0.0;
    for (std::size_t k = 0; k < pc.h.rows(); ++k) trace += pc.h(k, k);
    return 1.0 / std::max(trace, 1e-300);
  }
  return gg / curvature;
}

HadlsResult solve(const HadlsProblem& p, const HadlsSolverKind& kind,
                  std::span<const double> x0) {
  const HadlsPrecompute pc = precompute(p);
  const std::size_t r = p.a.cols();
  HadlsResult out;

  if (kind.method == HadlsMethod::Exact) {
    SpdSolution sol = solve_spd(pc.h, pc.d);
    out.x = std::move(sol.x);
    out.ridged = sol.ridged;
    out.singular = sol.singular;
    return out;
  }

  if (x0.size() != r) throw DimensionError("hadls solve: warm start length mismatch");
  if (kind.inner_iters < 1) throw std::invalid_argument("hadls solve: inner_iters must be >= 1");
  out.x.assign(x0.begin(), x0.end());

  double fixed_step = 0.0;
  if (kind.method == HadlsMethod::GdLipschitz) {
    const double lip = lipschitz_constant(pc);
    if (lip == 0.0) return out;  // f is constant in x
    fixed_step = 1.0 / lip;
  }
  for (std::size_t it = 0; it < kind.inner_iters; ++it) {
    const Vector g = gradient(pc, out.x);
    if (dot(g, g) == 0.0) break;
    const double step =
        kind.method == HadlsMethod::GdLipschitz ? fixed_step : optimal_step(pc, g);
    for (std::size_t k = 0; k < r; ++k) out.x[k] -= step * g[k];
  }
  return out;
}

}  // namespace hadamard
