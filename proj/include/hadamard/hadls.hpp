#pragma once

#include <cstddef>
#include <span>

#include "hadamard/densemat.hpp"

namespace hadamard {

/// One column subproblem: minimize f(x) = ||s o (A x) - b||^2.
///
/// `a` is the fixed factor (m x r), `s` the matching column of the Hadamard
/// product of the other factors, `b` the target column. The problem only
/// views its data.
struct HadlsProblem {
  const DenseMatrix& a;
  std::span<const double> s;
  std::span<const double> b;
};

/// Hessian A^T Diag(s^2) A and linear term A^T (s o b) of f.
struct HadlsPrecompute {
  DenseMatrix h;
  Vector d;
};

enum class HadlsMethod { Exact, GdLipschitz, GdOptimalStep };

struct HadlsSolverKind {
  HadlsMethod method = HadlsMethod::Exact;
  /// Gradient steps per column for the GD methods.
  std::size_t inner_iters = 10;
};

struct HadlsResult {
  Vector x;
  /// The Exact solve needed the ridge fallback.
  bool ridged = false;
  /// The ridged Exact solve failed as well; x is best effort.
  bool singular = false;
};

/// Throws DimensionError on inconsistent sizes.
void validate(const HadlsProblem& p);

double objective(const HadlsProblem& p, std::span<const double> x);

HadlsPrecompute precompute(const HadlsProblem& p);

/// h x - d.
Vector gradient(const HadlsPrecompute& pc, std::span<const double> x);

/// sigma_max(Diag(s) A)^2 by power iteration on the Hessian, relative
/// tolerance 1e-8. Returns 0 when Diag(s) A = 0.
double lipschitz_constant(const HadlsProblem& p);
double lipschitz_constant(const HadlsPrecompute& pc);

/// Exact line-search step ||g||^2 / (g^T h g) for the quadratic. Falls back to
/// 1 / max(trace(h), 1e-300) when the curvature along g is below 1e-300.
/// Throws ZeroGradientError when g = 0.
double optimal_step(const HadlsPrecompute& pc, std::span<const double> g);

/// Solves the subproblem. `x0` is the warm start for the GD methods and is
/// ignored by Exact.
HadlsResult solve(const HadlsProblem& p, const HadlsSolverKind& kind,
                  std::span<const double> x0);

}  // namespace hadamard
