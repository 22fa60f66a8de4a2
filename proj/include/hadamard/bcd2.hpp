#pragma once

#include <utility>

#include "hadamard/model.hpp"
#include "hadamard/solver.hpp"

namespace hadamard {

/// One outer iteration of the two-factor scheme: H2, W2, H1, W1 in that
/// order, each factor minimized exactly (or by the configured GD method)
/// with the other three fixed. W-updates run the H-update on transposed data.
HadamardModel bcd_step(const DenseMatrix& x, HadamardModel model, const SolverOptions& opts);

/// Alternating minimization of ||X - (W1 H1) o (W2 H2)||_F from `init`.
///
/// Records e(t) after every outer iteration (t = 0 is the initial point) and
/// stops at max_outer_iters or when e(t) failed to drop by tol_decrease for
/// `patience` consecutive iterations. With momentum each updated block is
/// extrapolated; an outer iteration whose extrapolated error does not improve
/// on the last accepted one is discarded and replaced by a plain sweep from
/// the last accepted point.
std::pair<HadamardModel, RunTrace> run(const DenseMatrix& x, HadamardModel init,
                                       const SolverOptions& opts);

}  // namespace hadamard
