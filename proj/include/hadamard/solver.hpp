#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hadamard/densemat.hpp"
#include "hadamard/hadls.hpp"
#include "hadamard/model.hpp"

namespace hadamard {

/// Adaptive extrapolation schedule. Requires
/// 1 <= gamma_tilde <= gamma <= eta_decay and beta0 in [0, 1].
struct MomentumParams {
  double beta0 = 0.75;
  double gamma = 1.05;
  double gamma_tilde = 1.01;
  double eta_decay = 1.5;

  void validate() const;
};

struct MomentumState {
  double beta_k = 0.0;
  double beta_tilde = 1.0;
  /// Non-extrapolated factors of the last update of each block.
  std::vector<FactorPair> prev_factors;
  double prev_error = 0.0;
};

/// Adapts beta after an outer iteration. On a decrease beta grows by gamma,
/// capped by beta_tilde, and beta_tilde grows by gamma_tilde up to 1. On an
/// increase beta shrinks by eta_decay and beta_tilde takes the old beta.
MomentumState beta_update(MomentumState state, const MomentumParams& params,
                          bool error_decreased);

/// h_new + beta * (h_new - h_old).
DenseMatrix extrapolate(const DenseMatrix& h_new, const DenseMatrix& h_old, double beta);

/// Order in which the multi-factor solver visits factors within one outer
/// iteration. The two-factor scheme always updates factor 2 before factor 1.
enum class FactorOrder { Ascending, Descending };

struct SolverOptions {
  /// One rank per factor.
  std::vector<std::size_t> ranks;
  HadlsSolverKind solver_kind;
  std::size_t max_outer_iters = 300;
  /// Stop once e(t) has failed to decrease by this much ...
  double tol_decrease = 1e-6;
  /// ... for this many consecutive outer iterations. 0 disables the rule.
  std::size_t patience = 10;
  std::uint64_t seed = 0;
  std::optional<MomentumParams> momentum;
  /// Solve the column subproblems of one factor update on several threads.
  bool parallel_columns = false;
  /// 0 = hardware concurrency.
  std::size_t threads = 0;
  FactorOrder order = FactorOrder::Ascending;

  void validate() const;
};

struct TraceEntry {
  std::size_t t = 0;
  double seconds = 0.0;
  double rel_error = 0.0;
  /// The extrapolated iterate was worse and was replaced by a plain sweep.
  bool restarted = false;
};

struct RunTrace {
  std::vector<TraceEntry> entries;
  /// Columns whose subproblem needed the ridge fallback, summed over the run.
  std::size_t ridged_columns = 0;
  /// Columns whose ridged subproblem still failed.
  std::size_t singular_columns = 0;
  bool hit_max_iters = false;

  double e0() const;
  double e_min() const;
  double final_error() const;
  std::size_t iterations() const { return entries.empty() ? 0 : entries.back().t; }
};

struct UpdateResult {
  DenseMatrix h;
  std::size_t ridged_columns = 0;
  std::size_t singular_columns = 0;
};

/// Column-separable update of the r x n factor `h`: for every column j,
/// h(:, j) <- argmin_x ||fixed_prod(:, j) o (w x) - x_data(:, j)||.
/// The result is independent of `threads` (0 or 1 = sequential).
UpdateResult update_factor(const DenseMatrix& x_data, const DenseMatrix& fixed_prod,
                           const DenseMatrix& w, const DenseMatrix& h,
                           const HadlsSolverKind& kind, std::size_t threads = 1);

}  // namespace hadamard
