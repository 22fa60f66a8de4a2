#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hadamard/model.hpp"
#include "hadamard/solver.hpp"

namespace hadamard {

/// A rank split of the budget R maximizing the product of the parts.
struct BudgetPartition {
  std::size_t budget = 0;
  std::vector<std::size_t> parts;  // each 2 or 3, at most two 2's
  std::size_t product = 0;
};

/// R = 3k: k threes. R = 3k+1: two 2's and k-1 threes. R = 3k+2: one 2 and
/// k threes. Throws BudgetTooSmallError for R < 2.
BudgetPartition optimal_partition(std::size_t budget);

/// Largest n for which I_n has an exact Hadamard decomposition with budget R:
/// 3^k, 4 * 3^(k-1) or 2 * 3^k for R = 3k, 3k+1, 3k+2.
std::size_t capacity(std::size_t budget);

/// Factors whose Hadamard product is exactly I_n. All entries are 0 or 1.
struct IdentityDecomposition {
  std::size_t n = 0;
  std::vector<FactorPair> factors;
  std::vector<std::size_t> ranks;

  HadamardModel to_model() const { return HadamardModel(factors); }
};

/// I_r as a single factor W = H = I_r.
IdentityDecomposition identity_base(std::size_t r);

/// Lifts a decomposition of I_m to one of I_{r m} = I_r (x) I_m: every
/// existing factor becomes 1_{r x r} (x) W_i H_i through W' = 1_{r x 1} (x) W,
/// H' = 1_{1 x r} (x) H (same rank), and a new rank-r factor I_r (x) 1_{m x m}
/// is appended with W = I_r (x) 1_{m x 1}, H = I_r (x) 1_{1 x m}.
IdentityDecomposition kron_identity_step(const IdentityDecomposition& inner, std::size_t r);

/// Exact decomposition of I_capacity(R) with ranks given by
/// optimal_partition(R): the first part is the base, the remaining parts are
/// lifted largest first.
IdentityDecomposition build_identity_decomposition(std::size_t budget);

/// Default options of recovery_experiment: max_outer_iters = 2000,
/// patience = 0, no momentum.
SolverOptions recovery_solver_defaults();

struct RecoveryConfig {
  std::size_t budget = 6;
  std::size_t n = 9;
  std::vector<std::size_t> ranks{3, 3};
  std::size_t trials = 100;
  /// Trial k starts from init_random with seed + k.
  std::uint64_t seed = 0;
  /// Ranks are overwritten by `ranks`. Runs a fixed 2000 iterations; the
  /// stalling rule would stop trials that are still converging slowly.
  SolverOptions solver = recovery_solver_defaults();
  bool optimal_scaling = true;
  /// Start every trial from the exact construction instead of a random
  /// draw. Requires n = capacity(budget) and ranks = the optimal partition.
  bool exact_init = false;
  double success_threshold = 1e-5;
  /// Trials run on this many threads (0 = hardware concurrency).
  std::size_t trial_threads = 1;
};

struct RecoveryStats {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;  // in [0, 1]
  double mean_error = 0.0;
  double std_error = 0.0;  // sample standard deviation
  std::vector<double> errors;  // final relative error per trial
};

/// Runs the p-factor solver on X = I_n once per trial and counts the trials
/// ending below success_threshold.
RecoveryStats recovery_experiment(const RecoveryConfig& config);

}  // namespace hadamard
