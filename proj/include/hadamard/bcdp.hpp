#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hadamard/model.hpp"
#include "hadamard/solver.hpp"

namespace hadamard {

/// Per-factor ranks r_i of a p-factor decomposition; the budget is their sum.
struct BudgetSpec {
  std::vector<std::size_t> ranks;

  /// Throws std::invalid_argument unless p >= 2 and every r_i >= 1.
  explicit BudgetSpec(std::vector<std::size_t> r);
  std::size_t p() const { return ranks.size(); }
  std::size_t budget() const;
};

/// Alternating minimization of ||X - (W1 H1) o ... o (Wp Hp)||_F.
///
/// For each factor i (in opts.order) the product P of all other factors is
/// formed from scratch, then H_i and W_i are updated column-wise against P.
/// Stopping, trace and momentum behave as in the two-factor `run`; with p = 2
/// and FactorOrder::Descending the iterates coincide with it.
std::pair<HadamardModel, RunTrace> run_multi(const DenseMatrix& x, HadamardModel init,
                                             const SolverOptions& opts);

}  // namespace hadamard
