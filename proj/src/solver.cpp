#include "hadamard/solver.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "hadamard/error.hpp"

namespace hadamard {

void MomentumParams::validate() const {
  if (!(beta0 >= 0.0 && beta0 <= 1.0))
    throw std::invalid_argument("momentum: beta0 must lie in [0, 1]");
  if (!(1.0 <= gamma_tilde && gamma_tilde <= gamma && gamma <= eta_decay)) {
    throw std::invalid_argument(
        "momentum: parameters must satisfy 1 <= gamma_tilde <= gamma <= eta");
  }
}

MomentumState beta_update(MomentumState state, const MomentumParams& params,
                          bool error_decreased) {
  if (error_decreased) {
    state.beta_k = std::min(state.beta_tilde, params.gamma * state.beta_k);
    state.beta_tilde = std::min(1.0, params.gamma_tilde * state.beta_tilde);
  } else {
    const double old = state.beta_k;
    state.beta_k = old / params.eta_decay;
    state.beta_tilde = old;
  }
  return state;
}

DenseMatrix extrapolate(const DenseMatrix& h_new, const DenseMatrix& h_old, double beta) {
  if (h_new.rows() != h_old.rows() || h_new.cols() != h_old.cols())
    throw DimensionError("extrapolate: shape mismatch");
  DenseMatrix out = h_new;
  if (beta == 0.0) return out;
  auto od = out.data();
  auto nd = h_new.data();
  auto pd = h_old.data();
  for (std::size_t k = 0; k < od.size(); ++k) od[k] = nd[k] + beta * (nd[k] - pd[k]);
  return out;
}

void SolverOptions::validate() const {
  if (ranks.empty()) throw std::invalid_argument("solver options: no ranks given");
  for (std::size_t r : ranks)
    if (r == 0) throw std::invalid_argument("solver options: ranks must be positive");
  if (max_outer_iters < 1) throw std::invalid_argument("solver options: max_outer_iters must be >= 1");
  if (!(tol_decrease > 0.0)) throw std::invalid_argument("solver options: tol_decrease must be > 0");
  if (solver_kind.method != HadlsMethod::Exact && solver_kind.inner_iters < 1)
    throw std::invalid_argument("solver options: inner_iters must be >= 1");
  if (momentum) momentum->validate();
}

double RunTrace::e0() const {
  if (entries.empty()) throw std::logic_error("RunTrace: empty trace");
  return entries.front().rel_error;
}

double RunTrace::e_min() const {
  if (entries.empty()) throw std::logic_error("RunTrace: empty trace");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : entries) best = std::min(best, e.rel_error);
  return best;
}

double RunTrace::final_error() const {
  if (entries.empty()) throw std::logic_error("RunTrace: empty trace");
  return entries.back().rel_error;
}

UpdateResult update_factor(const DenseMatrix& x_data, const DenseMatrix& fixed_prod,
                           const DenseMatrix& w, const DenseMatrix& h,
                           const HadlsSolverKind& kind, std::size_t threads) {
  const std::size_t m = x_data.rows();
  const std::size_t n = x_data.cols();
  const std::size_t r = w.cols();
  if (fixed_prod.rows() != m || fixed_prod.cols() != n)
    throw DimensionError("update_factor: fixed product must match the data shape");
  if (w.rows() != m) throw DimensionError("update_factor: fixed factor has wrong row count");
  if (h.rows() != r || h.cols() != n)
    throw DimensionError("update_factor: updated factor must be r x n");

  // Rows of these are the columns of the originals.
  const DenseMatrix data_cols = x_data.transpose();
  const DenseMatrix s_cols = fixed_prod.transpose();
  const DenseMatrix warm = h.transpose();
  DenseMatrix out_cols(n, r);
  std::vector<unsigned char> ridged(n, 0), singular(n, 0);

  auto solve_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
      HadlsProblem prob{w, s_cols.row(j), data_cols.row(j)};
      HadlsResult res = solve(prob, kind, warm.row(j));
      std::copy(res.x.begin(), res.x.end(), out_cols.row(j).begin());
      ridged[j] = res.ridged;
      singular[j] = res.singular;
    }
  };

  std::size_t workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    solve_range(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t begin = 0; begin < n; begin += chunk)
      pool.emplace_back(solve_range, begin, std::min(n, begin + chunk));
  }

  UpdateResult out;
  out.h = out_cols.transpose();
  for (std::size_t j = 0; j < n; ++j) {
    out.ridged_columns += ridged[j];
    out.singular_columns += singular[j];
  }
  return out;
}

}  // namespace hadamard
