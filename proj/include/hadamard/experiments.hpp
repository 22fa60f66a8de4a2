#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hadamard/densemat.hpp"
#include "hadamard/init.hpp"
#include "hadamard/solver.hpp"

namespace hadamard {

/// Column-labelled numeric table; the CSV writer emits the labels as header.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::string to_csv() const;
};

/// Data for trial k.
using DataSource = std::function<DenseMatrix(std::size_t trial)>;

/// Standard-normal m x n matrices, trial k drawn from seed + k.
DataSource normal_source(std::size_t m, std::size_t n, std::uint64_t seed);

struct CurveVariant {
  std::string label;
  InitConfig init;        // seed is offset by the trial index
  SolverOptions solver;   // ranks must match init.ranks
};

/// Runs every variant on every trial for exactly `iterations` outer
/// iterations (traces that stop early are held at their last value) and
/// returns the normalized error (e(t) - e_min) / (e0 - e_min) averaged over
/// trials. Within a trial e_min is the smallest error reached by any
/// variant and e0 the largest initial error among the variants, so all
/// curves share one scale. Columns: iter, then one per variant.
Table compare_curves(const DataSource& data, std::size_t trials, std::size_t iterations,
                     const std::vector<CurveVariant>& variants);

struct InitCompareConfig {
  DataSource data;
  std::size_t trials = 10;
  std::size_t rank = 10;
  std::size_t iterations = 100;
  std::uint64_t seed = 0;
  SolverOptions solver;
};

/// The five initializations, each followed by optimal scaling, two factors.
Table init_compare(const InitCompareConfig& config);

struct MomentumSetting {
  std::string label;
  std::optional<MomentumParams> params;  // nullopt = no extrapolation
};

/// No extrapolation plus the five (beta0, gamma, gamma_tilde, eta) settings
/// (0.75,1.05,1.01,1.5) (0.75,1.01,1.005,1.5) (0.75,1.01,1.005,2)
/// (0.5,1.01,1.005,1.5) (0.25,1.1,1.05,3).
std::vector<MomentumSetting> default_momentum_grid();

struct MomentumSweepConfig {
  DataSource data;
  std::size_t trials = 10;
  std::size_t rank = 10;
  std::size_t iterations = 100;
  std::uint64_t seed = 0;
  InitKind init = InitKind::SvdBased;
  SolverOptions solver;
  std::vector<MomentumSetting> grid = default_momentum_grid();
};

Table momentum_sweep(const MomentumSweepConfig& config);

struct SvdCompareConfig {
  std::vector<std::size_t> budgets{12, 24, 36, 48};
  std::vector<std::size_t> factor_counts{2, 3, 4};
  SolverOptions solver;  // ranks are set per run
  SvdOptions svd;
};

/// Relative error of the rank-R truncated SVD against SVD-initialized
/// Hadamard models with p factors of rank R/p, per budget R. Throws
/// std::invalid_argument naming the budget when p does not divide it or
/// R exceeds min(m, n). Columns: budget, svd, p2, p3, ...
Table svd_compare(const DenseMatrix& x, const SvdCompareConfig& config);

/// Final relative error of an SVD-initialized Hadamard fit with the given
/// equal ranks (p = ranks.size()); uses the two-factor solver when p = 2.
double fit_error(const DenseMatrix& x, std::size_t rank, std::size_t p,
                 const SolverOptions& solver, const SvdOptions& svd = {});

}  // namespace hadamard
