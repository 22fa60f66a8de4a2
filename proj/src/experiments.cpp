#include "hadamard/experiments.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "hadamard/bcd2.hpp"
#include "hadamard/bcdp.hpp"
#include "hadamard/io.hpp"
#include "hadamard/rng.hpp"

namespace hadamard {

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += io::format_real(row[c]);
    }
    out += '\n';
  }
  return out;
}

DataSource normal_source(std::size_t m, std::size_t n, std::uint64_t seed) {
  return [=](std::size_t trial) {
    Rng rng(seed + trial);
    DenseMatrix x(m, n);
    for (double& v : x.data()) v = rng.normal();
    return x;
  };
}

namespace {

std::pair<HadamardModel, RunTrace> solve_any(const DenseMatrix& x, HadamardModel init,
                                             const SolverOptions& opts) {
  if (init.p() == 2) return run(x, std::move(init), opts);
  return run_multi(x, std::move(init), opts);
}

}  // namespace

Table compare_curves(const DataSource& data, std::size_t trials, std::size_t iterations,
                     const std::vector<CurveVariant>& variants) {
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (iterations < 1) throw std::invalid_argument("experiment: iterations must be >= 1");
  if (variants.empty()) throw std::invalid_argument("experiment: no variants");

  const std::size_t len = iterations + 1;
  std::vector<std::vector<double>> sum(variants.size(), std::vector<double>(len, 0.0));
  for (std::size_t k = 0; k < trials; ++k) {
    const DenseMatrix x = data(k);
    std::vector<std::vector<double>> curves;
    for (const auto& v : variants) {
      InitConfig ic = v.init;
      ic.seed += k;
      SolverOptions so = v.solver;
      so.ranks = ic.ranks;
      so.max_outer_iters = iterations;
      HadamardModel init = initialize(x, ic).model;
      const RunTrace trace = solve_any(x, std::move(init), so).second;
      std::vector<double> curve(len, trace.final_error());
      for (const auto& e : trace.entries) curve[e.t] = e.rel_error;
      curves.push_back(std::move(curve));
    }
    double e_min = std::numeric_limits<double>::infinity();
    double e_start = 0.0;
    for (const auto& c : curves) {
      e_min = std::min(e_min, *std::min_element(c.begin(), c.end()));
      e_start = std::max(e_start, c.front());
    }
    const double span = e_start - e_min;
    for (std::size_t v = 0; v < curves.size(); ++v)
      for (std::size_t t = 0; t < len; ++t)
        sum[v][t] += span > 0.0 ? (curves[v][t] - e_min) / span : 0.0;
  }

  Table table;
  table.columns.push_back("iter");
  for (const auto& v : variants) table.columns.push_back(v.label);
  for (std::size_t t = 0; t < len; ++t) {
    std::vector<double> row{static_cast<double>(t)};
    for (std::size_t v = 0; v < variants.size(); ++v)
      row.push_back(sum[v][t] / static_cast<double>(trials));
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table init_compare(const InitCompareConfig& config) {
  std::vector<CurveVariant> variants;
  for (InitKind kind : {InitKind::Random, InitKind::XavierUniform, InitKind::XavierNormal,
                        InitKind::SvdBased, InitKind::KMeansBased}) {
    CurveVariant v;
    v.label = to_string(kind);
    v.init.kind = kind;
    v.init.ranks = {config.rank, config.rank};
    v.init.seed = config.seed;
    v.solver = config.solver;
    variants.push_back(std::move(v));
  }
  return compare_curves(config.data, config.trials, config.iterations, variants);
}

std::vector<MomentumSetting> default_momentum_grid() {
  return {
      {"beta=0", std::nullopt},
      {"beta0=0.75;gamma=1.05;gamma_tilde=1.01;eta=1.5", MomentumParams{0.75, 1.05, 1.01, 1.5}},
      {"beta0=0.75;gamma=1.01;gamma_tilde=1.005;eta=1.5", MomentumParams{0.75, 1.01, 1.005, 1.5}},
      {"beta0=0.75;gamma=1.01;gamma_tilde=1.005;eta=2", MomentumParams{0.75, 1.01, 1.005, 2.0}},
      {"beta0=0.5;gamma=1.01;gamma_tilde=1.005;eta=1.5", MomentumParams{0.5, 1.01, 1.005, 1.5}},
      {"beta0=0.25;gamma=1.1;gamma_tilde=1.05;eta=3", MomentumParams{0.25, 1.1, 1.05, 3.0}},
  };
}

Table momentum_sweep(const MomentumSweepConfig& config) {
  std::vector<CurveVariant> variants;
  for (const auto& setting : config.grid) {
    if (setting.params) setting.params->validate();
    CurveVariant v;
    v.label = setting.label;
    v.init.kind = config.init;
    v.init.ranks = {config.rank, config.rank};
    v.init.seed = config.seed;
    v.solver = config.solver;
    v.solver.momentum = setting.params;
    variants.push_back(std::move(v));
  }
  return compare_curves(config.data, config.trials, config.iterations, variants);
}

double fit_error(const DenseMatrix& x, std::size_t rank, std::size_t p,
                 const SolverOptions& solver, const SvdOptions& svd) {
  InitConfig ic;
  ic.kind = InitKind::SvdBased;
  ic.ranks.assign(p, rank);
  ic.svd = svd;
  SolverOptions so = solver;
  so.ranks = ic.ranks;
  HadamardModel init = initialize(x, ic).model;
  return solve_any(x, std::move(init), so).second.final_error();
}

Table svd_compare(const DenseMatrix& x, const SvdCompareConfig& config) {
  const std::size_t max_rank = std::min(x.rows(), x.cols());
  for (std::size_t budget : config.budgets) {
    if (budget < 1 || budget > max_rank) {
      throw std::invalid_argument("svd-compare: budget " + std::to_string(budget) +
                                  " must lie in [1, min(m, n)]");
    }
    for (std::size_t p : config.factor_counts) {
      if (p < 2) throw std::invalid_argument("svd-compare: factor count " + std::to_string(p) +
                                             " must be >= 2");
      if (budget % p != 0) {
        throw std::invalid_argument("svd-compare: budget " + std::to_string(budget) +
                                    " is not divisible by p=" + std::to_string(p));
      }
    }
  }

  Table table;
  table.columns = {"budget", "svd"};
  for (std::size_t p : config.factor_counts) table.columns.push_back("p" + std::to_string(p));
  for (std::size_t budget : config.budgets) {
    const SvdTruncation svd = truncated_svd(x, budget, config.svd);
    std::vector<double> row{static_cast<double>(budget), relative_error(x, reconstruct(svd))};
    for (std::size_t p : config.factor_counts)
      row.push_back(fit_error(x, budget / p, p, config.solver, config.svd));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace hadamard
