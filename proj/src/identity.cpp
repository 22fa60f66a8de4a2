#include "hadamard/identity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

#include "hadamard/bcdp.hpp"
#include "hadamard/error.hpp"
#include "hadamard/init.hpp"

namespace hadamard {
namespace {

void require_budget(std::size_t budget) {
  if (budget < 2)
    throw BudgetTooSmallError("budget R=" + std::to_string(budget) + " is below 2");
}

std::size_t ipow3(std::size_t k) {
  std::size_t out = 1;
  while (k-- > 0) out *= 3;
  return out;
}

}  // namespace

BudgetPartition optimal_partition(std::size_t budget) {
  require_budget(budget);
  BudgetPartition out;
  out.budget = budget;
  const std::size_t k = budget / 3;
  switch (budget % 3) {
    case 0:
      out.parts.assign(k, 3);
      break;
    case 1:
      out.parts = {2, 2};
      out.parts.insert(out.parts.end(), k - 1, 3);
      break;
    default:
      out.parts = {2};
      out.parts.insert(out.parts.end(), k, 3);
      break;
  }
  out.product = std::accumulate(out.parts.begin(), out.parts.end(), std::size_t{1},
                                std::multiplies<>());
  return out;
}

std::size_t capacity(std::size_t budget) {
  require_budget(budget);
  const std::size_t k = budget / 3;
  switch (budget % 3) {
    case 0: return ipow3(k);
    case 1: return 4 * ipow3(k - 1);
    default: return 2 * ipow3(k);
  }
}

IdentityDecomposition identity_base(std::size_t r) {
  IdentityDecomposition out;
  out.n = r;
  out.factors.push_back({DenseMatrix::identity(r), DenseMatrix::identity(r)});
  out.ranks = {r};
  return out;
}

IdentityDecomposition kron_identity_step(const IdentityDecomposition& inner, std::size_t r) {
  if (r < 1) throw std::invalid_argument("kron_identity_step: r must be positive");
  const std::size_t m = inner.n;
  IdentityDecomposition out;
  out.n = r * m;
  out.ranks = inner.ranks;
  for (const FactorPair& f : inner.factors) {
    const std::size_t k = f.rank();
    // 1_{r x 1} (x) W stacks W r times; 1_{1 x r} (x) H repeats H side by side.
    FactorPair lifted{DenseMatrix(r * m, k), DenseMatrix(k, r * m)};
    for (std::size_t block = 0; block < r; ++block) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t c = 0; c < k; ++c) lifted.w(block * m + i, c) = f.w(i, c);
      for (std::size_t c = 0; c < k; ++c)
        for (std::size_t j = 0; j < m; ++j) lifted.h(c, block * m + j) = f.h(c, j);
    }
    out.factors.push_back(std::move(lifted));
  }
  FactorPair blocks{DenseMatrix(r * m, r, 0.0), DenseMatrix(r, r * m, 0.0)};
  for (std::size_t block = 0; block < r; ++block) {
    for (std::size_t i = 0; i < m; ++i) {
      blocks.w(block * m + i, block) = 1.0;
      blocks.h(block, block * m + i) = 1.0;
    }
  }
  out.factors.push_back(std::move(blocks));
  out.ranks.push_back(r);
  return out;
}

IdentityDecomposition build_identity_decomposition(std::size_t budget) {
  const BudgetPartition part = optimal_partition(budget);
  IdentityDecomposition out = identity_base(part.parts.front());
  std::vector<std::size_t> rest(part.parts.begin() + 1, part.parts.end());
  std::sort(rest.begin(), rest.end(), std::greater<>());
  for (std::size_t r : rest) out = kron_identity_step(out, r);
  return out;
}

SolverOptions recovery_solver_defaults() {
  SolverOptions opts;
  opts.max_outer_iters = 2000;
  opts.patience = 0;
  return opts;
}

RecoveryStats recovery_experiment(const RecoveryConfig& config) {
  require_budget(config.budget);
  if (config.trials < 1) throw std::invalid_argument("recovery: trials must be >= 1");
  const std::size_t sum = std::accumulate(config.ranks.begin(), config.ranks.end(), std::size_t{0});
  if (sum != config.budget) {
    throw std::invalid_argument("recovery: ranks sum to " + std::to_string(sum) +
                                " but the budget is " + std::to_string(config.budget));
  }
  const std::size_t cap = capacity(config.budget);
  if (config.n < 1 || config.n > cap) {
    throw std::invalid_argument("recovery: n=" + std::to_string(config.n) +
                                " exceeds the capacity " + std::to_string(cap));
  }

  const DenseMatrix x = DenseMatrix::identity(config.n);
  HadamardModel exact;
  std::vector<std::size_t> ranks = config.ranks;
  if (config.exact_init) {
    if (config.n != cap)
      throw std::invalid_argument("recovery: exact init needs n equal to the capacity");
    IdentityDecomposition dec = build_identity_decomposition(config.budget);
    std::vector<std::size_t> a = dec.ranks, b = config.ranks;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) throw std::invalid_argument("recovery: exact init needs the optimal partition");
    ranks = dec.ranks;
    exact = dec.to_model();
  }
  SolverOptions opts = config.solver;
  opts.ranks = ranks;

  RecoveryStats stats;
  stats.trials = config.trials;
  stats.errors.assign(config.trials, 0.0);
  auto run_trial = [&](std::size_t k) {
    HadamardModel init = config.exact_init
                             ? exact
                             : init_random(config.n, config.n, ranks, config.seed + k);
    if (config.optimal_scaling) init = optimal_scale(x, std::move(init)).model;
    try {
      stats.errors[k] = run_multi(x, std::move(init), opts).second.final_error();
    } catch (const NonFiniteError&) {
      stats.errors[k] = std::numeric_limits<double>::infinity();
    }
  };

  std::size_t workers = config.trial_threads == 0
                            ? std::max(1u, std::thread::hardware_concurrency())
                            : config.trial_threads;
  workers = std::min(workers, config.trials);
  if (workers <= 1) {
    for (std::size_t k = 0; k < config.trials; ++k) run_trial(k);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < config.trials; k += workers) run_trial(k);
      });
    }
  }

  double total = 0.0;
  for (double e : stats.errors) {
    if (e < config.success_threshold) ++stats.successes;
    total += e;
  }
  const double count = static_cast<double>(config.trials);
  stats.success_rate = static_cast<double>(stats.successes) / count;
  stats.mean_error = total / count;
  if (config.trials > 1) {
    double ss = 0.0;
    for (double e : stats.errors) ss += (e - stats.mean_error) * (e - stats.mean_error);
    stats.std_error = std::sqrt(ss / (count - 1.0));
  }
  return stats;
}

}  // namespace hadamard
