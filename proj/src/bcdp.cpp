#include "hadamard/bcdp.hpp"

#include <numeric>
#include <stdexcept>

#include "driver.hpp"

namespace hadamard {

BudgetSpec::BudgetSpec(std::vector<std::size_t> r) : ranks(std::move(r)) {
  if (ranks.size() < 2) throw std::invalid_argument("budget: need at least 2 factors");
  for (std::size_t v : ranks)
    if (v < 1) throw std::invalid_argument("budget: every rank must be >= 1");
}

std::size_t BudgetSpec::budget() const {
  return std::accumulate(ranks.begin(), ranks.end(), std::size_t{0});
}

std::pair<HadamardModel, RunTrace> run_multi(const DenseMatrix& x, HadamardModel init,
                                             const SolverOptions& opts) {
  opts.validate();
  const BudgetSpec budget(init.ranks());
  detail::check_model(x, init, opts);
  const DenseMatrix xt = x.transpose();
  const std::size_t p = budget.p();

  auto sweep = [&](HadamardModel& model, const detail::Commit& commit,
                   detail::SweepStats& stats) {
    const std::size_t threads = detail::worker_count(opts);
    for (std::size_t step = 0; step < p; ++step) {
      const std::size_t i = opts.order == FactorOrder::Ascending ? step : p - 1 - step;
      const DenseMatrix others = others_product(model, i);
      {
        const FactorPair& f = model.factor(i);
        UpdateResult res = update_factor(x, others, f.w, f.h, opts.solver_kind, threads);
        stats.add(res);
        commit(i, detail::Block::H, std::move(res.h));
      }
      {
        const FactorPair& f = model.factor(i);
        UpdateResult res = update_factor(xt, others.transpose(), f.h.transpose(),
                                         f.w.transpose(), opts.solver_kind, threads);
        stats.add(res);
        commit(i, detail::Block::W, res.h.transpose());
      }
    }
  };
  return detail::drive(x, std::move(init), opts, sweep);
}

}  // namespace hadamard
