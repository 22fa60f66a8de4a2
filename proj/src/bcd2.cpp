#include "hadamard/bcd2.hpp"

#include <stdexcept>

#include "driver.hpp"

namespace hadamard {
namespace {

using detail::Block;

struct TwoFactorSweep {
  const DenseMatrix& x;
  const DenseMatrix& xt;
  const SolverOptions& opts;

  void operator()(HadamardModel& model, const detail::Commit& commit,
                  detail::SweepStats& stats) const {
    const std::size_t threads = detail::worker_count(opts);
    const auto& kind = opts.solver_kind;
    // Factor index 0 is (W1, H1), index 1 is (W2, H2).
    for (std::size_t updated : {std::size_t{1}, std::size_t{0}}) {
      const std::size_t fixed = 1 - updated;
      {
        const FactorPair& f = model.factor(fixed);
        const FactorPair& u = model.factor(updated);
        UpdateResult res = update_factor(x, matmul(f.w, f.h), u.w, u.h, kind, threads);
        stats.add(res);
        commit(updated, Block::H, std::move(res.h));
      }
      {
        const FactorPair& f = model.factor(fixed);
        const FactorPair& u = model.factor(updated);
        UpdateResult res = update_factor(xt, matmul(f.h.transpose(), f.w.transpose()),
                                         u.h.transpose(), u.w.transpose(), kind, threads);
        stats.add(res);
        commit(updated, Block::W, res.h.transpose());
      }
    }
  }
};

void require_two(const HadamardModel& model) {
  if (model.p() != 2) throw std::invalid_argument("two-factor solver needs exactly 2 factors");
}

}  // namespace

HadamardModel bcd_step(const DenseMatrix& x, HadamardModel model, const SolverOptions& opts) {
  require_two(model);
  detail::check_model(x, model, opts);
  const DenseMatrix xt = x.transpose();
  detail::SweepStats stats;
  detail::Commit commit = [&](std::size_t i, Block b, DenseMatrix upd) {
    if (b == Block::W) model.set_w(i, std::move(upd));
    else model.set_h(i, std::move(upd));
  };
  TwoFactorSweep{x, xt, opts}(model, commit, stats);
  return model;
}

std::pair<HadamardModel, RunTrace> run(const DenseMatrix& x, HadamardModel init,
                                       const SolverOptions& opts) {
  opts.validate();
  require_two(init);
  detail::check_model(x, init, opts);
  const DenseMatrix xt = x.transpose();
  return detail::drive(x, std::move(init), opts, TwoFactorSweep{x, xt, opts});
}

}  // namespace hadamard
