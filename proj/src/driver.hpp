#pragma once

// Outer loop shared by the two-factor and the p-factor solvers: error
// tracking, stopping rule, and extrapolation with restart. The solver-specific
// part is the sweep, which performs one outer iteration and hands every
// updated block to a commit callback.

#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "hadamard/error.hpp"
#include "hadamard/solver.hpp"

namespace hadamard::detail {

enum class Block { W, H };

using Commit = std::function<void(std::size_t factor, Block block, DenseMatrix updated)>;

struct SweepStats {
  std::size_t ridged = 0;
  std::size_t singular = 0;

  void add(const UpdateResult& r) {
    ridged += r.ridged_columns;
    singular += r.singular_columns;
  }
};

inline std::size_t worker_count(const SolverOptions& opts) {
  return opts.parallel_columns ? opts.threads : 1;
}

inline void check_model(const DenseMatrix& x, const HadamardModel& model,
                        const SolverOptions& opts) {
  if (model.rows() != x.rows() || model.cols() != x.cols())
    throw DimensionError("solver: model shape does not match the data");
  if (opts.ranks != model.ranks())
    throw std::invalid_argument("solver: model ranks do not match the options");
}

// Sweep: void(HadamardModel&, const Commit&, SweepStats&).
template <typename Sweep>
std::pair<HadamardModel, RunTrace> drive(const DenseMatrix& x, HadamardModel model,
                                         const SolverOptions& opts, Sweep&& sweep) {
  using Clock = std::chrono::steady_clock;
  RunTrace trace;
  SweepStats stats;
  const auto start = Clock::now();
  auto seconds = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  auto error_of = [&](const HadamardModel& m) { return relative_error(x, m.recon()); };

  double prev = error_of(model);
  if (!std::isfinite(prev)) throw NonFiniteError("solver: initial error is not finite");
  trace.entries.push_back({0, 0.0, prev, false});

  auto plain_commit = [&](HadamardModel& target, std::vector<FactorPair>* plain) {
    return Commit([&target, plain](std::size_t i, Block b, DenseMatrix upd) {
      if (plain) (b == Block::W ? (*plain)[i].w : (*plain)[i].h) = upd;
      if (b == Block::W) target.set_w(i, std::move(upd));
      else target.set_h(i, std::move(upd));
    });
  };

  MomentumState state;
  if (opts.momentum) {
    state.beta_k = opts.momentum->beta0;
    state.beta_tilde = 1.0;
    state.prev_factors = model.factors();
    state.prev_error = prev;
  }

  std::size_t stalled = 0;
  for (std::size_t t = 1; t <= opts.max_outer_iters; ++t) {
    double err = 0.0;
    bool restarted = false;
    if (opts.momentum) {
      const HadamardModel snapshot = model;
      const std::vector<FactorPair> snapshot_plain = state.prev_factors;
      const double beta = state.beta_k;
      Commit extrapolating = [&](std::size_t i, Block b, DenseMatrix upd) {
        DenseMatrix& old = b == Block::W ? state.prev_factors[i].w : state.prev_factors[i].h;
        DenseMatrix ext = extrapolate(upd, old, beta);
        old = std::move(upd);
        if (b == Block::W) model.set_w(i, std::move(ext));
        else model.set_h(i, std::move(ext));
      };
      sweep(model, extrapolating, stats);
      err = error_of(model);
      const bool decreased = err < state.prev_error;
      state = beta_update(std::move(state), *opts.momentum, decreased);
      if (!decreased) {
        // Reject the extrapolated iterate and take a plain step from the
        // last accepted point instead.
        model = snapshot;
        state.prev_factors = snapshot_plain;
        sweep(model, plain_commit(model, &state.prev_factors), stats);
        err = error_of(model);
        restarted = true;
      }
      state.prev_error = err;
    } else {
      sweep(model, plain_commit(model, nullptr), stats);
      err = error_of(model);
    }
    if (!std::isfinite(err)) {
      throw NonFiniteError("solver: relative error became non-finite at iteration " +
                           std::to_string(t));
    }
    trace.entries.push_back({t, seconds(), err, restarted});

    stalled = (prev - err < opts.tol_decrease) ? stalled + 1 : 0;
    prev = err;
    if (opts.patience > 0 && stalled >= opts.patience) break;
    if (t == opts.max_outer_iters) trace.hit_max_iters = true;
  }
  trace.ridged_columns = stats.ridged;
  trace.singular_columns = stats.singular;
  return {std::move(model), std::move(trace)};
}

}  // namespace hadamard::detail
