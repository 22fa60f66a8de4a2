#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hadamard/densemat.hpp"
#include "hadamard/model.hpp"

namespace hadamard {

enum class InitKind { Random, XavierUniform, XavierNormal, SvdBased, KMeansBased };

/// Stable lower-case names: random, xavier-uniform, xavier-normal, svd, kmeans.
std::string to_string(InitKind kind);
/// Throws std::invalid_argument on an unknown name.
InitKind parse_init_kind(const std::string& name);

/// Entries i.i.d. standard normal, drawn W1, H1, W2, H2, ... in row-major order.
HadamardModel init_random(std::size_t m, std::size_t n, std::span<const std::size_t> ranks,
                          std::uint64_t seed);
HadamardModel init_random(std::size_t m, std::size_t n, std::size_t r, std::size_t p,
                          std::uint64_t seed);

/// Bound of the uniform Xavier draw, sqrt(6 / (m + n)).
double xavier_uniform_bound(std::size_t m, std::size_t n);
/// Standard deviation of the normal Xavier draw, sqrt(2 / (m + n)).
double xavier_normal_stddev(std::size_t m, std::size_t n);

HadamardModel init_xavier(std::size_t m, std::size_t n, std::span<const std::size_t> ranks,
                          std::uint64_t seed, bool uniform);

struct SignMagnitude {
  DenseMatrix magnitude;  // sqrt(|x|)
  DenseMatrix signed_magnitude;  // sign(x) * sqrt(|x|), sign(0) = 0
};

SignMagnitude split_sign_magnitude(const DenseMatrix& x);

/// Eckart-Young split of a rank-r truncated SVD: W = U sqrt(S), H = sqrt(S) V^T.
FactorPair svd_factor(const SvdTruncation& svd);

struct InitResult {
  HadamardModel model;
  /// An SVD did not converge within its sweep limit.
  bool svd_unconverged = false;
};

/// W1 H1 = best rank-r approximation of sqrt(|x|), W2 H2 = best rank-r
/// approximation of sign(x) o sqrt(|x|).
InitResult init_svd2(const DenseMatrix& x, std::size_t r, const SvdOptions& svd_opts = {});

/// Same split as init_svd2, with k-means centroids of the columns as W_i and
/// the 0/1 cluster membership as H_i. The signed part clusters with
/// derive_seed(seed, 1).
HadamardModel init_kmeans(const DenseMatrix& x, std::size_t r, std::uint64_t seed);

/// p equal-rank factors. Each step emits a rank-r factor from the magnitude
/// of the current target and replaces the target by the dense rank-(k r)
/// approximation of its signed part, with k the number of factors still to
/// emit; the last factor comes straight from the signed part. The remainder
/// rank is capped at min(m, n). p = 2 reproduces init_svd2.
InitResult init_svd_recursive(const DenseMatrix& x, std::size_t r, std::size_t p,
                              const SvdOptions& svd_opts = {});

struct ScaleResult {
  HadamardModel model;
  double alpha = 1.0;
  /// The reconstruction was zero (or orthogonal to x); model returned unchanged.
  bool degenerate = false;
};

/// Rescales the model by alpha* = <X~, X> / ||X~||^2, spread over the 2p
/// matrices: W1 takes sign(alpha) |alpha|^(1/2p), every other matrix
/// |alpha|^(1/2p).
ScaleResult optimal_scale(const DenseMatrix& x, HadamardModel model);

struct InitConfig {
  InitKind kind = InitKind::SvdBased;
  std::vector<std::size_t> ranks;
  std::uint64_t seed = 0;
  SvdOptions svd;
  bool optimal_scaling = true;
};

struct InitOutcome {
  HadamardModel model;
  bool svd_unconverged = false;
  bool scaling_degenerate = false;
  double alpha = 1.0;
};

/// Builds the initial model for `x` and applies optimal scaling unless
/// disabled. SVD-based init with p > 2 uses the recursive scheme and requires
/// equal ranks; k-means init requires p = 2 and equal ranks.
InitOutcome initialize(const DenseMatrix& x, const InitConfig& config);

}  // namespace hadamard
