#include "hadamard/init.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hadamard/error.hpp"
#include "hadamard/rng.hpp"

namespace hadamard {

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::Random: return "random";
    case InitKind::XavierUniform: return "xavier-uniform";
    case InitKind::XavierNormal: return "xavier-normal";
    case InitKind::SvdBased: return "svd";
    case InitKind::KMeansBased: return "kmeans";
  }
  return "unknown";
}

InitKind parse_init_kind(const std::string& name) {
  for (InitKind k : {InitKind::Random, InitKind::XavierUniform, InitKind::XavierNormal,
                     InitKind::SvdBased, InitKind::KMeansBased}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown init kind '" + name + "'");
}

namespace {

template <typename Draw>
HadamardModel sample_model(std::size_t m, std::size_t n, std::span<const std::size_t> ranks,
                           Draw&& draw) {
  std::vector<FactorPair> factors;
  for (std::size_t r : ranks) {
    FactorPair f{DenseMatrix(m, r), DenseMatrix(r, n)};
    for (double& v : f.w.data()) v = draw();
    for (double& v : f.h.data()) v = draw();
    factors.push_back(std::move(f));
  }
  return HadamardModel(std::move(factors));
}

}  // namespace

HadamardModel init_random(std::size_t m, std::size_t n, std::span<const std::size_t> ranks,
                          std::uint64_t seed) {
  Rng rng(seed);
  return sample_model(m, n, ranks, [&] { return rng.normal(); });
}

HadamardModel init_random(std::size_t m, std::size_t n, std::size_t r, std::size_t p,
                          std::uint64_t seed) {
  const std::vector<std::size_t> ranks(p, r);
  return init_random(m, n, ranks, seed);
}

double xavier_uniform_bound(std::size_t m, std::size_t n) {
  return std::sqrt(6.0 / static_cast<double>(m + n));
}

double xavier_normal_stddev(std::size_t m, std::size_t n) {
  return std::sqrt(2.0 / static_cast<double>(m + n));
}

HadamardModel init_xavier(std::size_t m, std::size_t n, std::span<const std::size_t> ranks,
                          std::uint64_t seed, bool uniform) {
  if (m + n == 0) throw std::invalid_argument("init_xavier: m + n must be positive");
  Rng rng(seed);
  if (uniform) {
    const double bound = xavier_uniform_bound(m, n);
    return sample_model(m, n, ranks, [&] { return rng.uniform(-bound, bound); });
  }
  const double sd = xavier_normal_stddev(m, n);
  return sample_model(m, n, ranks, [&] { return sd * rng.normal(); });
}

SignMagnitude split_sign_magnitude(const DenseMatrix& x) {
  SignMagnitude out{DenseMatrix(x.rows(), x.cols()), DenseMatrix(x.rows(), x.cols())};
  auto xd = x.data();
  auto md = out.magnitude.data();
  auto sd = out.signed_magnitude.data();
  for (std::size_t k = 0; k < xd.size(); ++k) {
    const double mag = std::sqrt(std::abs(xd[k]));
    md[k] = mag;
    sd[k] = xd[k] > 0.0 ? mag : (xd[k] < 0.0 ? -mag : 0.0);
  }
  return out;
}

FactorPair svd_factor(const SvdTruncation& svd) {
  const std::size_t r = svd.sigma.size();
  FactorPair f{svd.u, svd.v.transpose()};
  for (std::size_t k = 0; k < r; ++k) {
    const double root = std::sqrt(svd.sigma[k]);
    for (std::size_t i = 0; i < f.w.rows(); ++i) f.w(i, k) *= root;
    for (double& v : f.h.row(k)) v *= root;
  }
  return f;
}

namespace {

void require_rank(const DenseMatrix& x, std::size_t r, const char* who) {
  if (r < 1 || r > std::min(x.rows(), x.cols())) {
    throw std::invalid_argument(std::string(who) + ": rank " + std::to_string(r) +
                                " outside [1, min(m, n)]");
  }
}

}  // namespace

InitResult init_svd2(const DenseMatrix& x, std::size_t r, const SvdOptions& svd_opts) {
  return init_svd_recursive(x, r, 2, svd_opts);
}

HadamardModel init_kmeans(const DenseMatrix& x, std::size_t r, std::uint64_t seed) {
  if (r < 1 || r > x.cols()) throw std::invalid_argument("init_kmeans: need 1 <= r <= n");
  const SignMagnitude parts = split_sign_magnitude(x);
  auto from_clusters = [&](const DenseMatrix& target, std::uint64_t s) {
    KMeansResult km = kmeans_columns(target, r, s);
    DenseMatrix h(r, target.cols(), 0.0);
    for (std::size_t j = 0; j < target.cols(); ++j) h(km.assignment[j], j) = 1.0;
    return FactorPair{std::move(km.centroids), std::move(h)};
  };
  std::vector<FactorPair> factors;
  factors.push_back(from_clusters(parts.magnitude, seed));
  factors.push_back(from_clusters(parts.signed_magnitude, derive_seed(seed, 1)));
  return HadamardModel(std::move(factors));
}

InitResult init_svd_recursive(const DenseMatrix& x, std::size_t r, std::size_t p,
                              const SvdOptions& svd_opts) {
  if (p < 2) throw std::invalid_argument("init_svd_recursive: need p >= 2");
  require_rank(x, r, "init_svd_recursive");
  const std::size_t max_rank = std::min(x.rows(), x.cols());

  InitResult out;
  std::vector<FactorPair> factors;
  DenseMatrix target = x;
  for (std::size_t emitted = 0; emitted + 1 < p; ++emitted) {
    const SignMagnitude parts = split_sign_magnitude(target);
    SvdTruncation mag = truncated_svd(parts.magnitude, r, svd_opts);
    out.svd_unconverged |= !mag.converged;
    factors.push_back(svd_factor(mag));

    const std::size_t still_to_emit = p - emitted - 1;
    if (still_to_emit == 1) {
      SvdTruncation sgn = truncated_svd(parts.signed_magnitude, r, svd_opts);
      out.svd_unconverged |= !sgn.converged;
      factors.push_back(svd_factor(sgn));
    } else {
      const std::size_t rest = std::min(still_to_emit * r, max_rank);
      SvdTruncation sgn = truncated_svd(parts.signed_magnitude, rest, svd_opts);
      out.svd_unconverged |= !sgn.converged;
      target = reconstruct(sgn);
    }
  }
  out.model = HadamardModel(std::move(factors));
  return out;
}

ScaleResult optimal_scale(const DenseMatrix& x, HadamardModel model) {
  const DenseMatrix& recon = model.recon();
  if (recon.rows() != x.rows() || recon.cols() != x.cols())
    throw DimensionError("optimal_scale: model shape does not match the data");
  const double rr = inner(recon, recon);
  ScaleResult out;
  if (rr == 0.0) {
    out.degenerate = true;
    out.model = std::move(model);
    return out;
  }
  const double alpha = inner(recon, x) / rr;
  out.alpha = alpha;
  if (alpha == 0.0 || !std::isfinite(alpha)) {
    out.degenerate = true;
    out.model = std::move(model);
    return out;
  }
  const double per_matrix =
      std::pow(std::abs(alpha), 1.0 / (2.0 * static_cast<double>(model.p())));
  auto& factors = model.factors_mut();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const double w_scale = (i == 0 && alpha < 0.0) ? -per_matrix : per_matrix;
    for (double& v : factors[i].w.data()) v *= w_scale;
    for (double& v : factors[i].h.data()) v *= per_matrix;
  }
  out.model = std::move(model);
  return out;
}

InitOutcome initialize(const DenseMatrix& x, const InitConfig& config) {
  const auto& ranks = config.ranks;
  if (ranks.empty()) throw std::invalid_argument("initialize: no ranks given");
  const bool equal_ranks =
      std::all_of(ranks.begin(), ranks.end(), [&](std::size_t r) { return r == ranks[0]; });
  const std::size_t m = x.rows();
  const std::size_t n = x.cols();

  InitOutcome out;
  switch (config.kind) {
    case InitKind::Random:
      out.model = init_random(m, n, ranks, config.seed);
      break;
    case InitKind::XavierUniform:
    case InitKind::XavierNormal:
      out.model = init_xavier(m, n, ranks, config.seed, config.kind == InitKind::XavierUniform);
      break;
    case InitKind::SvdBased: {
      if (!equal_ranks) throw std::invalid_argument("svd init requires equal ranks");
      InitResult res = init_svd_recursive(x, ranks[0], ranks.size(), config.svd);
      out.model = std::move(res.model);
      out.svd_unconverged = res.svd_unconverged;
      break;
    }
    case InitKind::KMeansBased:
      if (ranks.size() != 2 || !equal_ranks)
        throw std::invalid_argument("kmeans init requires exactly 2 factors of equal rank");
      out.model = init_kmeans(x, ranks[0], config.seed);
      break;
  }
  if (config.optimal_scaling) {
    ScaleResult scaled_model = optimal_scale(x, std::move(out.model));
    out.model = std::move(scaled_model.model);
    out.alpha = scaled_model.alpha;
    out.scaling_degenerate = scaled_model.degenerate;
  }
  return out;
}

}  // namespace hadamard
