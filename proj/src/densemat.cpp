#include "hadamard/densemat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hadamard/error.hpp"
#include "hadamard/rng.hpp"

namespace hadamard {
namespace {

std::string shape(const DenseMatrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape(a) + " vs " +
                         shape(b));
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("DenseMatrix: data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
  }
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("DenseMatrix: ragged row literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::zeros(std::size_t rows, std::size_t cols) {
  return DenseMatrix(rows, cols, 0.0);
}

DenseMatrix DenseMatrix::ones(std::size_t rows, std::size_t cols) {
  return DenseMatrix(rows, cols, 1.0);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Vector DenseMatrix::col(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = data_[i * cols_ + j];
  return out;
}

void DenseMatrix::set_col(std::size_t j, std::span<const double> values) {
  if (values.size() != rows_) throw DimensionError("set_col: length mismatch");
  for (std::size_t i = 0; i < rows_; ++i) data_[i * cols_ + j] = values[i];
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = data_[i * cols_ + j];
  return out;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions differ " + shape(a) + " * " + shape(b));
  }
  DenseMatrix c(a.rows(), b.cols(), 0.0);
  // i-k-j order: each c(i, j) accumulates a(i, k) * b(k, j) for ascending k.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "hadamard");
  DenseMatrix c(a.rows(), a.cols());
  auto ad = a.data();
  auto bd = b.data();
  auto cd = c.data();
  for (std::size_t k = 0; k < cd.size(); ++k) cd[k] = ad[k] * bd[k];
  return c;
}

double frobenius_norm(const DenseMatrix& a) { return norm2(a.data()); }

double inner(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "inner");
  return dot(a.data(), b.data());
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "add");
  DenseMatrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < cd.size(); ++k) cd[k] += bd[k];
  return c;
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "subtract");
  DenseMatrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < cd.size(); ++k) cd[k] -= bd[k];
  return c;
}

DenseMatrix scaled(const DenseMatrix& a, double factor) {
  DenseMatrix c = a;
  for (double& v : c.data()) v *= factor;
  return c;
}

double relative_error(const DenseMatrix& x, const DenseMatrix& recon) {
  require_same_shape(x, recon, "relative_error");
  const double xnorm = frobenius_norm(x);
  if (xnorm == 0.0) throw ZeroInputError("relative_error: ||X|| = 0");
  auto xd = x.data();
  auto rd = recon.data();
  double acc = 0.0;
  for (std::size_t k = 0; k < xd.size(); ++k) {
    const double diff = xd[k] - rd[k];
    acc += diff * diff;
  }
  return std::sqrt(acc) / xnorm;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

double norm2(std::span<const double> a) {
  // Scaled accumulation so that huge or tiny entries do not overflow/underflow.
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double acc = 0.0;
  for (double v : a) {
    const double t = v / scale;
    acc += t * t;
  }
  return scale * std::sqrt(acc);
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matvec: length mismatch");
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

// ---------------------------------------------------------------------------

namespace {

// In-place lower Cholesky of `l` (only the lower triangle is read). Pivots at
// or below `pivot_floor` are replaced by `clamp` when clamp > 0, otherwise the
// factorization reports failure.
bool cholesky(DenseMatrix& l, double pivot_floor, double clamp) {
  const std::size_t r = l.rows();
  for (std::size_t j = 0; j < r; ++j) {
    double diag = l(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > pivot_floor)) {
      if (clamp <= 0.0) return false;
      diag = clamp;
    }
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < r; ++i) {
      double v = l(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return true;
}

Vector cholesky_solve(const DenseMatrix& l, std::span<const double> d) {
  const std::size_t r = l.rows();
  Vector y(d.begin(), d.end());
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < i; ++k) y[i] -= l(i, k) * y[k];
    y[i] /= l(i, i);
  }
  for (std::size_t ii = r; ii-- > 0;) {
    for (std::size_t k = ii + 1; k < r; ++k) y[ii] -= l(k, ii) * y[k];
    y[ii] /= l(ii, ii);
  }
  return y;
}

}  // namespace

SpdSolution solve_spd(const DenseMatrix& h, std::span<const double> d) {
  const std::size_t r = h.rows();
  if (h.cols() != r) throw DimensionError("solve_spd: h must be square");
  if (d.size() != r) throw DimensionError("solve_spd: rhs length mismatch");

  double max_abs = 0.0;
  double max_diag = 0.0;
  double trace = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    max_diag = std::max(max_diag, h(i, i));
    trace += h(i, i);
    for (std::size_t j = 0; j < r; ++j) max_abs = std::max(max_abs, std::abs(h(i, j)));
  }
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j)
      if (std::abs(h(i, j) - h(j, i)) > 1e-10 * max_abs)
        throw std::invalid_argument("solve_spd: matrix is not symmetric");

  SpdSolution out;
  if (r == 0) return out;

  const double pivot_floor = 1e-14 * max_diag;
  DenseMatrix l = h;
  if (max_diag > 0.0 && cholesky(l, pivot_floor, 0.0)) {
    out.x = cholesky_solve(l, d);
    return out;
  }

  out.ridged = true;
  // trace(h) = 0 means h = 0 for a Gram matrix; an absolute ridge then keeps
  // the factorization well defined and yields x = d / ridge.
  const double ridge =
      trace > 0.0 ? kSpdRidgeEps * trace / static_cast<double>(r) : kSpdRidgeEps;
  DenseMatrix ridged = h;
  for (std::size_t i = 0; i < r; ++i) ridged(i, i) += ridge;
  l = ridged;
  if (cholesky(l, 0.0, 0.0)) {
    out.x = cholesky_solve(l, d);
    return out;
  }
  out.singular = true;
  l = ridged;
  cholesky(l, 0.0, ridge);
  out.x = cholesky_solve(l, d);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Completes column j of u (m x r, columns 0..j-1 orthonormal) with a unit
// vector orthogonal to the previous ones.
void complete_basis_column(DenseMatrix& u, std::size_t j) {
  const std::size_t m = u.rows();
  for (std::size_t e = 0; e < m; ++e) {
    Vector cand(m, 0.0);
    cand[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double proj = 0.0;
        for (std::size_t i = 0; i < m; ++i) proj += u(i, k) * cand[i];
        for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * u(i, k);
      }
    }
    const double nrm = norm2(cand);
    if (nrm > 1e-8) {
      for (std::size_t i = 0; i < m; ++i) u(i, j) = cand[i] / nrm;
      return;
    }
  }
}

SvdTruncation jacobi_svd_tall(const DenseMatrix& a, std::size_t r, const SvdOptions& opts) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  // Columns stored contiguously: work[j] is column j of the rotated A.
  std::vector<Vector> work(n, Vector(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) work[j][i] = a(i, j);
  std::vector<Vector> vcols(n, Vector(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) vcols[j][j] = 1.0;

  const double tol = std::max(opts.tol, 1e-15);
  SvdTruncation out;
  out.converged = false;
  for (std::size_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        Vector& up = work[p];
        Vector& uq = work[q];
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += up[i] * up[i];
          beta += uq[i] * uq[i];
          gamma += up[i] * uq[i];
        }
        if (alpha <= std::numeric_limits<double>::min() ||
            beta <= std::numeric_limits<double>::min())
          continue;
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t =
            std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double xp = up[i];
          const double xq = uq[i];
          up[i] = c * xp - s * xq;
          uq[i] = s * xp + c * xq;
        }
        Vector& vp = vcols[p];
        Vector& vq = vcols[q];
        for (std::size_t i = 0; i < n; ++i) {
          const double xp = vp[i];
          const double xq = vq[i];
          vp[i] = c * xp - s * xq;
          vq[i] = s * xp + c * xq;
        }
      }
    }
    out.sweeps = sweep + 1;
    if (!rotated) {
      out.converged = true;
      break;
    }
  }

  Vector norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = norm2(work[j]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  out.u = DenseMatrix(m, r);
  out.v = DenseMatrix(n, r);
  out.sigma.assign(r, 0.0);
  for (std::size_t k = 0; k < r; ++k) {
    const std::size_t j = order[k];
    const double sigma = norms[j];
    out.sigma[k] = sigma;
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = vcols[j][i];
    if (sigma > std::numeric_limits<double>::min()) {
      for (std::size_t i = 0; i < m; ++i) out.u(i, k) = work[j][i] / sigma;
    } else {
      complete_basis_column(out.u, k);
    }
  }
  return out;
}

}  // namespace

SvdTruncation truncated_svd(const DenseMatrix& a, std::size_t r, const SvdOptions& opts) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (r < 1 || r > std::min(m, n)) {
    throw std::invalid_argument("truncated_svd: rank " + std::to_string(r) +
                                " outside [1, min(m, n)] for " + shape(a));
  }
  if (m >= n) return jacobi_svd_tall(a, r, opts);
  SvdTruncation t = jacobi_svd_tall(a.transpose(), r, opts);
  std::swap(t.u, t.v);
  return t;
}

DenseMatrix reconstruct(const SvdTruncation& svd) {
  DenseMatrix us = svd.u;
  for (std::size_t i = 0; i < us.rows(); ++i)
    for (std::size_t k = 0; k < us.cols(); ++k) us(i, k) *= svd.sigma[k];
  return matmul(us, svd.v.transpose());
}

std::size_t numerical_rank(const DenseMatrix& a, double rel_threshold) {
  const std::size_t k = std::min(a.rows(), a.cols());
  if (k == 0) return 0;
  const SvdTruncation svd = truncated_svd(a, k, SvdOptions{1e-13, 500});
  if (svd.sigma[0] == 0.0) return 0;
  const double cut = rel_threshold * svd.sigma[0];
  return static_cast<std::size_t>(
      std::count_if(svd.sigma.begin(), svd.sigma.end(), [&](double s) { return s > cut; }));
}

// ---------------------------------------------------------------------------

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

KMeansResult kmeans_columns(const DenseMatrix& a, std::size_t r, std::uint64_t seed,
                            std::size_t max_iters) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (r < 1 || r > n) {
    throw std::invalid_argument("kmeans_columns: need 1 <= r <= n, got r=" +
                                std::to_string(r) + " n=" + std::to_string(n));
  }
  // Rows of `points` are the columns of `a`.
  const DenseMatrix points = a.transpose();
  DenseMatrix centers(r, m);
  Rng rng(seed);

  // k-means++ seeding.
  std::vector<bool> chosen(n, false);
  std::size_t first = static_cast<std::size_t>(rng.below(n));
  chosen[first] = true;
  std::copy(points.row(first).begin(), points.row(first).end(), centers.row(0).begin());
  Vector nearest(n);
  for (std::size_t j = 0; j < n; ++j) nearest[j] = squared_distance(points.row(j), centers.row(0));
  for (std::size_t c = 1; c < r; ++c) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double run = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (nearest[j] <= 0.0) continue;
        run += nearest[j];
        pick = j;
        if (run > target) break;
      }
    } else {
      for (std::size_t j = 0; j < n && pick == n; ++j)
        if (!chosen[j]) pick = j;
    }
    chosen[pick] = true;
    std::copy(points.row(pick).begin(), points.row(pick).end(), centers.row(c).begin());
    for (std::size_t j = 0; j < n; ++j)
      nearest[j] = std::min(nearest[j], squared_distance(points.row(j), centers.row(c)));
  }

  KMeansResult out;
  out.assignment.assign(n, 0);
  std::vector<std::size_t> counts(r);
  Vector dist(n);
  for (std::size_t iter = 0; iter < std::max<std::size_t>(max_iters, 1); ++iter) {
    bool changed = false;
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t best = 0;
      double best_d = squared_distance(points.row(j), centers.row(0));
      for (std::size_t c = 1; c < r; ++c) {
        const double dd = squared_distance(points.row(j), centers.row(c));
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      if (iter == 0 || out.assignment[j] != best) changed = true;
      out.assignment[j] = best;
      dist[j] = best_d;
    }
    out.iterations = iter + 1;

    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t j = 0; j < n; ++j) ++counts[out.assignment[j]];
    for (std::size_t c = 0; c < r; ++c) {
      if (counts[c] != 0) continue;
      // Re-seed with the column farthest from its centroid, taken from a
      // cluster that keeps at least one member.
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (counts[out.assignment[j]] > 1 && dist[j] > far_d) {
          far_d = dist[j];
          far = j;
        }
      }
      if (far == n) break;
      --counts[out.assignment[far]];
      out.assignment[far] = c;
      counts[c] = 1;
      dist[far] = 0.0;
      changed = true;
    }

    centers = DenseMatrix(r, m, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      auto crow = centers.row(out.assignment[j]);
      auto prow = points.row(j);
      for (std::size_t i = 0; i < m; ++i) crow[i] += prow[i];
    }
    for (std::size_t c = 0; c < r; ++c) {
      if (counts[c] == 0) continue;
      for (double& v : centers.row(c)) v /= static_cast<double>(counts[c]);
    }
    if (!changed) break;
  }

  out.sse = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    out.sse += squared_distance(points.row(j), centers.row(out.assignment[j]));
  out.centroids = centers.transpose();
  return out;
}

}  // namespace hadamard
