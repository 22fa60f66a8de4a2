#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace hadamard {

using Vector = std::vector<double>;

/// Row-major dense real matrix. Every factor, target and product in the
/// library is one of these.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Takes ownership of row-major `data`; throws DimensionError unless
  /// data.size() == rows * cols.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  /// Literal construction, one braced list per row.
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix zeros(std::size_t rows, std::size_t cols);
  static DenseMatrix ones(std::size_t rows, std::size_t cols);
  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  /// Column j as a copy.
  Vector col(std::size_t j) const;
  void set_col(std::size_t j, std::span<const double> values);

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  DenseMatrix transpose() const;

  bool all_finite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);
double frobenius_norm(const DenseMatrix& a);
/// Frobenius inner product <a, b>.
double inner(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scaled(const DenseMatrix& a, double factor);

/// ||x - recon||_F / ||x||_F. Throws ZeroInputError when ||x|| = 0.
double relative_error(const DenseMatrix& x, const DenseMatrix& recon);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
/// y = a * x for a square or rectangular a.
Vector matvec(const DenseMatrix& a, std::span<const double> x);

// ---------------------------------------------------------------------------
// Symmetric positive (semi)definite solve.

struct SpdSolution {
  Vector x;
  /// The plain Cholesky factorization failed and a diagonal ridge was added.
  bool ridged = false;
  /// The ridged system failed too; x comes from a pivot-clamped
  /// factorization and should be treated as best effort.
  bool singular = false;
};

/// Relative ridge applied to a failed Cholesky: eps * trace(h) / r.
inline constexpr double kSpdRidgeEps = 1e-12;

/// Solves h x = d by Cholesky. A pivot at or below 1e-14 * max(diag(h)) counts
/// as failure, after which h + eps*trace(h)/r * I is factored once more.
/// Throws std::invalid_argument if h is not symmetric within 1e-10 relative.
SpdSolution solve_spd(const DenseMatrix& h, std::span<const double> d);

// ---------------------------------------------------------------------------
// Truncated SVD.

struct SvdOptions {
  double tol = 1e-10;
  std::size_t max_sweeps = 500;
};

struct SvdTruncation {
  DenseMatrix u;      // m x r, unit columns
  Vector sigma;       // r values, nonincreasing
  DenseMatrix v;      // n x r, unit columns
  bool converged = true;
  std::size_t sweeps = 0;
};

/// Top-r singular triplets by one-sided (Hestenes) Jacobi. Requires
/// 1 <= r <= min(m, n). When the rotations have not settled after
/// `max_sweeps` sweeps the best result so far is returned with
/// converged = false.
SvdTruncation truncated_svd(const DenseMatrix& a, std::size_t r,
                            const SvdOptions& opts = {});

/// u * Diag(sigma) * v^T.
DenseMatrix reconstruct(const SvdTruncation& svd);

/// Number of singular values above rel_threshold * sigma_1.
std::size_t numerical_rank(const DenseMatrix& a, double rel_threshold = 1e-9);

// ---------------------------------------------------------------------------
// K-means over matrix columns.

struct KMeansResult {
  DenseMatrix centroids;                // m x r
  std::vector<std::size_t> assignment;  // one cluster index per column
  double sse = 0.0;                     // within-cluster sum of squares
  std::size_t iterations = 0;
};

/// Lloyd's algorithm on the n columns of `a` with k-means++ seeding.
/// Clusters that empty out are re-seeded with the column farthest from its
/// current centroid. Deterministic given `seed`. Requires 1 <= r <= n.
KMeansResult kmeans_columns(const DenseMatrix& a, std::size_t r, std::uint64_t seed,
                            std::size_t max_iters = 300);

}  // namespace hadamard
