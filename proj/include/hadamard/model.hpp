#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hadamard/densemat.hpp"

namespace hadamard {

/// One low-rank term W H with W m x r and H r x n.
struct FactorPair {
  DenseMatrix w;
  DenseMatrix h;

  std::size_t rank() const { return w.cols(); }
  DenseMatrix product() const { return matmul(w, h); }
};

/// Entrywise product of equally shaped matrices. Each entry multiplies its
/// operands in ascending order of value, so the result does not depend on
/// the order of `terms` (bitwise).
DenseMatrix hadamard_product(std::span<const DenseMatrix> terms);

/// X~ = (W1 H1) o (W2 H2) o ... o (Wp Hp), with the reconstruction cached.
///
/// The cache is refreshed lazily after any mutation through set_w/set_h/
/// factors_mut.
class HadamardModel {
 public:
  HadamardModel() = default;
  /// Throws DimensionError if the pairs do not share m and n or a pair's
  /// inner dimensions disagree.
  explicit HadamardModel(std::vector<FactorPair> factors);

  std::size_t p() const { return factors_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;
  std::vector<std::size_t> ranks() const;

  const FactorPair& factor(std::size_t i) const { return factors_.at(i); }
  const std::vector<FactorPair>& factors() const { return factors_; }

  void set_w(std::size_t i, DenseMatrix w);
  void set_h(std::size_t i, DenseMatrix h);
  /// Mutable access; invalidates the cached reconstruction.
  std::vector<FactorPair>& factors_mut();

  /// Products W_i H_i, in factor order.
  std::vector<DenseMatrix> products() const;
  const DenseMatrix& recon() const;

 private:
  void check_shapes() const;

  std::vector<FactorPair> factors_;
  mutable DenseMatrix recon_;
  mutable bool clean_ = false;
};

/// Hadamard product of W_j H_j over all j != i (all-ones when p = 1).
DenseMatrix others_product(const HadamardModel& model, std::size_t i);

}  // namespace hadamard
