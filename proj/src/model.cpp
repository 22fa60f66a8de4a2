#include "hadamard/model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "hadamard/error.hpp"

namespace hadamard {

DenseMatrix hadamard_product(std::span<const DenseMatrix> terms) {
  if (terms.empty()) throw std::invalid_argument("hadamard_product: no terms");
  const std::size_t rows = terms[0].rows();
  const std::size_t cols = terms[0].cols();
  for (const auto& t : terms) {
    if (t.rows() != rows || t.cols() != cols)
      throw DimensionError("hadamard_product: shape mismatch");
  }
  if (terms.size() == 1) return terms[0];
  if (terms.size() == 2) return hadamard(terms[0], terms[1]);

  DenseMatrix out(rows, cols);
  std::vector<double> vals(terms.size());
  auto od = out.data();
  for (std::size_t k = 0; k < od.size(); ++k) {
    for (std::size_t t = 0; t < terms.size(); ++t) vals[t] = terms[t].data()[k];
    std::sort(vals.begin(), vals.end());
    double acc = vals[0];
    for (std::size_t t = 1; t < vals.size(); ++t) acc *= vals[t];
    od[k] = acc;
  }
  return out;
}

HadamardModel::HadamardModel(std::vector<FactorPair> factors) : factors_(std::move(factors)) {
  check_shapes();
}

void HadamardModel::check_shapes() const {
  if (factors_.empty()) return;
  const std::size_t m = factors_[0].w.rows();
  const std::size_t n = factors_[0].h.cols();
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto& f = factors_[i];
    if (f.w.rows() != m || f.h.cols() != n || f.w.cols() != f.h.rows()) {
      throw DimensionError("HadamardModel: factor " + std::to_string(i + 1) +
                           " has inconsistent shape");
    }
  }
}

std::size_t HadamardModel::rows() const { return factors_.empty() ? 0 : factors_[0].w.rows(); }
std::size_t HadamardModel::cols() const { return factors_.empty() ? 0 : factors_[0].h.cols(); }

std::vector<std::size_t> HadamardModel::ranks() const {
  std::vector<std::size_t> out;
  for (const auto& f : factors_) out.push_back(f.rank());
  return out;
}

void HadamardModel::set_w(std::size_t i, DenseMatrix w) {
  auto& f = factors_.at(i);
  if (w.rows() != f.w.rows() || w.cols() != f.w.cols())
    throw DimensionError("HadamardModel::set_w: shape mismatch");
  f.w = std::move(w);
  clean_ = false;
}

void HadamardModel::set_h(std::size_t i, DenseMatrix h) {
  auto& f = factors_.at(i);
  if (h.rows() != f.h.rows() || h.cols() != f.h.cols())
    throw DimensionError("HadamardModel::set_h: shape mismatch");
  f.h = std::move(h);
  clean_ = false;
}

std::vector<FactorPair>& HadamardModel::factors_mut() {
  clean_ = false;
  return factors_;
}

std::vector<DenseMatrix> HadamardModel::products() const {
  std::vector<DenseMatrix> out;
  out.reserve(factors_.size());
  for (const auto& f : factors_) out.push_back(f.product());
  return out;
}

const DenseMatrix& HadamardModel::recon() const {
  if (!clean_) {
    if (factors_.empty()) throw std::logic_error("HadamardModel: no factors");
    check_shapes();
    const auto prods = products();
    recon_ = hadamard_product(prods);
    clean_ = true;
  }
  return recon_;
}

DenseMatrix others_product(const HadamardModel& model, std::size_t i) {
  if (i >= model.p()) throw std::out_of_range("others_product: factor index out of range");
  std::vector<DenseMatrix> terms;
  for (std::size_t j = 0; j < model.p(); ++j)
    if (j != i) terms.push_back(model.factor(j).product());
  if (terms.empty()) return DenseMatrix::ones(model.rows(), model.cols());
  return hadamard_product(terms);
}

}  // namespace hadamard
