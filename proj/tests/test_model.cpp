#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hadamard/error.hpp"
#include "hadamard/init.hpp"
#include "hadamard/model.hpp"
#include "oracles.hpp"

using namespace hadamard;

namespace {

FactorPair random_pair(std::size_t m, std::size_t n, std::size_t r, std::mt19937_64& gen) {
  return {oracle::random_matrix(m, r, gen), oracle::random_matrix(r, n, gen)};
}

}  // namespace

TEST(HadamardModel, ReconstructionMatchesDirectProduct) {
  std::mt19937_64 gen(1);
  for (std::size_t p = 1; p <= 4; ++p) {
    std::vector<FactorPair> f;
    std::vector<DenseMatrix> ws, hs;
    for (std::size_t i = 0; i < p; ++i) {
      f.push_back(random_pair(6, 5, 1 + i, gen));
      ws.push_back(f.back().w);
      hs.push_back(f.back().h);
    }
    const HadamardModel model(f);
    EXPECT_EQ(model.p(), p);
    EXPECT_LE(oracle::max_abs_diff(model.recon(), oracle::direct_hadamard(ws, hs)), 1e-12);
  }
}

TEST(HadamardModel, ShapeMismatchThrows) {
  std::mt19937_64 gen(2);
  EXPECT_THROW(HadamardModel({random_pair(4, 4, 2, gen), random_pair(5, 4, 2, gen)}),
               DimensionError);
  FactorPair bad{DenseMatrix(4, 2), DenseMatrix(3, 4)};
  EXPECT_THROW(HadamardModel({bad}), DimensionError);
}

TEST(HadamardModel, CacheFollowsMutations) {
  std::mt19937_64 gen(3);
  HadamardModel model({random_pair(4, 3, 2, gen), random_pair(4, 3, 2, gen)});
  const DenseMatrix before = model.recon();
  model.set_h(1, scaled(model.factor(1).h, 2.0));
  EXPECT_LE(oracle::max_abs_diff(model.recon(), scaled(before, 2.0)), 1e-12);
  model.factors_mut()[0].w = scaled(model.factor(0).w, 0.5);
  EXPECT_LE(oracle::max_abs_diff(model.recon(), before), 1e-12);
  EXPECT_THROW(model.set_w(0, DenseMatrix(4, 3)), DimensionError);
}

TEST(HadamardProduct, IndependentOfFactorOrderBitwise) {
  std::mt19937_64 gen(4);
  for (int k = 0; k < 10; ++k) {
    std::vector<DenseMatrix> terms;
    for (int i = 0; i < 4; ++i) terms.push_back(oracle::random_matrix(5, 6, gen));
    const DenseMatrix ref = hadamard_product(terms);
    std::sort(terms.begin(), terms.end(),
              [](const DenseMatrix& a, const DenseMatrix& b) { return a(0, 0) < b(0, 0); });
    do {
      EXPECT_EQ(hadamard_product(terms), ref);
    } while (std::next_permutation(terms.begin(), terms.end(),
                                   [](const DenseMatrix& a, const DenseMatrix& b) {
                                     return a(0, 0) < b(0, 0);
                                   }));
  }
}

TEST(HadamardModel, PermutingFactorsKeepsReconstruction) {
  std::mt19937_64 gen(5);
  std::vector<FactorPair> f;
  for (int i = 0; i < 3; ++i) f.push_back(random_pair(7, 7, 2, gen));
  const DenseMatrix ref = HadamardModel(f).recon();
  std::swap(f[0], f[2]);
  EXPECT_EQ(HadamardModel(f).recon(), ref);
  std::swap(f[0], f[1]);
  EXPECT_EQ(HadamardModel(f).recon(), ref);
}

TEST(OthersProduct, TwoFactors) {
  std::mt19937_64 gen(6);
  const HadamardModel model({random_pair(5, 4, 2, gen), random_pair(5, 4, 3, gen)});
  EXPECT_EQ(others_product(model, 1), matmul(model.factor(0).w, model.factor(0).h));
  EXPECT_EQ(others_product(model, 0), matmul(model.factor(1).w, model.factor(1).h));
}

TEST(OthersProduct, AllOnesMiddleFactor) {
  std::mt19937_64 gen(7);
  FactorPair ones{DenseMatrix::ones(5, 1), DenseMatrix::ones(1, 6)};
  const FactorPair a = random_pair(5, 6, 2, gen), c = random_pair(5, 6, 2, gen);
  const HadamardModel model({a, ones, c});
  const DenseMatrix direct = hadamard::hadamard(oracle::naive_matmul(a.w, a.h), oracle::naive_matmul(c.w, c.h));
  EXPECT_LE(oracle::max_abs_diff(others_product(model, 1), direct), 1e-12);
}

TEST(OthersProduct, MatchesDirectOracleForFourFactors) {
  std::mt19937_64 gen(8);
  std::vector<FactorPair> f;
  for (int i = 0; i < 4; ++i) f.push_back(random_pair(6, 6, 2, gen));
  const HadamardModel model(f);
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<DenseMatrix> ws, hs;
    for (std::size_t j = 0; j < 4; ++j) {
      if (j == i) continue;
      ws.push_back(f[j].w);
      hs.push_back(f[j].h);
    }
    EXPECT_LE(oracle::max_abs_diff(others_product(model, i), oracle::direct_hadamard(ws, hs)),
              1e-12);
  }
}

TEST(OthersProduct, SingleFactorGivesOnes) {
  std::mt19937_64 gen(9);
  const HadamardModel model({random_pair(3, 4, 2, gen)});
  EXPECT_EQ(others_product(model, 0), DenseMatrix::ones(3, 4));
}

TEST(RankBound, TwoFactorProductRankAtMostRSquared) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DenseMatrix recon = init_random(20, 20, 3, 2, seed).recon();
    EXPECT_LE(numerical_rank(recon, 1e-9), 9u);
  }
}

TEST(RankBound, MultiFactorProductRankAtMostProductOfRanks) {
  std::mt19937_64 gen(10);
  for (int k = 0; k < 30; ++k) {
    const std::size_t p = 2 + gen() % 3;
    std::vector<std::size_t> ranks(p);
    std::size_t bound = 1;
    for (auto& r : ranks) {
      r = 1 + gen() % 3;
      bound *= r;
    }
    const DenseMatrix recon = init_random(30, 30, ranks, k).recon();
    EXPECT_LE(numerical_rank(recon, 1e-9), std::min<std::size_t>(bound, 30));
  }
}
