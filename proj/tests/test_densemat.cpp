#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hadamard/densemat.hpp"
#include "hadamard/error.hpp"
#include "oracles.hpp"

using namespace hadamard;

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  std::mt19937_64 gen(1);
  const DenseMatrix a = oracle::random_matrix(3, 4, gen);
  EXPECT_EQ(matmul(DenseMatrix::identity(3), a), a);
}

TEST(Matmul, SmallHandExample) {
  const DenseMatrix out = matmul({{1, 2}, {3, 4}}, {{0}, {1}});
  EXPECT_EQ(out, (DenseMatrix{{2}, {4}}));
}

TEST(Matmul, MatchesNaiveLoopBitwise) {
  std::mt19937_64 gen(2);
  for (int k = 0; k < 20; ++k) {
    const DenseMatrix a = oracle::random_matrix(5, 4, gen);
    const DenseMatrix b = oracle::random_matrix(4, 3, gen);
    EXPECT_EQ(matmul(a, b), oracle::naive_matmul(a, b));
  }
}

TEST(Matmul, ShapeMismatchThrows) {
  EXPECT_THROW(matmul(DenseMatrix(2, 3), DenseMatrix(2, 3)), DimensionError);
}

TEST(DenseMatrix, DataLengthMustMatchShape) {
  EXPECT_THROW(DenseMatrix(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
  const DenseMatrix a(2, 2, std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(a(1, 0), 3.0);
  EXPECT_EQ(a.transpose()(0, 1), 3.0);
}

TEST(DenseMatrix, ColumnsAreCopies) {
  DenseMatrix a{{1, 2}, {3, 4}};
  auto c = a.col(1);
  c[0] = 99;
  EXPECT_EQ(a(0, 1), 2.0);
  a.set_col(0, std::vector<double>{7, 8});
  EXPECT_EQ(a, (DenseMatrix{{7, 2}, {8, 4}}));
}

TEST(DenseMatrix, FiniteCheck) {
  DenseMatrix a{{1, 2}};
  EXPECT_TRUE(a.all_finite());
  a(0, 1) = NAN;
  EXPECT_FALSE(a.all_finite());
}

TEST(Hadamard, HandExample) {
  EXPECT_EQ(hadamard::hadamard({{1, -2}, {3, 0}}, {{2, 2}, {-1, 5}}), (DenseMatrix{{2, -4}, {-3, 0}}));
}

TEST(Hadamard, OnesAndZeros) {
  std::mt19937_64 gen(3);
  const DenseMatrix a = oracle::random_matrix(3, 5, gen);
  EXPECT_EQ(hadamard::hadamard(a, DenseMatrix::ones(3, 5)), a);
  EXPECT_EQ(frobenius_norm(hadamard::hadamard(a, DenseMatrix::zeros(3, 5))), 0.0);
}

TEST(Hadamard, CommutesBitwise) {
  std::mt19937_64 gen(4);
  for (int k = 0; k < 10; ++k) {
    const DenseMatrix a = oracle::random_matrix(6, 7, gen);
    const DenseMatrix b = oracle::random_matrix(6, 7, gen);
    EXPECT_EQ(hadamard::hadamard(a, b), hadamard::hadamard(b, a));
  }
}

TEST(Hadamard, ShapeMismatchThrows) {
  EXPECT_THROW(hadamard::hadamard(DenseMatrix(2, 3), DenseMatrix(3, 2)), DimensionError);
}

TEST(FrobeniusNorm, Examples) {
  EXPECT_EQ(frobenius_norm(DenseMatrix::zeros(3, 3)), 0.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(DenseMatrix::identity(4)), 2.0);
  EXPECT_DOUBLE_EQ(frobenius_norm({{3, 4}}), 5.0);
}

TEST(FrobeniusNorm, NoOverflowForHugeEntries) {
  EXPECT_DOUBLE_EQ(frobenius_norm({{3e200, 4e200}}), 5e200);
}

TEST(RelativeError, Examples) {
  std::mt19937_64 gen(5);
  const DenseMatrix x = oracle::random_matrix(4, 4, gen);
  EXPECT_EQ(relative_error(x, x), 0.0);
  EXPECT_DOUBLE_EQ(relative_error(x, DenseMatrix::zeros(4, 4)), 1.0);
  EXPECT_DOUBLE_EQ(relative_error(x, scaled(x, 2.0)), 1.0);
}

TEST(RelativeError, ZeroInputThrows) {
  EXPECT_THROW(relative_error(DenseMatrix::zeros(2, 2), DenseMatrix::ones(2, 2)), ZeroInputError);
}

TEST(SolveSpd, DiagonalExamples) {
  auto r1 = solve_spd(DenseMatrix::identity(2), std::vector<double>{3, -1});
  EXPECT_DOUBLE_EQ(r1.x[0], 3.0);
  EXPECT_DOUBLE_EQ(r1.x[1], -1.0);
  auto r2 = solve_spd({{2, 0}, {0, 4}}, std::vector<double>{2, 4});
  EXPECT_DOUBLE_EQ(r2.x[0], 1.0);
  EXPECT_DOUBLE_EQ(r2.x[1], 1.0);
  EXPECT_FALSE(r2.ridged);
}

DenseMatrix random_spd(std::size_t r, std::mt19937_64& gen) {
  const DenseMatrix g = oracle::random_matrix(r, r, gen);
  return add(oracle::naive_matmul(g.transpose(), g), DenseMatrix::identity(r));
}

TEST(SolveSpd, MatchesGaussianElimination) {
  std::mt19937_64 gen(6);
  for (int k = 0; k < 50; ++k) {
    const DenseMatrix h = random_spd(4, gen);
    const auto d = oracle::random_vector(4, gen);
    EXPECT_LE(oracle::rel_diff(solve_spd(h, d).x, oracle::gauss_solve(h, d)), 1e-10);
  }
}

TEST(SolveSpd, ResidualIsSmallUpToSize32) {
  std::mt19937_64 gen(7);
  for (std::size_t r = 1; r <= 32; ++r) {
    const DenseMatrix h = random_spd(r, gen);
    const auto d = oracle::random_vector(r, gen);
    const auto x = solve_spd(h, d).x;
    const auto hx = matvec(h, x);
    double res = 0.0;
    for (std::size_t i = 0; i < r; ++i) res += (hx[i] - d[i]) * (hx[i] - d[i]);
    EXPECT_LE(std::sqrt(res), 1e-8 * (frobenius_norm(h) * norm2(x) + norm2(d))) << "r=" << r;
  }
}

TEST(SolveSpd, SingularMatrixTakesRidge) {
  const DenseMatrix h{{1, 1}, {1, 1}};
  const auto sol = solve_spd(h, std::vector<double>{2, 2});
  EXPECT_TRUE(sol.ridged);
  for (double v : sol.x) EXPECT_TRUE(std::isfinite(v));
  const auto hx = matvec(h, sol.x);
  EXPECT_NEAR(hx[0], 2.0, 1e-6);
}

TEST(SolveSpd, ZeroMatrixGivesZeroWithoutNan) {
  const auto sol = solve_spd(DenseMatrix::zeros(3, 3), std::vector<double>{0, 0, 0});
  EXPECT_TRUE(sol.ridged);
  for (double v : sol.x) EXPECT_EQ(v, 0.0);
}

TEST(SolveSpd, RejectsAsymmetricInput) {
  EXPECT_THROW(solve_spd({{1, 2}, {0, 1}}, std::vector<double>{1, 1}), std::invalid_argument);
}

TEST(TruncatedSvd, DiagonalMatrix) {
  const DenseMatrix a{{3, 0, 0}, {0, 2, 0}, {0, 0, 1}};
  const auto svd = truncated_svd(a, 2);
  ASSERT_EQ(svd.sigma.size(), 2u);
  EXPECT_NEAR(svd.sigma[0], 3.0, 1e-12);
  EXPECT_NEAR(svd.sigma[1], 2.0, 1e-12);
  EXPECT_TRUE(svd.converged);
}

TEST(TruncatedSvd, RankOneIsReconstructed) {
  DenseMatrix a(5, 4);
  const double u[] = {1, -2, 0.5, 3, 1}, v[] = {2, 1, -1, 0.25};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = u[i] * v[j];
  const auto svd = truncated_svd(a, 1);
  EXPECT_LE(frobenius_norm(subtract(a, reconstruct(svd))), 1e-8 * frobenius_norm(a));
}

TEST(TruncatedSvd, SingularValuesMatchJacobiEigenOracle) {
  std::mt19937_64 gen(8);
  for (int k = 0; k < 10; ++k) {
    const DenseMatrix a = oracle::random_matrix(8, 6, gen);
    const auto ev = oracle::jacobi_eigenvalues(oracle::naive_matmul(a.transpose(), a));
    const auto svd = truncated_svd(a, 3);
    for (int i = 0; i < 3; ++i)
      EXPECT_NEAR(svd.sigma[i], std::sqrt(ev[i]), 1e-6 * std::sqrt(ev[i]));
  }
}

TEST(TruncatedSvd, TripletsAreConsistent) {
  std::mt19937_64 gen(9);
  for (auto [m, n] : {std::pair{7, 5}, std::pair{4, 9}, std::pair{6, 6}}) {
    const DenseMatrix a = oracle::random_matrix(m, n, gen);
    const std::size_t r = std::min(m, n) - 1;
    const auto svd = truncated_svd(a, r);
    for (std::size_t i = 0; i < r; ++i) {
      if (i > 0) EXPECT_LE(svd.sigma[i], svd.sigma[i - 1]);
      const auto ui = svd.u.col(i), vi = svd.v.col(i);
      EXPECT_NEAR(norm2(ui), 1.0, 1e-8);
      EXPECT_NEAR(norm2(vi), 1.0, 1e-8);
      const auto av = matvec(a, vi);
      double res = 0.0;
      for (std::size_t k = 0; k < av.size(); ++k)
        res += (av[k] - svd.sigma[i] * ui[k]) * (av[k] - svd.sigma[i] * ui[k]);
      EXPECT_LE(std::sqrt(res), 1e-10 * svd.sigma[0] * 10);
    }
  }
}

TEST(TruncatedSvd, BeatsRandomRankRMatrices) {
  std::mt19937_64 gen(10);
  const DenseMatrix a = oracle::random_matrix(10, 10, gen);
  for (std::size_t r : {1, 3, 5}) {
    const double best = frobenius_norm(subtract(a, reconstruct(truncated_svd(a, r))));
    for (int k = 0; k < 100; ++k) {
      const DenseMatrix b =
          oracle::naive_matmul(oracle::random_matrix(10, r, gen), oracle::random_matrix(r, 10, gen));
      EXPECT_LE(best, frobenius_norm(subtract(a, b)) + 1e-6);
    }
  }
}

TEST(TruncatedSvd, RankOutOfRangeThrows) {
  EXPECT_THROW(truncated_svd(DenseMatrix(3, 4, 1.0), 0), std::invalid_argument);
  EXPECT_THROW(truncated_svd(DenseMatrix(3, 4, 1.0), 4), std::invalid_argument);
}

TEST(TruncatedSvd, ZeroMatrixHasOrthonormalFactors) {
  const auto svd = truncated_svd(DenseMatrix::zeros(4, 3), 2);
  for (double s : svd.sigma) EXPECT_EQ(s, 0.0);
  EXPECT_NEAR(norm2(svd.u.col(0)), 1.0, 1e-12);
  EXPECT_NEAR(dot(svd.u.col(0), svd.u.col(1)), 0.0, 1e-12);
}

TEST(NumericalRank, AgreesWithPivotedQr) {
  std::mt19937_64 gen(11);
  for (std::size_t r = 1; r <= 6; ++r) {
    const DenseMatrix a =
        oracle::naive_matmul(oracle::random_matrix(12, r, gen), oracle::random_matrix(r, 9, gen));
    EXPECT_EQ(numerical_rank(a), r);
    EXPECT_EQ(oracle::pivoted_qr_rank(a, 1e-9), r);
  }
}

TEST(KMeans, EachColumnItsOwnCluster) {
  std::mt19937_64 gen(12);
  const DenseMatrix a = oracle::random_matrix(4, 5, gen);
  const auto res = kmeans_columns(a, 5, 3);
  EXPECT_NEAR(res.sse, 0.0, 1e-24);
}

TEST(KMeans, SeparatesTwoGroups) {
  std::mt19937_64 gen(13);
  std::normal_distribution<double> noise(0.0, 0.1);
  DenseMatrix a(3, 10);
  std::vector<std::size_t> truth(10);
  for (std::size_t j = 0; j < 10; ++j) {
    truth[j] = j % 2;
    for (std::size_t i = 0; i < 3; ++i) a(i, j) = (truth[j] ? 10.0 : -10.0) + noise(gen);
  }
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto res = kmeans_columns(a, 2, seed);
    // Either labeling of the two groups is acceptable.
    bool same = true, swapped = true;
    for (std::size_t j = 0; j < 10; ++j) {
      same = same && res.assignment[j] == truth[j];
      swapped = swapped && res.assignment[j] == 1 - truth[j];
    }
    EXPECT_TRUE(same || swapped);
  }
}

TEST(KMeans, DeterministicForFixedSeed) {
  std::mt19937_64 gen(14);
  const DenseMatrix a = oracle::random_matrix(5, 30, gen);
  const auto r1 = kmeans_columns(a, 4, 77);
  const auto r2 = kmeans_columns(a, 4, 77);
  EXPECT_EQ(r1.centroids, r2.centroids);
  EXPECT_EQ(r1.assignment, r2.assignment);
}

TEST(KMeans, DuplicateColumnsDoNotLeaveEmptyClusters) {
  DenseMatrix a(2, 6, 1.0);
  a(0, 5) = 2.0;
  const auto res = kmeans_columns(a, 3, 0);
  for (std::size_t j = 0; j < a.cols(); ++j) EXPECT_LT(res.assignment[j], 3u);
  for (double v : res.centroids.data()) EXPECT_TRUE(std::isfinite(v));
}
