#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "tfim/errors.hpp"
#include "tfim/lanczos.hpp"

using namespace tfim;

namespace {

LinearMap dense_map(const Eigen::MatrixXd& m) {
  return [&m](std::span<const double> x, std::span<double> y) {
    Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Index>(y.size())) =
        m * Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Index>(x.size()));
  };
}

Eigen::MatrixXd random_symmetric(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(dim, dim);
  for (Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  return 0.5 * (a + a.transpose());
}

}  // namespace

TEST(Lanczos, LowestEigenpairsOfRandomMatrices) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const Eigen::MatrixXd m = random_symmetric(120, seed);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const auto r = lanczos_lowest(dense_map(m), 120, 3);
    ASSERT_EQ(r.pairs.size(), 3u);
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(r.pairs[static_cast<std::size_t>(k)].value, es.eigenvalues()[k], 1e-10);
      const double overlap = std::abs(r.pairs[static_cast<std::size_t>(k)].vector.dot(es.eigenvectors().col(k)));
      EXPECT_NEAR(overlap, 1.0, 1e-8);
    }
  }
}

TEST(Lanczos, DeterministicForFixedSeed) {
  const Eigen::MatrixXd m = random_symmetric(80, 17);
  const auto a = lanczos_lowest(dense_map(m), 80, 2);
  const auto b = lanczos_lowest(dense_map(m), 80, 2);
  EXPECT_EQ(a.pairs[0].value, b.pairs[0].value);
  EXPECT_EQ(a.pairs[1].vector, b.pairs[1].vector);
}

TEST(Lanczos, DegenerateAndTinyOperators) {
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(10, 10) * 2.5;
  const auto r = lanczos_lowest(dense_map(identity), 10, 2);
  EXPECT_NEAR(r.pairs[0].value, 2.5, 1e-13);
  EXPECT_NEAR(r.pairs[1].value, 2.5, 1e-13);
  EXPECT_NEAR(std::abs(r.pairs[0].vector.dot(r.pairs[1].vector)), 0.0, 1e-12);

  Eigen::MatrixXd one(1, 1);
  one << -3.0;
  EXPECT_DOUBLE_EQ(lanczos_lowest(dense_map(one), 1, 1).pairs[0].value, -3.0);
}

TEST(Lanczos, RestartsWithSmallKrylovSpace) {
  const Eigen::MatrixXd m = random_symmetric(200, 8);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  LanczosOptions opts;
  opts.max_krylov = 25;
  opts.max_restarts = 200;
  const auto r = lanczos_lowest(dense_map(m), 200, 1, opts);
  EXPECT_NEAR(r.pairs[0].value, es.eigenvalues()[0], 1e-9);
}

TEST(Lanczos, ReportsNonConvergence) {
  const Eigen::MatrixXd m = random_symmetric(300, 9);
  LanczosOptions opts;
  opts.max_krylov = 3;
  opts.max_restarts = 1;
  EXPECT_THROW(lanczos_lowest(dense_map(m), 300, 1, opts), ConvergenceError);
}

TEST(Lanczos, ContractChecks) {
  const Eigen::MatrixXd m = random_symmetric(5, 1);
  EXPECT_THROW(lanczos_lowest(dense_map(m), 5, 6), ContractViolation);
  EXPECT_THROW(lanczos_lowest(dense_map(m), 0, 1), ContractViolation);
}

TEST(Lanczos, PhaseFix) {
  Eigen::VectorXd v(3);
  v << 0.1, -0.9, 0.2;
  fix_phase(v);
  EXPECT_GT(v[1], 0.0);
  EXPECT_LT(v[0], 0.0);
}
