#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tfim/ed.hpp"
#include "tfim/errors.hpp"
#include "tfim/free_fermion.hpp"
#include "tfim/perturbation.hpp"

using namespace tfim;

namespace {

ChainSpec chain(int n, double hx, Boundary b = Boundary::periodic, double j = 1.0) { return {n, j, hx, b}; }

EdOptions route(EdRoute r) {
  EdOptions o;
  o.route = r;
  return o;
}

}  // namespace

TEST(SectorGround, ZeroFieldRing) {
  for (ParitySector p : {ParitySector::even(), ParitySector::odd()}) {
    EXPECT_DOUBLE_EQ(sector_ground(chain(4, 0.0), p).energy, -4.0);
  }
}

TEST(SectorGround, TwoSiteOpenChain) {
  const ChainSpec s = chain(2, 0.3, Boundary::open);
  EXPECT_NEAR(sector_ground(s, ParitySector::even()).energy, -std::sqrt(1.36), 1e-14);
  EXPECT_EQ(sector_ground(s, ParitySector::odd()).energy, -1.0);
  const auto g = sector_ground(s, ParitySector::even());
  EXPECT_EQ(g.state.basis(), (BasisTag{2, ParitySector::even()}));
  EXPECT_LT(g.residual, 1e-13);
}

TEST(Splitting, TwoSiteOpenChain) {
  const SplittingRecord r = tunneling_splitting_ed(chain(2, 0.3, Boundary::open));
  EXPECT_NEAR(r.delta_e, std::sqrt(1.36) - 1.0, 1e-14);
  EXPECT_EQ(r.lower_sector, ParitySector::even());
  EXPECT_TRUE(r.flags.empty());
}

TEST(Splitting, ZeroFieldIsExactlyDegenerate) {
  for (int n : {2, 3, 7, 16}) {
    for (Boundary b : {Boundary::periodic, Boundary::open}) {
      const SplittingRecord r = tunneling_splitting_ed(chain(n, 0.0, b));
      EXPECT_EQ(r.delta_e, 0.0);
      EXPECT_TRUE(r.has_flag(flags::diagonal_short_circuit));
      EXPECT_EQ(*r.excitation_gap, b == Boundary::periodic ? 4.0 : 2.0);
    }
  }
}

// The leading-order formula sets the scale; the exact value exceeds it by the
// path multiplicity it leaves out (see the ratio snapshot in the perturbation tests).
TEST(Splitting, SixSiteRingAgainstLeadingOrder) {
  const ChainSpec s = chain(6, 0.1);
  const double ed = tunneling_splitting_ed(s).delta_e;
  const double closed = splitting_closed_form(s);
  EXPECT_NEAR(closed, 1.171875e-8, 1e-20);
  EXPECT_GT(ed / closed, 1.0);
  EXPECT_LT(ed / closed, 64.0);
  EXPECT_NEAR(ed, bogoliubov_sector_oracle(s).delta_e, 1e-8 * ed);
}

TEST(Splitting, FlagsAndSectorBookkeeping) {
  const SplittingRecord strong = tunneling_splitting_ed(chain(6, 1.2));
  EXPECT_TRUE(strong.has_flag(flags::non_perturbative));
  const SplittingRecord tiny = tunneling_splitting_ed(chain(10, 0.02));
  EXPECT_TRUE(tiny.has_flag(flags::precision_limited));
  for (const auto& r : {strong, tiny, tunneling_splitting_ed(chain(5, 0.4, Boundary::open))}) {
    EXPECT_EQ(r.lower_sector == ParitySector::even(), r.e_even <= r.e_odd);
    EXPECT_NEAR(r.delta_e, std::abs(r.e_even - r.e_odd), 1e-12);
  }
}

TEST(Splitting, ConcurrentAndSerialAgree) {
  EdOptions serial;
  serial.concurrent = false;
  const auto a = tunneling_splitting_ed(chain(9, 0.35));
  const auto b = tunneling_splitting_ed(chain(9, 0.35), serial);
  EXPECT_EQ(a.delta_e, b.delta_e);
  EXPECT_EQ(a.e_even, b.e_even);
}

TEST(Splitting, CapacityErrors) {
  EXPECT_THROW(tunneling_splitting_ed(chain(13, 0.2), route(EdRoute::dense)), CapacityError);
  EXPECT_THROW(tunneling_splitting_ed(chain(23, 0.2)), CapacityError);
  EdOptions small = route(EdRoute::lanczos);
  small.limits.lanczos_max_sites = 8;
  EXPECT_THROW(tunneling_splitting_ed(chain(9, 0.2), small), CapacityError);
}

TEST(Splitting, JsonRecord) {
  const auto j = to_json(tunneling_splitting_ed(chain(4, 0.2)));
  for (const char* key : {"n", "j", "hx", "boundary", "e_even", "e_odd", "delta_e", "lower_sector", "gap", "method", "flags"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["method"], "dense");
}

TEST(DenseLanczos, SectorGroundsAgree) {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> u(0.05, 1.5);
  for (int n = 2; n <= 12; ++n) {
    const ChainSpec s = chain(n, u(rng), n % 2 ? Boundary::open : Boundary::periodic);
    for (ParitySector p : {ParitySector::even(), ParitySector::odd()}) {
      const auto d = solve_sector(s, p, 2, route(EdRoute::dense));
      const auto l = solve_sector(s, p, 2, route(EdRoute::lanczos));
      EXPECT_NEAR(d.energies[0], l.energies[0], 1e-10) << "N=" << n;
      EXPECT_NEAR(d.energies[1], l.energies[1], 1e-10) << "N=" << n;
      EXPECT_EQ(d.method, Method::dense);
      EXPECT_EQ(l.method, Method::lanczos);
    }
  }
}

TEST(DenseLanczos, LargeChainAgainstFreeFermions) {
  for (int n : {14, 16}) {
    const ChainSpec s = chain(n, 0.6);
    const auto ed = tunneling_splitting_ed(s);
    EXPECT_EQ(ed.method, Method::lanczos);
    const auto ff = bogoliubov_sector_oracle(s);
    EXPECT_NEAR(ed.delta_e, ff.delta_e, 1e-8 * ff.delta_e) << "N=" << n;
    EXPECT_NEAR(ed.e_even, ff.e_even, 1e-9);
  }
}

TEST(Monotonicity, IncreasingInFieldDecreasingInLength) {
  for (Boundary b : {Boundary::periodic, Boundary::open}) {
    for (int n = 3; n <= 8; ++n) {
      double prev = 0.0;
      for (double hx = 0.1; hx < 0.95; hx += 0.1) {
        const double de = tunneling_splitting_ed(chain(n, hx, b)).delta_e;
        EXPECT_GT(de, prev) << "N=" << n << " hx=" << hx;
        prev = de;
      }
    }
    for (double hx : {0.15, 0.3, 0.6, 0.9}) {
      double prev = 1e300;
      for (int n = 2; n <= 10; ++n) {
        const double de = tunneling_splitting_ed(chain(n, hx, b)).delta_e;
        EXPECT_LT(de, prev) << "N=" << n << " hx=" << hx;
        prev = de;
      }
    }
  }
}

TEST(Variational, SectorGroundsAboveTrivialBound) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const ChainSpec s = chain(2 + trial % 9, u(rng), trial % 2 ? Boundary::open : Boundary::periodic, 0.1 + u(rng));
    for (ParitySector p : {ParitySector::even(), ParitySector::odd()}) {
      EXPECT_GE(sector_ground(s, p).energy, -s.n_sites * s.coupling_j - s.n_sites * s.field_hx - 1e-12);
    }
  }
}

TEST(LowSpectrum, ZeroFieldRing) {
  const auto lv = low_spectrum(chain(4, 0.0), 3);
  EXPECT_EQ(lv[0].energy, -4.0);
  EXPECT_EQ(lv[1].energy, -4.0);
  EXPECT_EQ(lv[2].energy, 0.0);
  EXPECT_NE(lv[0].sector, lv[1].sector);
}

TEST(LowSpectrum, ZeroFieldTwoSiteOpen) {
  const auto lv = low_spectrum(chain(2, 0.0, Boundary::open), 4);
  const std::vector<double> want{-1, -1, 1, 1};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(lv[i].energy, want[i]);
  EXPECT_THROW(low_spectrum(chain(2, 0.0, Boundary::open), 5), ContractViolation);
}

// The first excitation above the tunneling pair costs two quasiparticles
// (two domain walls), so the gap sits near 4(J - hx) rather than 2(J - hx).
TEST(LowSpectrum, EightSiteRingGap) {
  const ChainSpec s = chain(8, 0.2);
  const auto lv = low_spectrum(s, 3);
  const double gap = lv[2].energy - lv[0].energy;
  EXPECT_NEAR(gap, 4.0 * (1.0 - 0.2), 0.1 * 4.0 * (1.0 - 0.2));
  const auto ff = bogoliubov_sector_oracle(s);
  ASSERT_TRUE(ff.excitation_gap.has_value());
  EXPECT_NEAR(*ff.excitation_gap, gap, 1e-10);
  EXPECT_NEAR(*tunneling_splitting_ed(s).excitation_gap, gap, 1e-12);
}

TEST(LowSpectrum, MatchesFullDiagonalization) {
  const ChainSpec s = chain(7, 0.55, Boundary::open);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(oracle::dense_hamiltonian(s), Eigen::EigenvaluesOnly);
  const auto lv = low_spectrum(s, 10);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(lv[static_cast<std::size_t>(i)].energy, es.eigenvalues()[i], 1e-11);
}
