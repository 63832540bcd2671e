#pragma once

// Free-fermion solution of the chain. After a Hadamard rotation and a
// Jordan-Wigner transformation the Hamiltonian is quadratic,
//
//   H = sum_ij c_i^+ A_ij c_j + 1/2 sum_ij (B_ij c_i^+ c_j^+ + h.c.) + const,
//
// with fermion parity (-1)^{N_f} equal to W_X. The single-particle spectrum is
//
//   E(k) = sqrt((2 hx cos k + 2J)^2 + 4 (hx sin k)^2).

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tfim/chain.hpp"
#include "tfim/ed.hpp"
#include "tfim/perturbation.hpp"

namespace tfim {

double dispersion_energy(double coupling_j, double field_hx, double k);

struct DispersionCurve {
  ChainSpec spec;
  std::vector<double> momenta;
  std::vector<double> energies;
  double gap_numeric = 0.0;                 // minimum over the supplied momenta
  std::optional<double> gap_paper_formula;  // 2J sqrt(1 - hx/J), absent for hx > J
  std::vector<std::string> flags;
};

/// Momenta must lie in (-pi, pi].
DispersionCurve dispersion(const ChainSpec& spec, std::span<const double> momenta);

/// `points` equally spaced momenta ending at pi.
std::vector<double> uniform_momenta(int points);

/// Allowed momenta of the ring in a parity sector: antiperiodic
/// k = pi (2m+1)/N for W_X = +1, periodic k = 2 pi m / N for W_X = -1.
std::vector<double> quantized_momenta(int n_sites, ParitySector sector);

struct QuadraticForm {
  Eigen::MatrixXd a;  // symmetric
  Eigen::MatrixXd b;  // antisymmetric
  double constant = 0.0;
};

/// Jordan-Wigner form of the chain. On a ring the closing bond depends on the
/// fermion parity, so the form is specific to `sector`; open chains ignore it.
QuadraticForm jordan_wigner_form(const ChainSpec& spec, ParitySector sector);

struct BdgSolution {
  Eigen::MatrixXd matrix;                  // [[A, B], [-B, -A]]
  Eigen::VectorXd eigenvalues;             // ascending, +-E pairs
  Eigen::VectorXd quasiparticle_energies;  // N non-negative values, ascending
  int vacuum_parity = 1;                   // fermion parity of the quasiparticle vacuum
  double vacuum_energy = 0.0;
};

BdgSolution solve_bdg(const ChainSpec& spec, ParitySector sector);

struct FermionSectorEnergies {
  BigFloat ground;
  double second = 0.0;  // next level with the same parity
};

/// Ring sector energies summed over the quantized momenta in BigFloat.
FermionSectorEnergies ring_sector_energies(const ChainSpec& spec, ParitySector sector);

/// Splitting record (method free_fermion). Rings use the momentum sums,
/// open chains the real-space Bogoliubov solution, where the splitting is the
/// smallest quasiparticle energy.
SplittingRecord bogoliubov_sector_oracle(const ChainSpec& spec);

}  // namespace tfim
