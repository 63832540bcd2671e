#pragma once

// Transverse-field Ising chain: problem definition, bitmask Hilbert space,
// W_X parity sectors and the sparse Hamiltonian
//
//   H = -J sum_i sz_i sz_{i+1} + hx sum_i sx_i
//
// Spin convention: bit i of a configuration set means sz_i = +1 (up).

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"

namespace tfim {

using Index = std::int64_t;
using Complex = std::complex<double>;

enum class Boundary { periodic, open };

std::string_view to_string(Boundary b);
Boundary parse_boundary(std::string_view text);

struct ChainSpec {
  int n_sites = 2;
  double coupling_j = 1.0;
  double field_hx = 0.0;
  Boundary boundary = Boundary::periodic;

  /// Throws ContractViolation unless n_sites >= 2, J > 0, hx >= 0 (all finite).
  void validate() const;
  /// Ferromagnetic side of the transition, hx < J.
  bool is_perturbative() const { return field_hx < coupling_j; }
  int bond_count() const { return boundary == Boundary::periodic ? n_sites : n_sites - 1; }
  std::uint64_t site_mask() const { return (std::uint64_t{1} << n_sites) - 1; }

  friend bool operator==(const ChainSpec&, const ChainSpec&) = default;
};

/// -J * bond_count, the energy of both fully polarized states.
double ferromagnetic_energy(const ChainSpec& spec);

/// Number of anti-aligned bonds (domain walls) in a configuration.
int domain_walls(const ChainSpec& spec, std::uint64_t bits);

/// Classical Ising energy -J (aligned - anti-aligned).
double bond_energy(const ChainSpec& spec, std::uint64_t bits);

struct SpinConfiguration {
  std::uint64_t bits = 0;
  friend bool operator==(SpinConfiguration, SpinConfiguration) = default;
  friend auto operator<=>(SpinConfiguration, SpinConfiguration) = default;
};

/// Image under W_X (flip every spin). Involution without fixed points.
inline SpinConfiguration global_flip(SpinConfiguration s, int n_sites) {
  return {s.bits ^ ((std::uint64_t{1} << n_sites) - 1)};
}

inline SpinConfiguration all_down(int) { return {0}; }
inline SpinConfiguration all_up(int n_sites) { return {(std::uint64_t{1} << n_sites) - 1}; }

/// Eigenvalue of W_X labelling a symmetry sector.
class ParitySector {
 public:
  explicit ParitySector(int eigenvalue);
  static ParitySector even() { return ParitySector(+1); }
  static ParitySector odd() { return ParitySector(-1); }

  int eigenvalue() const { return eigenvalue_; }
  ParitySector opposite() const { return ParitySector(-eigenvalue_); }
  friend bool operator==(ParitySector, ParitySector) = default;

 private:
  int eigenvalue_;
};

/// Configurations are 64-bit masks, which bounds every explicit-basis route.
inline constexpr int max_bitmask_sites = 62;

/// Size caps. They are configuration, the defaults reflect what runs in
/// seconds on a workstation.
struct Limits {
  int dense_max_sites = 12;     // dense diagonalization of one sector
  int full_basis_max_sites = 14;
  int lanczos_max_sites = 22;
  int resolvent_max_sites = 14;
  int evolve_max_sites = 12;
};

/// Which Hilbert space a vector or matrix lives in.
struct BasisTag {
  int n_sites = 0;
  std::optional<ParitySector> sector;  // empty = full 2^N basis

  Index dimension() const;
  bool is_full() const { return !sector.has_value(); }
  friend bool operator==(const BasisTag&, const BasisTag&) = default;
};

/// W_X-adapted basis of one sector. Element r stands for
/// (|s_r> + p |flip(s_r)>) / sqrt(2) with s_r the smaller member of its pair.
class SymmetrizedBasis {
 public:
  SymmetrizedBasis(int n_sites, ParitySector sector, std::vector<SpinConfiguration> representatives);

  int n_sites() const { return n_sites_; }
  ParitySector sector() const { return sector_; }
  Index size() const { return static_cast<Index>(representatives_.size()); }
  std::span<const SpinConfiguration> representatives() const { return representatives_; }
  SpinConfiguration representative(Index i) const { return representatives_[static_cast<std::size_t>(i)]; }
  BasisTag tag() const { return {n_sites_, sector_}; }

  /// Position of the pair containing `s`; `flipped` when `s` is the larger
  /// member, in which case <s|e_index> carries the sector sign.
  struct Lookup {
    Index index;
    bool flipped;
  };
  Lookup locate(SpinConfiguration s) const;
  /// Position of `s` if it is a representative.
  std::optional<Index> index_of(SpinConfiguration s) const;

 private:
  int n_sites_;
  ParitySector sector_;
  std::vector<SpinConfiguration> representatives_;
};

/// Throws CapacityError when 2^(N-1) representatives exceed `max_sites`.
SymmetrizedBasis build_parity_basis(const ChainSpec& spec, ParitySector sector, int max_sites = Limits{}.lanczos_max_sites);

nlohmann::json to_json(const SymmetrizedBasis& basis);

/// Row-sorted sparse symmetric matrix of H - energy_reference. The diagonal
/// is stored relative to the reference so that energies close to it keep
/// full relative precision.
class SparseHamiltonian {
 public:
  struct Entry {
    Index column;
    double value;
  };

  SparseHamiltonian(BasisTag basis, double energy_reference, std::vector<Index> row_start, std::vector<Entry> entries);

  Index dimension() const { return static_cast<Index>(row_start_.size()) - 1; }
  const BasisTag& basis() const { return basis_; }
  double energy_reference() const { return energy_reference_; }
  std::span<const Entry> row(Index r) const;
  std::size_t nonzeros() const { return entries_.size(); }

  /// y = (H - energy_reference) x. Rows are independent, so the result does
  /// not depend on the thread count.
  void apply(std::span<const double> x, std::span<double> y) const;
  void apply(std::span<const Complex> x, std::span<Complex> y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  Eigen::MatrixXd to_dense() const;

 private:
  BasisTag basis_;
  double energy_reference_;
  std::vector<Index> row_start_;
  std::vector<Entry> entries_;
};

SparseHamiltonian build_hamiltonian(const ChainSpec& spec, const SymmetrizedBasis& basis, double energy_reference = 0.0);
SparseHamiltonian build_full_hamiltonian(const ChainSpec& spec, double energy_reference = 0.0,
                                         int max_sites = Limits{}.full_basis_max_sites);

nlohmann::json to_json(const SparseHamiltonian& h);

/// Normalized amplitudes over a full or sector basis.
class StateVector {
 public:
  /// Throws ContractViolation if the norm differs from 1 by more than 1e-12
  /// or the dimension does not match the basis.
  StateVector(BasisTag basis, Eigen::VectorXcd amplitudes);
  /// Normalizes first; a zero vector is a contract violation.
  static StateVector normalized(BasisTag basis, Eigen::VectorXcd amplitudes);

  const BasisTag& basis() const { return basis_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Index dimension() const { return amplitudes_.size(); }
  Complex operator[](Index i) const { return amplitudes_[i]; }

 private:
  BasisTag basis_;
  Eigen::VectorXcd amplitudes_;
};

StateVector product_state(int n_sites, SpinConfiguration s);

/// alpha |up...up> + beta e^{i phase} |down...down>, normalized.
StateVector noon_state(int n_sites, double phase, Complex alpha = 1.0, Complex beta = 1.0);

/// W_X |psi> (full basis only).
StateVector apply_string_x(const StateVector& state);
/// <psi|W_X|psi>; on a sector basis this is the sector eigenvalue.
double parity_expectation(const StateVector& state);
/// <psi|W_Z|psi>, a label only since W_Z is not conserved.
double string_z_expectation(const StateVector& state);
/// <psi| sum_i sz_i |psi>.
double magnetization_z(const StateVector& state);

/// Full-basis state built from sector coefficients (not renormalized).
Eigen::VectorXcd embed_sector_vector(const SymmetrizedBasis& basis, const Eigen::VectorXcd& coefficients);
/// Sector coefficients of a full-basis vector, i.e. the projection onto the sector.
Eigen::VectorXcd project_to_sector(const SymmetrizedBasis& basis, const Eigen::VectorXcd& full);

}  // namespace tfim
