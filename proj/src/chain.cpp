#include "tfim/chain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "tfim/errors.hpp"

namespace tfim {

namespace {

constexpr double kNormTolerance = 1e-12;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

int popcount(std::uint64_t x) { return std::popcount(x); }

void require_full(const StateVector& state, const char* op) {
  if (!state.basis().is_full()) {
    throw ContractViolation(std::string(op) + " needs a full-basis state");
  }
}

void check_full_size(int n_sites) {
  const int cap = Limits{}.full_basis_max_sites;
  if (n_sites > cap) {
    throw CapacityError("full basis with N=" + std::to_string(n_sites) + " exceeds the limit of " +
                            std::to_string(cap) + " sites",
                        cap);
  }
}

}  // namespace

std::string_view to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "open"; }

Boundary parse_boundary(std::string_view text) {
  if (text == "periodic" || text == "pbc") return Boundary::periodic;
  if (text == "open" || text == "obc") return Boundary::open;
  throw ConfigError("unknown boundary '" + std::string(text) + "' (expected periodic or open)");
}

void ChainSpec::validate() const {
  if (n_sites < 2) throw ContractViolation("n_sites must be >= 2, got " + std::to_string(n_sites));
  if (!std::isfinite(coupling_j) || coupling_j <= 0.0) throw ContractViolation("coupling_j must be > 0");
  if (!std::isfinite(field_hx) || field_hx < 0.0) throw ContractViolation("field_hx must be >= 0");
}

double ferromagnetic_energy(const ChainSpec& spec) { return -spec.coupling_j * spec.bond_count(); }

int domain_walls(const ChainSpec& spec, std::uint64_t bits) {
  const int n = spec.n_sites;
  const std::uint64_t mask = spec.site_mask();
  if (spec.boundary == Boundary::periodic) {
    const std::uint64_t rotated = ((bits << 1) | (bits >> (n - 1))) & mask;
    return popcount((bits ^ rotated) & mask);
  }
  return popcount((bits ^ (bits >> 1)) & (mask >> 1));
}

double bond_energy(const ChainSpec& spec, std::uint64_t bits) {
  return -spec.coupling_j * spec.bond_count() + 2.0 * spec.coupling_j * domain_walls(spec, bits);
}

ParitySector::ParitySector(int eigenvalue) : eigenvalue_(eigenvalue) {
  if (eigenvalue != 1 && eigenvalue != -1) {
    throw ContractViolation("parity sector eigenvalue must be +1 or -1");
  }
}

Index BasisTag::dimension() const {
  return sector ? (Index{1} << (n_sites - 1)) : (Index{1} << n_sites);
}

// ---------------------------------------------------------------------------
// SymmetrizedBasis

SymmetrizedBasis::SymmetrizedBasis(int n_sites, ParitySector sector, std::vector<SpinConfiguration> representatives)
    : n_sites_(n_sites), sector_(sector), representatives_(std::move(representatives)) {}

// The smaller member of {s, flip(s)} is the one with the top site down, so
// representatives are exactly 0 .. 2^(N-1)-1 and their index is their value.
SymmetrizedBasis::Lookup SymmetrizedBasis::locate(SpinConfiguration s) const {
  const std::uint64_t top = std::uint64_t{1} << (n_sites_ - 1);
  if (s.bits & top) return {static_cast<Index>(global_flip(s, n_sites_).bits), true};
  return {static_cast<Index>(s.bits), false};
}

std::optional<Index> SymmetrizedBasis::index_of(SpinConfiguration s) const {
  const std::uint64_t top = std::uint64_t{1} << (n_sites_ - 1);
  if (s.bits >= (top << 1) || (s.bits & top)) return std::nullopt;
  return static_cast<Index>(s.bits);
}

SymmetrizedBasis build_parity_basis(const ChainSpec& spec, ParitySector sector, int max_sites) {
  spec.validate();
  max_sites = std::min(max_sites, max_bitmask_sites);
  if (spec.n_sites > max_sites) {
    throw CapacityError("sector basis for N=" + std::to_string(spec.n_sites) + " exceeds the limit of " +
                            std::to_string(max_sites) + " sites",
                        max_sites);
  }
  const int n = spec.n_sites;
  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  std::vector<SpinConfiguration> reps;
  reps.reserve(half);
  for (std::uint64_t b = 0; b < half; ++b) {
    const SpinConfiguration s{b};
    // flip has no fixed points for N >= 1, so every pair has two members
    if (global_flip(s, n) == s) throw ContractViolation("self-paired configuration");
    reps.push_back(s);
  }
  return SymmetrizedBasis(n, sector, std::move(reps));
}

nlohmann::json to_json(const SymmetrizedBasis& basis) {
  nlohmann::json reps = nlohmann::json::array();
  for (auto s : basis.representatives()) reps.push_back(s.bits);
  return {{"n_sites", basis.n_sites()}, {"sector", basis.sector().eigenvalue()}, {"representatives", reps}};
}

// ---------------------------------------------------------------------------
// SparseHamiltonian

SparseHamiltonian::SparseHamiltonian(BasisTag basis, double energy_reference, std::vector<Index> row_start,
                                     std::vector<Entry> entries)
    : basis_(basis),
      energy_reference_(energy_reference),
      row_start_(std::move(row_start)),
      entries_(std::move(entries)) {}

std::span<const SparseHamiltonian::Entry> SparseHamiltonian::row(Index r) const {
  const auto begin = static_cast<std::size_t>(row_start_[static_cast<std::size_t>(r)]);
  const auto end = static_cast<std::size_t>(row_start_[static_cast<std::size_t>(r) + 1]);
  return std::span<const Entry>(entries_).subspan(begin, end - begin);
}

namespace {

template <typename T>
void csr_apply(const std::vector<Index>& row_start, const std::vector<SparseHamiltonian::Entry>& entries,
               std::span<const T> x, std::span<T> y) {
  const Index dim = static_cast<Index>(row_start.size()) - 1;
  if (static_cast<Index>(x.size()) != dim || static_cast<Index>(y.size()) != dim) {
    throw ContractViolation("matvec dimension mismatch");
  }
#pragma omp parallel for schedule(static) if (dim > 8192)
  for (Index r = 0; r < dim; ++r) {
    T acc{};
    for (Index e = row_start[r]; e < row_start[r + 1]; ++e) {
      acc += entries[e].value * x[entries[e].column];
    }
    y[r] = acc;
  }
}

}  // namespace

void SparseHamiltonian::apply(std::span<const double> x, std::span<double> y) const {
  csr_apply(row_start_, entries_, x, y);
}

void SparseHamiltonian::apply(std::span<const Complex> x, std::span<Complex> y) const {
  csr_apply(row_start_, entries_, x, y);
}

Eigen::VectorXd SparseHamiltonian::apply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  apply(std::span<const double>(x.data(), x.size()), std::span<double>(y.data(), y.size()));
  return y;
}

Eigen::MatrixXd SparseHamiltonian::to_dense() const {
  const Index dim = dimension();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (Index r = 0; r < dim; ++r) {
    for (const auto& e : row(r)) m(r, e.column) += e.value;
  }
  return m;
}

namespace {

// Diagonal relative to the reference: the classical energy is
// -J*bonds + 2J*walls, and the constant part cancels exactly against a
// reference equal to the ferromagnetic energy.
double relative_diagonal(const ChainSpec& spec, std::uint64_t bits, double reference) {
  return 2.0 * spec.coupling_j * domain_walls(spec, bits) + (ferromagnetic_energy(spec) - reference);
}

}  // namespace

SparseHamiltonian build_hamiltonian(const ChainSpec& spec, const SymmetrizedBasis& basis, double energy_reference) {
  spec.validate();
  if (basis.n_sites() != spec.n_sites) {
    throw ContractViolation("basis built for N=" + std::to_string(basis.n_sites()) + " used with a spec of N=" +
                            std::to_string(spec.n_sites));
  }
  const int n = spec.n_sites;
  const double hx = spec.field_hx;
  const double sign = basis.sector().eigenvalue();
  const Index dim = basis.size();

  std::vector<Index> row_start;
  row_start.reserve(static_cast<std::size_t>(dim) + 1);
  std::vector<SparseHamiltonian::Entry> entries;
  entries.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(n + 1));
  std::vector<SparseHamiltonian::Entry> row;
  row.reserve(static_cast<std::size_t>(n) + 1);

  row_start.push_back(0);
  for (Index r = 0; r < dim; ++r) {
    const std::uint64_t bits = basis.representative(r).bits;
    row.clear();
    row.push_back({r, relative_diagonal(spec, bits, energy_reference)});
    if (hx != 0.0) {
      for (int i = 0; i < n; ++i) {
        const auto hit = basis.locate({bits ^ (std::uint64_t{1} << i)});
        const double value = hit.flipped ? sign * hx : hx;
        auto it = std::find_if(row.begin(), row.end(), [&](const auto& e) { return e.column == hit.index; });
        if (it == row.end()) {
          row.push_back({hit.index, value});
        } else {
          it->value += value;
        }
      }
    }
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.column < b.column; });
    for (const auto& e : row) {
      if (e.value != 0.0 || e.column == r) entries.push_back(e);
    }
    row_start.push_back(static_cast<Index>(entries.size()));
  }
  return SparseHamiltonian(basis.tag(), energy_reference, std::move(row_start), std::move(entries));
}

SparseHamiltonian build_full_hamiltonian(const ChainSpec& spec, double energy_reference, int max_sites) {
  spec.validate();
  max_sites = std::min(max_sites, max_bitmask_sites);
  if (spec.n_sites > max_sites) {
    throw CapacityError("full-basis Hamiltonian for N=" + std::to_string(spec.n_sites) + " exceeds the limit of " +
                            std::to_string(max_sites) + " sites",
                        max_sites);
  }
  const int n = spec.n_sites;
  const Index dim = Index{1} << n;
  std::vector<Index> row_start;
  row_start.reserve(static_cast<std::size_t>(dim) + 1);
  std::vector<SparseHamiltonian::Entry> entries;
  entries.reserve(static_cast<std::size_t>(dim) * static_cast<std::size_t>(n + 1));
  std::vector<SparseHamiltonian::Entry> row;

  row_start.push_back(0);
  for (Index r = 0; r < dim; ++r) {
    const auto bits = static_cast<std::uint64_t>(r);
    row.clear();
    row.push_back({r, relative_diagonal(spec, bits, energy_reference)});
    if (spec.field_hx != 0.0) {
      for (int i = 0; i < n; ++i) row.push_back({static_cast<Index>(bits ^ (std::uint64_t{1} << i)), spec.field_hx});
    }
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.column < b.column; });
    entries.insert(entries.end(), row.begin(), row.end());
    row_start.push_back(static_cast<Index>(entries.size()));
  }
  return SparseHamiltonian(BasisTag{n, std::nullopt}, energy_reference, std::move(row_start), std::move(entries));
}

nlohmann::json to_json(const SparseHamiltonian& h) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index r = 0; r < h.dimension(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& e : h.row(r)) row.push_back({e.column, e.value});
    rows.push_back(std::move(row));
  }
  nlohmann::json sector = nullptr;
  if (h.basis().sector) sector = h.basis().sector->eigenvalue();
  return {{"n_sites", h.basis().n_sites},
          {"sector", sector},
          {"dimension", h.dimension()},
          {"energy_reference", h.energy_reference()},
          {"rows", rows}};
}

// ---------------------------------------------------------------------------
// StateVector and string operators

StateVector::StateVector(BasisTag basis, Eigen::VectorXcd amplitudes)
    : basis_(basis), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != basis_.dimension()) {
    throw ContractViolation("state dimension " + std::to_string(amplitudes_.size()) + " does not match basis dimension " +
                            std::to_string(basis_.dimension()));
  }
  if (std::abs(amplitudes_.norm() - 1.0) > kNormTolerance) {
    throw ContractViolation("state vector is not normalized");
  }
}

StateVector StateVector::normalized(BasisTag basis, Eigen::VectorXcd amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) throw ContractViolation("cannot normalize a zero vector");
  amplitudes /= norm;
  return StateVector(basis, std::move(amplitudes));
}

StateVector product_state(int n_sites, SpinConfiguration s) {
  check_full_size(n_sites);
  const BasisTag tag{n_sites, std::nullopt};
  if (s.bits >= static_cast<std::uint64_t>(tag.dimension())) throw ContractViolation("configuration wider than chain");
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(tag.dimension());
  a[static_cast<Index>(s.bits)] = 1.0;
  return StateVector(tag, std::move(a));
}

StateVector noon_state(int n_sites, double phase, Complex alpha, Complex beta) {
  if (n_sites < 1) throw ContractViolation("noon_state needs at least one site");
  check_full_size(n_sites);
  const double weight = std::norm(alpha) + std::norm(beta);
  if (!(weight > 0.0)) throw ContractViolation("noon_state weights must not both vanish");
  const BasisTag tag{n_sites, std::nullopt};
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(tag.dimension());
  a[static_cast<Index>(all_up(n_sites).bits)] = alpha;
  a[static_cast<Index>(all_down(n_sites).bits)] = beta * std::polar(1.0, phase);
  return StateVector::normalized(tag, std::move(a));
}

StateVector apply_string_x(const StateVector& state) {
  require_full(state, "apply_string_x");
  const int n = state.basis().n_sites;
  const Index dim = state.dimension();
  Eigen::VectorXcd out(dim);
  for (Index s = 0; s < dim; ++s) {
    out[static_cast<Index>(global_flip({static_cast<std::uint64_t>(s)}, n).bits)] = state[s];
  }
  return StateVector(state.basis(), std::move(out));
}

double parity_expectation(const StateVector& state) {
  if (const auto& sector = state.basis().sector) return sector->eigenvalue();
  const int n = state.basis().n_sites;
  Complex acc = 0.0;
  for (Index s = 0; s < state.dimension(); ++s) {
    acc += std::conj(state[s]) * state[static_cast<Index>(global_flip({static_cast<std::uint64_t>(s)}, n).bits)];
  }
  return acc.real();
}

double string_z_expectation(const StateVector& state) {
  require_full(state, "string_z_expectation");
  const int n = state.basis().n_sites;
  double acc = 0.0;
  for (Index s = 0; s < state.dimension(); ++s) {
    const int down = n - popcount(static_cast<std::uint64_t>(s));
    acc += (down % 2 == 0 ? 1.0 : -1.0) * std::norm(state[s]);
  }
  return acc;
}

double magnetization_z(const StateVector& state) {
  require_full(state, "magnetization_z");
  const int n = state.basis().n_sites;
  double acc = 0.0;
  for (Index s = 0; s < state.dimension(); ++s) {
    acc += (2.0 * popcount(static_cast<std::uint64_t>(s)) - n) * std::norm(state[s]);
  }
  return acc;
}

Eigen::VectorXcd embed_sector_vector(const SymmetrizedBasis& basis, const Eigen::VectorXcd& coefficients) {
  if (coefficients.size() != basis.size()) throw ContractViolation("sector vector dimension mismatch");
  const int n = basis.n_sites();
  const double sign = basis.sector().eigenvalue();
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(Index{1} << n);
  for (Index r = 0; r < basis.size(); ++r) {
    const auto s = basis.representative(r);
    full[static_cast<Index>(s.bits)] += kInvSqrt2 * coefficients[r];
    full[static_cast<Index>(global_flip(s, n).bits)] += sign * kInvSqrt2 * coefficients[r];
  }
  return full;
}

Eigen::VectorXcd project_to_sector(const SymmetrizedBasis& basis, const Eigen::VectorXcd& full) {
  const int n = basis.n_sites();
  if (full.size() != (Index{1} << n)) throw ContractViolation("full vector dimension mismatch");
  const double sign = basis.sector().eigenvalue();
  Eigen::VectorXcd out(basis.size());
  for (Index r = 0; r < basis.size(); ++r) {
    const auto s = basis.representative(r);
    out[r] = kInvSqrt2 * (full[static_cast<Index>(s.bits)] + sign * full[static_cast<Index>(global_flip(s, n).bits)]);
  }
  return out;
}

}  // namespace tfim
