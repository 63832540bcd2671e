#include "tfim/ed.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include <Eigen/Eigenvalues>

#include "tfim/errors.hpp"

namespace tfim {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::dense: return "dense";
    case Method::lanczos: return "lanczos";
    case Method::closed_form: return "closed_form";
    case Method::resolvent: return "resolvent";
    case Method::free_fermion: return "free_fermion";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  for (Method m : {Method::dense, Method::lanczos, Method::closed_form, Method::resolvent, Method::free_fermion}) {
    if (text == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(text) + "'");
}

bool SplittingRecord::has_flag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

nlohmann::json to_json(const SplittingRecord& r) {
  nlohmann::json gap = nullptr;
  if (r.excitation_gap) gap = *r.excitation_gap;
  return {{"n", r.spec.n_sites},
          {"j", r.spec.coupling_j},
          {"hx", r.spec.field_hx},
          {"boundary", to_string(r.spec.boundary)},
          {"e_even", r.e_even},
          {"e_odd", r.e_odd},
          {"delta_e", r.delta_e},
          {"lower_sector", r.lower_sector.eigenvalue()},
          {"gap", gap},
          {"method", to_string(r.method)},
          {"flags", r.flags}};
}

namespace {

Method pick_route(const ChainSpec& spec, const EdOptions& options) {
  switch (options.route) {
    case EdRoute::dense: return Method::dense;
    case EdRoute::lanczos: return Method::lanczos;
    case EdRoute::automatic: break;
  }
  return spec.n_sites <= options.dense_auto_max_sites ? Method::dense : Method::lanczos;
}

// Matrix-free (H - E_FM) on a sector, for sizes where CSR storage is heavy.
LinearMap sector_operator(const ChainSpec& spec, const SymmetrizedBasis& basis) {
  return [spec, n = basis.n_sites(), sign = static_cast<double>(basis.sector().eigenvalue())](
             std::span<const double> x, std::span<double> y) {
    const Index dim = static_cast<Index>(x.size());
    const std::uint64_t top = std::uint64_t{1} << (n - 1);
    const std::uint64_t mask = (top << 1) - 1;
    const double two_j = 2.0 * spec.coupling_j;
    const double hx = spec.field_hx;
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < dim; ++r) {
      const auto bits = static_cast<std::uint64_t>(r);
      double acc = two_j * domain_walls(spec, bits) * x[r];
      for (int i = 0; i < n; ++i) {
        const std::uint64_t s = bits ^ (std::uint64_t{1} << i);
        acc += (s & top) ? sign * hx * x[static_cast<Index>(s ^ mask)] : hx * x[static_cast<Index>(s)];
      }
      y[r] = acc;
    }
  };
}

double rayleigh_quotient(const LinearMap& op, const Eigen::VectorXd& v, double* residual) {
  Eigen::VectorXd hv(v.size());
  op({v.data(), static_cast<std::size_t>(v.size())}, {hv.data(), static_cast<std::size_t>(hv.size())});
  const double theta = v.dot(hv) / v.squaredNorm();
  if (residual) *residual = (hv - theta * v).norm();
  return theta;
}

SectorSolution solve_diagonal(const ChainSpec& spec, const SymmetrizedBasis& basis, int count) {
  std::vector<double> diag(static_cast<std::size_t>(basis.size()));
  for (Index r = 0; r < basis.size(); ++r) {
    diag[static_cast<std::size_t>(r)] = 2.0 * spec.coupling_j * domain_walls(spec, basis.representative(r).bits);
  }
  std::partial_sort(diag.begin(), diag.begin() + count, diag.end());
  SectorSolution out;
  out.sector = basis.sector();
  const double e_fm = ferromagnetic_energy(spec);
  for (int i = 0; i < count; ++i) out.energies.push_back(e_fm + diag[static_cast<std::size_t>(i)]);
  out.ground_offset = 0.0;
  out.ground_vector = Eigen::VectorXd::Unit(basis.size(), 0);  // the all-down pair
  out.method = Method::dense;
  return out;
}

}  // namespace

SectorSolution solve_sector(const ChainSpec& spec, ParitySector sector, int count, const EdOptions& options) {
  spec.validate();
  const Method route = pick_route(spec, options);
  const int cap = std::min(route == Method::dense ? options.limits.dense_max_sites : options.limits.lanczos_max_sites,
                           max_bitmask_sites);
  if (spec.n_sites > cap) {
    throw CapacityError(std::string(to_string(route)) + " diagonalization of N=" + std::to_string(spec.n_sites) +
                            " exceeds the limit of " + std::to_string(cap) + " sites",
                        cap);
  }
  const SymmetrizedBasis basis = build_parity_basis(spec, sector, options.limits.lanczos_max_sites);
  if (count < 1 || count > basis.size()) throw ContractViolation("requested level count out of range");
  if (spec.field_hx == 0.0) return solve_diagonal(spec, basis, count);

  const double e_fm = ferromagnetic_energy(spec);
  SectorSolution out;
  out.sector = sector;
  out.method = route;

  LinearMap op;
  std::optional<SparseHamiltonian> csr;
  if (route == Method::dense || spec.n_sites <= 18) {
    csr.emplace(build_hamiltonian(spec, basis, e_fm));
    op = [&h = *csr](std::span<const double> x, std::span<double> y) { h.apply(x, y); };
  } else {
    op = sector_operator(spec, basis);
  }

  if (route == Method::dense) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(csr->to_dense());
    if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0.0, 0);
    for (int i = 0; i < count; ++i) out.energies.push_back(e_fm + es.eigenvalues()[i]);
    out.ground_vector = es.eigenvectors().col(0);
    fix_phase(out.ground_vector);
  } else {
    const LanczosResult lr = lanczos_lowest(op, basis.size(), count, options.lanczos);
    for (const auto& p : lr.pairs) out.energies.push_back(e_fm + p.value);
    out.ground_vector = lr.pairs.front().vector;
  }
  // The shifted diagonal is exact, so the Rayleigh quotient resolves the
  // ground energy relative to E_FM far below eps * |E_FM|.
  out.ground_offset = rayleigh_quotient(op, out.ground_vector, &out.residual);
  out.energies.front() = e_fm + out.ground_offset;
  return out;
}

SectorGround sector_ground(const ChainSpec& spec, ParitySector sector, const EdOptions& options) {
  SectorSolution s = solve_sector(spec, sector, 1, options);
  const BasisTag tag{spec.n_sites, sector};
  return {s.energies.front(), StateVector::normalized(tag, s.ground_vector.cast<Complex>()), s.residual};
}

SplittingRecord tunneling_splitting_ed(const ChainSpec& spec, const EdOptions& options) {
  spec.validate();
  SplittingRecord rec;
  rec.spec = spec;
  if (!spec.is_perturbative()) rec.flags.emplace_back(flags::non_perturbative);

  if (spec.field_hx == 0.0) {
    // H is diagonal: the two ferromagnets are exactly degenerate, and the
    // cheapest excitation is the smallest nonzero number of domain walls
    // (two on a ring, one at an open end).
    const double e_fm = ferromagnetic_energy(spec);
    rec.e_even = rec.e_odd = e_fm;
    rec.delta_e = 0.0;
    rec.lower_sector = ParitySector::even();
    rec.excitation_gap = (spec.boundary == Boundary::periodic ? 4.0 : 2.0) * spec.coupling_j;
    rec.method = Method::dense;
    rec.flags.emplace_back(flags::diagonal_short_circuit);
    return rec;
  }

  const int levels = 2;
  auto solve = [&](ParitySector p) { return solve_sector(spec, p, levels, options); };
  SectorSolution even, odd;
  if (options.concurrent) {
    auto odd_future = std::async(std::launch::async, solve, ParitySector::odd());
    even = solve(ParitySector::even());
    odd = odd_future.get();
  } else {
    even = solve(ParitySector::even());
    odd = solve(ParitySector::odd());
  }

  rec.method = even.method;
  rec.e_even = even.energies.front();
  rec.e_odd = odd.energies.front();
  rec.delta_e = std::abs(odd.ground_offset - even.ground_offset);
  rec.lower_sector = even.ground_offset <= odd.ground_offset ? ParitySector::even() : ParitySector::odd();

  std::vector<double> all{even.energies.begin(), even.energies.end()};
  all.insert(all.end(), odd.energies.begin(), odd.energies.end());
  std::sort(all.begin(), all.end());
  rec.excitation_gap = all[2] - all[0];

  const double resolvable = 100.0 * std::numeric_limits<double>::epsilon() *
                            std::max(std::abs(even.ground_offset), std::abs(odd.ground_offset));
  if (rec.delta_e < resolvable) rec.flags.emplace_back(flags::precision_limited);
  return rec;
}

std::vector<Level> low_spectrum(const ChainSpec& spec, int count, const EdOptions& options) {
  spec.validate();
  const Index half = Index{1} << (spec.n_sites - 1);
  if (count < 1 || count > 2 * half) throw ContractViolation("level count exceeds the Hilbert-space dimension");
  const int per_sector = static_cast<int>(std::min<Index>(count, half));
  std::vector<Level> levels;
  for (ParitySector p : {ParitySector::even(), ParitySector::odd()}) {
    for (double e : solve_sector(spec, p, per_sector, options).energies) levels.push_back({e, p});
  }
  std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.energy < b.energy; });
  levels.erase(levels.begin() + count, levels.end());
  return levels;
}

}  // namespace tfim
