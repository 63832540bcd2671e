#include "tfim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <Eigen/Eigenvalues>

#include "tfim/perturbation.hpp"

namespace tfim {

double noon_fidelity(Complex amplitude_up, Complex amplitude_down) {
  return 0.5 * (std::norm(amplitude_up) + std::norm(amplitude_down)) + std::abs(amplitude_up) * std::abs(amplitude_down);
}

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

struct SectorSpectrum {
  SymmetrizedBasis basis;
  SparseHamiltonian hamiltonian;  // relative to E_FM
  Eigen::VectorXd energies;       // relative to E_FM
  Eigen::MatrixXcd vectors;
  Eigen::VectorXcd coefficients;  // initial state in the eigenbasis
};

SectorSpectrum decompose(const ChainSpec& spec, ParitySector sector, const Eigen::VectorXcd& initial) {
  SymmetrizedBasis basis = build_parity_basis(spec, sector);
  SparseHamiltonian h = build_hamiltonian(spec, basis, ferromagnetic_energy(spec));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.to_dense());
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", 0.0, 0);
  Eigen::VectorXd energies = es.eigenvalues();
  // The ground pair fixes the slow tunneling phase; take its energy from the
  // Rayleigh quotient, which is accurate far below eps * ||H||.
  const Eigen::VectorXd g = es.eigenvectors().col(0);
  energies[0] = g.dot(h.apply(g));
  Eigen::MatrixXcd vectors = es.eigenvectors().cast<Complex>();
  Eigen::VectorXcd coefficients = vectors.adjoint() * project_to_sector(basis, initial);
  return {std::move(basis), std::move(h), std::move(energies), std::move(vectors), std::move(coefficients)};
}

double sector_energy(const SparseHamiltonian& h, const Eigen::VectorXcd& phi) {
  Eigen::VectorXcd hphi(phi.size());
  h.apply(std::span<const Complex>(phi.data(), static_cast<std::size_t>(phi.size())),
          std::span<Complex>(hphi.data(), static_cast<std::size_t>(hphi.size())));
  return phi.dot(hphi).real();
}

// One local maximum of a sampled curve refined by the vertex of the parabola
// through its neighbours.
double parabolic_vertex(const std::vector<double>& t, const std::vector<double>& y, std::size_t i) {
  if (i == 0 || i + 1 >= y.size()) return t[i];
  const double h = t[i + 1] - t[i];
  if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::abs(h)) return t[i];
  const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
  if (denom >= 0.0) return t[i];
  const double shift = 0.5 * (y[i - 1] - y[i + 1]) / denom;
  return t[i] + std::clamp(shift, -0.5, 0.5) * h;
}

// Centres of the first `count` excursions of y from `base` toward `top`. An
// excursion opens above 60% of the way and closes below 40%, which ignores
// fast wiggles; its centre is the centroid of the part above half height, so
// the wiggles average out instead of displacing a single sample or crossing.
std::vector<double> excursion_centres(const std::vector<double>& t, const std::vector<double>& y, double base,
                                      double top, std::size_t count) {
  std::vector<double> centres;
  const double span = top - base;
  if (!(span > 0.0)) return centres;
  const double half = base + 0.5 * span;
  bool inside = false;
  bool armed = y.front() < base + 0.4 * span;
  double mass = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < y.size() && centres.size() < count; ++i) {
    const double dt = 0.5 * (t[std::min(i + 1, t.size() - 1)] - t[i == 0 ? 0 : i - 1]);
    const double w = std::max(y[i] - half, 0.0) * dt;
    mass += w;
    moment += w * t[i];
    if (armed && y[i] > base + 0.6 * span) inside = true;
    if (y[i] < base + 0.4 * span) {
      if (inside && mass > 0.0) centres.push_back(moment / mass);
      inside = false;
      armed = true;
      mass = moment = 0.0;
    }
  }
  return centres;
}

}  // namespace

EvolutionTrace evolve(const ChainSpec& spec, const StateVector& initial, std::span<const double> times,
                      const Limits& limits) {
  spec.validate();
  if (spec.n_sites > std::min(limits.evolve_max_sites, max_bitmask_sites)) {
    throw CapacityError("evolve: N=" + std::to_string(spec.n_sites) + " exceeds the exact-evolution limit of " +
                            std::to_string(limits.evolve_max_sites) + " sites; use two_level_predict instead",
                        limits.evolve_max_sites);
  }
  if (!initial.basis().is_full() || initial.basis().n_sites != spec.n_sites) {
    throw ContractViolation("evolve: initial state must be a full-basis state of the same chain");
  }

  const SectorSpectrum even = decompose(spec, ParitySector::even(), initial.amplitudes());
  const SectorSpectrum odd = decompose(spec, ParitySector::odd(), initial.amplitudes());
  const double e_fm = ferromagnetic_energy(spec);

  EvolutionTrace trace;
  trace.spec = spec;
  trace.times.assign(times.begin(), times.end());
  const std::size_t count = trace.times.size();
  for (auto* v : {&trace.noon_fidelity, &trace.pop_down, &trace.pop_up, &trace.parity, &trace.leakage, &trace.norm,
                  &trace.energy}) {
    v->resize(count);
  }

  constexpr std::size_t chunk = 64;
  for (std::size_t first = 0; first < count; first += chunk) {
    const auto width = static_cast<Index>(std::min(chunk, count - first));
    auto propagate = [&](const SectorSpectrum& s) {
      Eigen::MatrixXcd phased(s.energies.size(), width);
      for (Index c = 0; c < width; ++c) {
        const double t = trace.times[first + static_cast<std::size_t>(c)];
        for (Index k = 0; k < s.energies.size(); ++k) {
          phased(k, c) = std::polar(1.0, -s.energies[k] * t) * s.coefficients[k];
        }
      }
      return Eigen::MatrixXcd(s.vectors * phased);
    };
    const Eigen::MatrixXcd phi_even = propagate(even);
    const Eigen::MatrixXcd phi_odd = propagate(odd);

    for (Index c = 0; c < width; ++c) {
      const std::size_t i = first + static_cast<std::size_t>(c);
      // representative 0 is the all-down pair, its partner is all-up
      const Complex down = kInvSqrt2 * (phi_even(0, c) + phi_odd(0, c));
      const Complex up = kInvSqrt2 * (phi_even(0, c) - phi_odd(0, c));
      const double w_even = phi_even.col(c).squaredNorm();
      const double w_odd = phi_odd.col(c).squaredNorm();
      trace.pop_down[i] = std::norm(down);
      trace.pop_up[i] = std::norm(up);
      trace.noon_fidelity[i] = noon_fidelity(up, down);
      trace.norm[i] = std::sqrt(w_even + w_odd);
      trace.parity[i] = w_even - w_odd;
      trace.leakage[i] = std::max(0.0, w_even + w_odd - trace.pop_down[i] - trace.pop_up[i]);
      trace.energy[i] = e_fm * (w_even + w_odd) + sector_energy(even.hamiltonian, phi_even.col(c)) +
                        sector_energy(odd.hamiltonian, phi_odd.col(c));
    }
  }
  return trace;
}

EvolutionTrace two_level_predict(double delta_e, std::span<const double> times) {
  if (!(delta_e > 0.0)) throw ContractViolation("two_level_predict needs a positive splitting");
  EvolutionTrace trace;
  trace.times.assign(times.begin(), times.end());
  for (double t : trace.times) {
    const double s = std::sin(0.5 * delta_e * t);
    const double c = std::cos(0.5 * delta_e * t);
    trace.pop_up.push_back(s * s);
    trace.pop_down.push_back(c * c);
    trace.noon_fidelity.push_back(0.5 + std::abs(s * c));
    trace.parity.push_back(0.0);
    trace.leakage.push_back(0.0);
    trace.norm.push_back(1.0);
    trace.energy.push_back(0.0);
  }
  return trace;
}

NoonSummary noon_fidelity_curve(const EvolutionTrace& trace) {
  if (trace.size() < 3) throw ContractViolation("noon_fidelity_curve needs at least three samples");
  NoonSummary out;
  const auto& f = trace.noon_fidelity;
  const auto& pu = trace.pop_up;

  const auto i_max = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
  out.f_max = f[i_max];
  // NOON peaks recur with heights equal up to the fast leakage wiggles, and
  // the top of each is flat enough for those wiggles to move the raw argmax.
  const auto f_peaks = excursion_centres(trace.times, f, f.front(), out.f_max, 1);
  out.t_star = f_peaks.empty() ? parabolic_vertex(trace.times, f, i_max) : f_peaks.front();

  const double pu_max = *std::max_element(pu.begin(), pu.end());
  if (pu_max < 1e-6) {
    out.flags.emplace_back("no_oscillation");
    return out;
  }
  const auto maxima = excursion_centres(trace.times, pu, 0.0, pu_max, 2);
  if (maxima.size() < 2) {
    double horizon = std::numeric_limits<double>::quiet_NaN();
    if (trace.spec && trace.spec->is_perturbative() && trace.spec->field_hx > 0.0) {
      horizon = 2.0 * std::numbers::pi / splitting_closed_form(*trace.spec);
    }
    throw TraceTooShort("trace spans fewer than two pop_up maxima; required horizon about " + std::to_string(horizon),
                        horizon);
  }
  out.period_measured = maxima[1] - maxima[0];
  out.delta_e_implied = 2.0 * std::numbers::pi / *out.period_measured;
  return out;
}

nlohmann::json to_json(const NoonSummary& s) {
  nlohmann::json period = nullptr, implied = nullptr;
  if (s.period_measured) period = *s.period_measured;
  if (s.delta_e_implied) implied = *s.delta_e_implied;
  return {{"F_max", s.f_max},
          {"t_star", s.t_star},
          {"period_measured", period},
          {"delta_e_implied", implied},
          {"flags", s.flags}};
}

std::vector<double> linear_times(double t0, double t1, int points) {
  if (points < 2 || !(t1 > t0)) throw ContractViolation("time grid needs t1 > t0 and at least two points");
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (points - 1);
  return t;
}

std::vector<double> default_time_grid(const ChainSpec& spec, int points, double periods, const EdOptions& options) {
  spec.validate();
  if (spec.field_hx == 0.0) return linear_times(0.0, 1.0, points);
  double delta_e = 0.0;
  if (spec.n_sites <= options.limits.evolve_max_sites) {
    delta_e = tunneling_splitting_ed(spec, options).delta_e;
  } else {
    delta_e = splitting_closed_form(spec);
  }
  return linear_times(0.0, periods * 2.0 * std::numbers::pi / delta_e, points);
}

}  // namespace tfim
