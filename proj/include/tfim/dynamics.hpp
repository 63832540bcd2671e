#pragma once

// Real-time tunneling between the two ferromagnets and NOON-state formation.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfim/chain.hpp"
#include "tfim/ed.hpp"
#include "tfim/errors.hpp"

namespace tfim {

struct EvolutionTrace {
  std::optional<ChainSpec> spec;  // empty for analytic two-level traces
  std::vector<double> times;
  std::vector<double> noon_fidelity;  // max over phi of |<NOON(phi)|psi(t)>|^2
  std::vector<double> pop_down;
  std::vector<double> pop_up;
  std::vector<double> parity;   // <W_X>
  std::vector<double> leakage;  // 1 - pop_down - pop_up
  std::vector<double> norm;
  std::vector<double> energy;  // <H>

  std::size_t size() const { return times.size(); }
};

/// F = (pop_down + pop_up) / 2 + |<up|psi><psi|down>|.
double noon_fidelity(Complex amplitude_up, Complex amplitude_down);

/// psi(t) from the exact eigendecomposition of both W_X sectors, so any t is
/// reachable without step error. Throws CapacityError above
/// limits.evolve_max_sites.
EvolutionTrace evolve(const ChainSpec& spec, const StateVector& initial, std::span<const double> times,
                      const Limits& limits = {});

/// Analytic pseudo-spin trace from |down...down>: pop_up = sin^2(dE t / 2).
EvolutionTrace two_level_predict(double delta_e, std::span<const double> times);

class TraceTooShort : public Error {
 public:
  TraceTooShort(const std::string& what, double required_horizon)
      : Error(what), required_horizon_(required_horizon) {}
  /// Estimated span needed for one full oscillation, 2 pi / Delta E.
  double required_horizon() const { return required_horizon_; }

 private:
  double required_horizon_;
};

struct NoonSummary {
  double f_max = 0.0;
  double t_star = 0.0;  // centre of the first peak of F
  std::optional<double> period_measured;
  std::optional<double> delta_e_implied;  // 2 pi / period
  std::vector<std::string> flags;
};

/// Throws TraceTooShort when pop_up oscillates but fewer than two maxima are
/// in the trace.
NoonSummary noon_fidelity_curve(const EvolutionTrace& trace);

nlohmann::json to_json(const NoonSummary& summary);

std::vector<double> linear_times(double t0, double t1, int points);

/// `points` samples over [0, periods * 2 pi / Delta E], with Delta E from ED
/// when the chain is small enough and the closed form otherwise.
std::vector<double> default_time_grid(const ChainSpec& spec, int points = 512, double periods = 2.2,
                                      const EdOptions& options = {});

}  // namespace tfim
