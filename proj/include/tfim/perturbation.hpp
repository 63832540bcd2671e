#pragma once

// Leading-order degenerate perturbation theory for the tunneling splitting:
// closed forms for ring and open chains, the explicit resolvent series on the
// full Hilbert space, and the associated tunneling times.

#include <optional>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "json.hpp"
#include "tfim/chain.hpp"
#include "tfim/ed.hpp"

namespace tfim {

/// 128-bit mantissa software float.
using BigFloat = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<128, boost::multiprecision::backends::digit_base_2>,
    boost::multiprecision::et_off>;

/// The shortest decimal that round-trips to `x`, read at full BigFloat
/// precision. Parameters typed as 0.1 are therefore evaluated as 1/10.
BigFloat decimal_value(double x);

/// |Delta E| at leading order:
///   periodic  8 N J (hx / 4J)^N
///   open      2 hx^N / (2J)^(N-1)
/// Throws DomainError when hx >= J.
BigFloat splitting_closed_form_exact(const ChainSpec& spec);
double splitting_closed_form(const ChainSpec& spec);

/// <up...up| H_I (R H_I)^order |down...down> with R = Q / (E_FM - H_0) and Q
/// the projector off the two ferromagnets. Vanishes for order < N - 1.
double resolvent_coupling(const ChainSpec& spec, int order, int max_sites = Limits{}.resolvent_max_sites);

struct ResolventResult {
  double delta_e = 0.0;  // 2 |delta E|
  int sign = 0;          // sign of delta E; -1 puts the W_X = +1 sector lower
};

/// Order N-1 resolvent term evaluated on the explicit 2^N basis.
ResolventResult resolvent_oracle(const ChainSpec& spec, int max_sites = Limits{}.resolvent_max_sites);

enum class SplittingSource { closed_form, ed, resolvent };

struct TunnelingTimes {
  double delta_e = 0.0;
  double tau = 0.0;             // hbar / Delta E
  double half_period = 0.0;     // pi / Delta E, full transfer between ferromagnets
  double quarter_period = 0.0;  // pi / (2 Delta E), NOON formation
};

/// Throws DomainError when Delta E = 0.
TunnelingTimes tunneling_times(double delta_e);
TunnelingTimes tunneling_time(const ChainSpec& spec, SplittingSource source, const EdOptions& options = {});

struct PerturbationResult {
  ChainSpec spec;
  int order = 0;
  BigFloat delta_e_closed_exact;
  double delta_e_closed = 0.0;
  std::optional<double> delta_e_resolvent;
  std::optional<int> sign_resolvent;
  std::optional<double> ratio_to_ed;  // resolvent (or closed form) over ED
  std::optional<double> tau;          // 1 / delta_e_closed
};

/// Closed form plus, where the size allows, the resolvent oracle; the ED
/// ratio is filled in when `delta_e_ed` is given.
PerturbationResult analyze_perturbation(const ChainSpec& spec, std::optional<double> delta_e_ed = std::nullopt,
                                        int resolvent_max_sites = Limits{}.resolvent_max_sites);

nlohmann::json to_json(const PerturbationResult& result);

}  // namespace tfim
