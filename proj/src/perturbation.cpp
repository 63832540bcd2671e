#include "tfim/perturbation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "tfim/errors.hpp"

namespace tfim {

BigFloat decimal_value(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return BigFloat(std::string(buf, res.ptr));
}

BigFloat splitting_closed_form_exact(const ChainSpec& spec) {
  spec.validate();
  if (!spec.is_perturbative()) {
    throw DomainError("perturbative formula invalid outside FM limit (hx >= J)");
  }
  const BigFloat j = decimal_value(spec.coupling_j);
  const BigFloat hx = decimal_value(spec.field_hx);
  const int n = spec.n_sites;
  if (spec.boundary == Boundary::periodic) {
    return 8 * n * j * boost::multiprecision::pow(hx / (4 * j), n);
  }
  return 2 * boost::multiprecision::pow(hx, n) / boost::multiprecision::pow(2 * j, n - 1);
}

double splitting_closed_form(const ChainSpec& spec) { return splitting_closed_form_exact(spec).convert_to<double>(); }

double resolvent_coupling(const ChainSpec& spec, int order, int max_sites) {
  spec.validate();
  if (order < 0) throw ContractViolation("resolvent order must be >= 0");
  max_sites = std::min(max_sites, max_bitmask_sites);
  if (spec.n_sites > max_sites) {
    throw CapacityError("resolvent oracle for N=" + std::to_string(spec.n_sites) + " exceeds the limit of " +
                            std::to_string(max_sites) + " sites",
                        max_sites);
  }
  const int n = spec.n_sites;
  const Index dim = Index{1} << n;
  const auto down = static_cast<Index>(all_down(n).bits);
  const auto up = static_cast<Index>(all_up(n).bits);
  const double hx = spec.field_hx;

  // E_FM - H_0 on configuration s is -2J * walls(s); the ferromagnets are
  // the only zero-wall states and are removed by Q.
  Eigen::VectorXd denominator(dim);
  for (Index s = 0; s < dim; ++s) denominator[s] = -2.0 * spec.coupling_j * domain_walls(spec, static_cast<std::uint64_t>(s));

  auto apply_field = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(dim);
    for (Index s = 0; s < dim; ++s) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) acc += x[s ^ (Index{1} << i)];
      y[s] = hx * acc;
    }
    return y;
  };

  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v[down] = 1.0;
  for (int step = 0; step < order; ++step) {
    v = apply_field(v);
    if (v[up] != 0.0) {
      // fewer than N flips cannot reach the opposite ferromagnet
      throw Error("resolvent series reached the degenerate space before the final step");
    }
    v[down] = 0.0;
    v[up] = 0.0;
    for (Index s = 0; s < dim; ++s) {
      if (s != down && s != up) v[s] /= denominator[s];
    }
  }
  return apply_field(v)[up];
}

ResolventResult resolvent_oracle(const ChainSpec& spec, int max_sites) {
  if (!spec.is_perturbative()) {
    throw DomainError("perturbative formula invalid outside FM limit (hx >= J)");
  }
  const double coupling = resolvent_coupling(spec, spec.n_sites - 1, max_sites);
  return {2.0 * std::abs(coupling), coupling > 0.0 ? 1 : (coupling < 0.0 ? -1 : 0)};
}

TunnelingTimes tunneling_times(double delta_e) {
  if (!(delta_e > 0.0)) throw DomainError("tunneling time is infinite for a vanishing splitting");
  return {delta_e, 1.0 / delta_e, std::numbers::pi / delta_e, std::numbers::pi / (2.0 * delta_e)};
}

TunnelingTimes tunneling_time(const ChainSpec& spec, SplittingSource source, const EdOptions& options) {
  switch (source) {
    case SplittingSource::closed_form: return tunneling_times(splitting_closed_form(spec));
    case SplittingSource::ed: return tunneling_times(tunneling_splitting_ed(spec, options).delta_e);
    case SplittingSource::resolvent:
      return tunneling_times(resolvent_oracle(spec, options.limits.resolvent_max_sites).delta_e);
  }
  throw ContractViolation("unknown splitting source");
}

PerturbationResult analyze_perturbation(const ChainSpec& spec, std::optional<double> delta_e_ed,
                                        int resolvent_max_sites) {
  PerturbationResult out;
  out.spec = spec;
  out.order = spec.n_sites;
  out.delta_e_closed_exact = splitting_closed_form_exact(spec);
  out.delta_e_closed = out.delta_e_closed_exact.convert_to<double>();
  if (out.delta_e_closed > 0.0) out.tau = 1.0 / out.delta_e_closed;
  if (spec.n_sites <= resolvent_max_sites) {
    const ResolventResult r = resolvent_oracle(spec, resolvent_max_sites);
    out.delta_e_resolvent = r.delta_e;
    out.sign_resolvent = r.sign;
  }
  if (delta_e_ed && *delta_e_ed > 0.0) {
    out.ratio_to_ed = out.delta_e_resolvent.value_or(out.delta_e_closed) / *delta_e_ed;
  }
  return out;
}

nlohmann::json to_json(const PerturbationResult& r) {
  auto opt = [](const auto& v) -> nlohmann::json {
    if (v) return *v;
    return nullptr;
  };
  return {{"n", r.spec.n_sites},
          {"j", r.spec.coupling_j},
          {"hx", r.spec.field_hx},
          {"boundary", to_string(r.spec.boundary)},
          {"order", r.order},
          {"delta_e_closed", r.delta_e_closed},
          {"delta_e_closed_decimal", r.delta_e_closed_exact.str(36, std::ios_base::scientific)},
          {"delta_e_resolvent", opt(r.delta_e_resolvent)},
          {"sign_resolvent", opt(r.sign_resolvent)},
          {"ratio_to_ed", opt(r.ratio_to_ed)},
          {"tau", opt(r.tau)}};
}

}  // namespace tfim
