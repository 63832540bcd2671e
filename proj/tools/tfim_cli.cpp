// tfim: command-line front end for the transverse-field Ising tunneling toolkit.
//
//   tfim splitting --n 8 --hx 0.2
//   tfim sweep --sweep hx --grid 0.05:0.5:0.05 --methods dense,free_fermion --format gnuplot-data --out fig.dat
//   tfim compare --n 2 --hx 0.3 --boundary open
//
// Exit codes: 0 success, 2 configuration error, 3 capacity error, 4 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "tfim/chain.hpp"
#include "tfim/dynamics.hpp"
#include "tfim/ed.hpp"
#include "tfim/errors.hpp"
#include "tfim/free_fermion.hpp"
#include "tfim/perturbation.hpp"
#include "tfim/report.hpp"
#include "tfim/sweep.hpp"

using namespace tfim;

namespace {

enum Exit { ok = 0, config_error = 2, capacity_error = 3, numerical_error = 4 };

struct Settings {
  int n = 8;
  double j = 1.0;
  double hx = 0.2;
  std::string boundary = "periodic";
  std::string sweep = "hx";
  std::string grid;
  std::string methods;
  std::string out;
  std::string format = "csv";
  std::string times;
  int levels = 6;
  int points = 1001;
  double j_hz = 0.0;
  int threads = 0;
  int dense_max = Limits{}.dense_max_sites;
  int resolvent_max = Limits{}.resolvent_max_sites;
  int evolve_max = Limits{}.evolve_max_sites;
};

ChainSpec spec_from(const Settings& s) {
  ChainSpec spec{s.n, s.j, s.hx, parse_boundary(s.boundary)};
  try {
    spec.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

Limits limits_from(const Settings& s) {
  Limits l;
  l.dense_max_sites = s.dense_max;
  l.resolvent_max_sites = s.resolvent_max;
  l.evolve_max_sites = s.evolve_max;
  return l;
}

void write_text(const Settings& s, const std::string& text) {
  if (s.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(s.out, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write output file '" + s.out + "'");
  f << text;
  if (!f) throw ConfigError("failed writing '" + s.out + "'");
}

nlohmann::json times_json(double delta_e, double j_hz, double j) {
  const TunnelingTimes t = tunneling_times(delta_e);
  nlohmann::json out = {{"tau", t.tau}, {"half_period", t.half_period}, {"quarter_period", t.quarter_period}};
  if (j_hz > 0.0) {
    // energies in units of J = h * j_hz; hbar / E = 1 / (2 pi j_hz E/J) seconds
    const double to_seconds = j / (2.0 * std::numbers::pi * j_hz);
    out["tau_s"] = t.tau * to_seconds;
    out["half_period_s"] = t.half_period * to_seconds;
    out["quarter_period_s"] = t.quarter_period * to_seconds;
  }
  return out;
}

int cmd_spectrum(const Settings& s) {
  const ChainSpec spec = spec_from(s);
  EdOptions opts;
  opts.limits = limits_from(s);
  const auto levels = low_spectrum(spec, s.levels, opts);
  const ReportFormat fmt = parse_format(s.format);
  if (fmt == ReportFormat::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& l : levels) arr.push_back({{"energy", l.energy}, {"sector", l.sector.eigenvalue()}});
    write_text(s, arr.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << (fmt == ReportFormat::csv ? "level,energy,sector\n" : "# level energy sector\n");
    const char sep = fmt == ReportFormat::csv ? ',' : ' ';
    for (std::size_t i = 0; i < levels.size(); ++i) {
      os << i << sep << format_number(levels[i].energy) << sep << levels[i].sector.eigenvalue() << '\n';
    }
    write_text(s, os.str());
  }
  return ok;
}

int cmd_splitting(const Settings& s) {
  const ChainSpec spec = spec_from(s);
  const Limits limits = limits_from(s);
  const std::vector<Method> methods = parse_methods(s.methods.empty() ? "dense" : s.methods);
  const ReportFormat fmt = parse_format(s.format);
  Dataset rows;
  for (Method m : methods) rows.push_back(evaluate(spec, m, limits));
  if (fmt == ReportFormat::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json j = to_json(r);
      if (r.delta_e && *r.delta_e > 0.0) j["times"] = times_json(*r.delta_e, s.j_hz, spec.coupling_j);
      arr.push_back(std::move(j));
    }
    write_text(s, arr.dump(2) + "\n");
  } else {
    write_text(s, render_report(rows, fmt));
  }
  for (const auto& r : rows) {
    if (r.error) {
      std::cerr << "tfim: " << to_string(r.method) << ": " << *r.error << '\n';
      return r.error->rfind("capacity:", 0) == 0 ? capacity_error : numerical_error;
    }
  }
  return ok;
}

int cmd_sweep(const Settings& s) {
  SweepPlan plan;
  plan.base = spec_from(s);
  plan.parameter = parse_sweep_parameter(s.sweep);
  const std::string grid = !s.grid.empty() ? s.grid : plan.parameter == SweepParameter::field_hx ? "0.05:0.5:0.05" : "4:12:2";
  plan.grid = parse_grid(grid);
  plan.methods = parse_methods(s.methods.empty() ? "dense,free_fermion,closed_form" : s.methods);
  if (!s.out.empty()) plan.output = s.out;
  plan.limits = limits_from(s);
  plan.threads = s.threads > 0 ? s.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const ReportFormat fmt = parse_format(s.format);
  const Dataset rows = run_sweep(plan);
  if (plan.output) {
    emit_report(rows, fmt, *plan.output, plan.parameter);
  } else {
    std::cout << render_report(rows, fmt, plan.parameter);
  }
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.error ? 1 : 0;
  if (failed) std::cerr << "tfim: " << failed << " of " << rows.size() << " rows failed (see the error column)\n";
  return ok;
}

int cmd_dispersion(const Settings& s) {
  const ChainSpec spec = spec_from(s);
  if (s.points < 2) throw ConfigError("--points must be at least 2");
  const auto ks = uniform_momenta(s.points);
  const DispersionCurve c = dispersion(spec, ks);
  if (parse_format(s.format) == ReportFormat::json) {
    nlohmann::json gap_paper = nullptr;
    if (c.gap_paper_formula) gap_paper = *c.gap_paper_formula;
    write_text(s, nlohmann::json{{"n", spec.n_sites},
                                 {"j", spec.coupling_j},
                                 {"hx", spec.field_hx},
                                 {"gap_numeric", c.gap_numeric},
                                 {"gap_analytic", 2.0 * std::abs(spec.coupling_j - spec.field_hx)},
                                 {"gap_paper_formula", gap_paper},
                                 {"flags", c.flags},
                                 {"k", c.momenta},
                                 {"energy", c.energies}}
                          .dump(2) +
                      "\n");
  } else {
    write_text(s, dispersion_csv(c));
  }
  return ok;
}

int cmd_evolve(const Settings& s) {
  const ChainSpec spec = spec_from(s);
  const Limits limits = limits_from(s);
  if (spec.n_sites > limits.evolve_max_sites) {
    throw CapacityError("evolve: N=" + std::to_string(spec.n_sites) + " exceeds the exact-evolution limit of " +
                            std::to_string(limits.evolve_max_sites) + " sites",
                        limits.evolve_max_sites);
  }
  std::vector<double> times;
  if (s.times.empty()) {
    EdOptions opts;
    opts.limits = limits;
    times = default_time_grid(spec, 512, 2.2, opts);
  } else {
    std::vector<std::string> parts;
    std::stringstream ss(s.times);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("--times expects t0:t1:npoints");
    try {
      times = linear_times(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2]));
    } catch (const ContractViolation& e) {
      throw ConfigError(std::string("--times: ") + e.what());
    } catch (const std::logic_error&) {
      throw ConfigError("--times expects numbers t0:t1:npoints");
    }
  }
  const EvolutionTrace trace = evolve(spec, product_state(spec.n_sites, all_down(spec.n_sites)), times, limits);
  nlohmann::json summary;
  try {
    summary = to_json(noon_fidelity_curve(trace));
  } catch (const TraceTooShort& e) {
    summary = {{"error", e.what()}, {"required_horizon", e.required_horizon()}};
  }
  if (parse_format(s.format) == ReportFormat::json) {
    write_text(s, nlohmann::json{{"summary", summary},
                                 {"t", trace.times},
                                 {"F", trace.noon_fidelity},
                                 {"pop_down", trace.pop_down},
                                 {"pop_up", trace.pop_up},
                                 {"leakage", trace.leakage},
                                 {"parity", trace.parity}}
                          .dump(2) +
                      "\n");
  } else {
    write_text(s, trace_csv(trace));
    (s.out.empty() ? std::cerr : std::cout) << summary.dump() << '\n';
  }
  return ok;
}

int cmd_compare(const Settings& s) {
  const ChainSpec spec = spec_from(s);
  const Dataset rows = compare_methods(spec, limits_from(s));
  std::optional<double> reference;
  for (const auto& r : rows) {
    if ((r.method == Method::dense || r.method == Method::lanczos) && r.delta_e && !reference) reference = r.delta_e;
  }
  const ReportFormat fmt = parse_format(s.format);
  if (fmt == ReportFormat::json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json j = to_json(r);
      j["ratio_to_ed"] = nullptr;
      if (r.delta_e && reference && *reference > 0.0) j["ratio_to_ed"] = *r.delta_e / *reference;
      if (r.delta_e && *r.delta_e > 0.0) j["times"] = times_json(*r.delta_e, s.j_hz, spec.coupling_j);
      arr.push_back(std::move(j));
    }
    write_text(s, arr.dump(2) + "\n");
    return ok;
  }
  std::ostringstream os;
  os << "method,delta_e,ratio_to_ed,tau,half_period,quarter_period,lower_sector,flags,error\n";
  for (const auto& r : rows) {
    os << to_string(r.method) << ',';
    if (r.delta_e) {
      os << format_number(*r.delta_e) << ',';
      os << (reference && *reference > 0.0 ? format_number(*r.delta_e / *reference) : "") << ',';
      if (*r.delta_e > 0.0) {
        const TunnelingTimes t = tunneling_times(*r.delta_e);
        os << format_number(t.tau) << ',' << format_number(t.half_period) << ',' << format_number(t.quarter_period);
      } else {
        os << ",,";
      }
    } else {
      os << ",,,,";
    }
    os << ',' << (r.lower_sector ? std::to_string(*r.lower_sector) : "") << ',';
    for (std::size_t i = 0; i < r.flags.size(); ++i) os << (i ? ";" : "") << r.flags[i];
    os << ',' << (r.error ? '"' + *r.error + '"' : "") << '\n';
  }
  write_text(s, os.str());
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tunneling splitting and NOON dynamics of the transverse-field Ising chain"};
  app.set_config("--config", "", "plain key=value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  Settings s;
  app.add_option("--n", s.n, "number of sites")->capture_default_str();
  app.add_option("--j", s.j, "Ising coupling J")->capture_default_str();
  app.add_option("--hx", s.hx, "transverse field")->capture_default_str();
  app.add_option("--boundary", s.boundary, "periodic or open")->capture_default_str();
  app.add_option("--sweep", s.sweep, "swept parameter: hx or n")->capture_default_str();
  // config files may hand comma lists over as arrays; join them back
  app.add_option("--grid", s.grid, "a:b:step or v1,v2,... (default 0.05:0.5:0.05 for hx, 4:12:2 for n)")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
  app.add_option("--methods", s.methods, "comma list of dense, lanczos, closed_form, resolvent, free_fermion")
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
  app.add_option("--out", s.out, "output file (default stdout)");
  app.add_option("--format", s.format, "csv, json or gnuplot-data")->capture_default_str();
  app.add_option("--times", s.times, "evolve: t0:t1:npoints (default 512 points over 2.2 periods)");
  app.add_option("--levels", s.levels, "spectrum: number of levels")->capture_default_str();
  app.add_option("--points", s.points, "dispersion: number of momenta")->capture_default_str();
  app.add_option("--j-hz", s.j_hz, "J as a frequency in Hz; adds tunneling times in seconds");
  app.add_option("--threads", s.threads, "sweep worker threads (default: hardware concurrency)");
  app.add_option("--dense-max", s.dense_max, "largest N for dense diagonalization")->capture_default_str();
  app.add_option("--resolvent-max", s.resolvent_max, "largest N for the resolvent oracle")->capture_default_str();
  app.add_option("--evolve-max", s.evolve_max, "largest N for time evolution")->capture_default_str();

  std::function<int(const Settings&)> action;
  auto sub = [&](const char* name, const char* help, int (*fn)(const Settings&)) {
    app.add_subcommand(name, help)->callback([&action, fn] { action = fn; });
  };
  sub("spectrum", "lowest levels with their W_X sector", cmd_spectrum);
  sub("splitting", "tunneling splitting at one point", cmd_splitting);
  sub("sweep", "splitting over a grid of hx or N", cmd_sweep);
  sub("dispersion", "single-particle energies E(k) and the gap", cmd_dispersion);
  sub("evolve", "tunneling dynamics from the all-down state", cmd_evolve);
  sub("compare", "every splitting method side by side", cmd_compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    return action(s);
  } catch (const ConfigError& e) {
    std::cerr << "tfim: configuration error: " << e.what() << '\n';
    return config_error;
  } catch (const ContractViolation& e) {
    std::cerr << "tfim: invalid input: " << e.what() << '\n';
    return config_error;
  } catch (const CapacityError& e) {
    std::cerr << "tfim: capacity error: " << e.what() << '\n';
    return capacity_error;
  } catch (const DomainError& e) {
    std::cerr << "tfim: outside the valid domain: " << e.what() << '\n';
    return numerical_error;
  } catch (const Error& e) {
    std::cerr << "tfim: numerical failure: " << e.what() << '\n';
    return numerical_error;
  }
}
