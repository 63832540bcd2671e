#include "tfim/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "tfim/errors.hpp"
#include "tfim/free_fermion.hpp"
#include "tfim/perturbation.hpp"

namespace tfim {

std::string_view to_string(SweepParameter p) { return p == SweepParameter::field_hx ? "hx" : "n"; }

SweepParameter parse_sweep_parameter(std::string_view text) {
  if (text == "hx") return SweepParameter::field_hx;
  if (text == "n") return SweepParameter::n_sites;
  throw ConfigError("unknown sweep parameter '" + std::string(text) + "' (expected hx or n)");
}

namespace {

double parse_double(std::string_view text) {
  const std::string s(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> grid;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw ConfigError("grid range must be a:b:step");
    const double a = parse_double(parts[0]);
    const double b = parse_double(parts[1]);
    const double step = parse_double(parts[2]);
    if (!(step > 0.0) || b < a) throw ConfigError("grid range needs step > 0 and b >= a");
    const auto count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) {
      // snap to the decimal grid so 0.05:0.3:0.05 yields 0.15, not 0.15000000000000002
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.12g", a + static_cast<double>(i) * step);
      grid.push_back(std::stod(buf));
    }
  } else {
    for (auto part : split(text, ',')) {
      if (!part.empty()) grid.push_back(parse_double(part));
    }
  }
  if (grid.empty()) throw ConfigError("empty grid");
  return grid;
}

std::vector<Method> parse_methods(std::string_view text) {
  std::vector<Method> out;
  for (auto part : split(text, ',')) {
    if (!part.empty()) out.push_back(parse_method(part));
  }
  if (out.empty()) throw ConfigError("no methods given");
  return out;
}

void SweepPlan::validate() const {
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError("sweep grid must be strictly increasing");
  }
  if (methods.empty()) throw ConfigError("sweep needs at least one method");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (parameter == SweepParameter::n_sites) {
    for (double v : grid) {
      if (v != std::floor(v) || v < 2) throw ConfigError("site-count grid values must be integers >= 2");
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      spec_at(i).validate();
    } catch (const ContractViolation& e) {
      throw ConfigError(std::string("invalid sweep point: ") + e.what());
    }
  }
}

ChainSpec SweepPlan::spec_at(std::size_t grid_index) const {
  ChainSpec s = base;
  if (parameter == SweepParameter::field_hx) {
    s.field_hx = grid[grid_index];
  } else {
    s.n_sites = static_cast<int>(grid[grid_index]);
  }
  return s;
}

SweepRow evaluate(const ChainSpec& spec, Method method, const Limits& limits) {
  SweepRow row;
  row.spec = spec;
  row.method = method;
  auto fill = [&row](const SplittingRecord& r) {
    row.delta_e = r.delta_e;
    row.e_even = r.e_even;
    row.e_odd = r.e_odd;
    row.lower_sector = r.lower_sector.eigenvalue();
    row.gap = r.excitation_gap;
    row.flags = r.flags;
  };
  try {
    switch (method) {
      case Method::dense:
      case Method::lanczos: {
        EdOptions options;
        options.route = method == Method::dense ? EdRoute::dense : EdRoute::lanczos;
        options.limits = limits;
        options.concurrent = false;
        fill(tunneling_splitting_ed(spec, options));
        break;
      }
      case Method::free_fermion: fill(bogoliubov_sector_oracle(spec)); break;
      case Method::closed_form: row.delta_e = splitting_closed_form(spec); break;
      case Method::resolvent: {
        const ResolventResult r = resolvent_oracle(spec, limits.resolvent_max_sites);
        row.delta_e = r.delta_e;
        row.lower_sector = r.sign < 0 ? 1 : (r.sign > 0 ? -1 : 0);
        if (r.sign == 0) row.lower_sector.reset();
        break;
      }
    }
    if (row.delta_e && *row.delta_e > 0.0) row.tau = 1.0 / *row.delta_e;
  } catch (const CapacityError& e) {
    row.error = std::string("capacity: ") + e.what();
  } catch (const DomainError& e) {
    row.error = std::string("domain: ") + e.what();
  } catch (const ConvergenceError& e) {
    row.error = std::string("numerical: ") + e.what();
  } catch (const Error& e) {
    row.error = std::string("error: ") + e.what();
  }
  return row;
}

Dataset run_sweep(const SweepPlan& plan) {
  plan.validate();
  if (plan.output) {
    std::ofstream probe(*plan.output, std::ios::app);
    if (!probe) throw ConfigError("cannot write output file '" + plan.output->string() + "'");
  }

  const std::size_t n_methods = plan.methods.size();
  const std::size_t total = plan.grid.size() * n_methods;
  Dataset rows(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      const std::size_t g = i / n_methods;
      SweepRow row = evaluate(plan.spec_at(g), plan.methods[i % n_methods], plan.limits);
      row.grid_index = g;
      row.grid_value = plan.grid[g];
      rows[i] = std::move(row);
    }
  };
  const int threads = std::min<int>(plan.threads, static_cast<int>(total));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return rows;
}

Dataset compare_methods(const ChainSpec& spec, const Limits& limits) {
  spec.validate();
  Dataset rows;
  for (Method m : {Method::dense, Method::lanczos, Method::free_fermion, Method::resolvent, Method::closed_form}) {
    rows.push_back(evaluate(spec, m, limits));
  }
  return rows;
}

}  // namespace tfim
