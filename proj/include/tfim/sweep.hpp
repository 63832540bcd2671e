#pragma once

// Parameter sweeps and side-by-side comparison of the splitting methods.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tfim/chain.hpp"
#include "tfim/ed.hpp"

namespace tfim {

enum class SweepParameter { field_hx, n_sites };

std::string_view to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(std::string_view text);

/// "a:b:step" (inclusive of b up to rounding) or "v1,v2,...".
std::vector<double> parse_grid(std::string_view text);
/// Comma-separated method names.
std::vector<Method> parse_methods(std::string_view text);

struct SweepPlan {
  ChainSpec base;
  SweepParameter parameter = SweepParameter::field_hx;
  std::vector<double> grid;
  std::vector<Method> methods;
  std::optional<std::filesystem::path> output;
  Limits limits{};
  int threads = 1;

  /// Throws ConfigError for an empty or non-increasing grid, no methods, or
  /// non-integer site counts.
  void validate() const;
  ChainSpec spec_at(std::size_t grid_index) const;
};

struct SweepRow {
  std::size_t grid_index = 0;
  double grid_value = 0.0;
  Method method = Method::dense;
  ChainSpec spec;
  std::optional<double> delta_e;
  std::optional<double> e_even;
  std::optional<double> e_odd;
  std::optional<int> lower_sector;
  std::optional<double> gap;
  std::optional<double> tau;
  std::vector<std::string> flags;
  /// set when this row failed; the other rows are unaffected
  std::optional<std::string> error;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

using Dataset = std::vector<SweepRow>;

/// One method at one parameter point. Failures are captured in the row.
SweepRow evaluate(const ChainSpec& spec, Method method, const Limits& limits = {});

/// One row per (grid value, method), ordered by grid index and then by the
/// plan's method order whatever the thread count. An unwritable output path
/// raises ConfigError before any computation.
Dataset run_sweep(const SweepPlan& plan);

/// Every method at a single point.
Dataset compare_methods(const ChainSpec& spec, const Limits& limits = {});

}  // namespace tfim
