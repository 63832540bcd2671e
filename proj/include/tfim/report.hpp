#pragma once

// Plot-ready and machine-readable output. Identical inputs give identical
// bytes: numbers are written with 17 significant digits.

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "tfim/dynamics.hpp"
#include "tfim/free_fermion.hpp"
#include "tfim/sweep.hpp"

namespace tfim {

enum class ReportFormat { csv, json, gnuplot };

std::string_view to_string(ReportFormat f);
/// Throws ConfigError for anything but csv, json, gnuplot-data.
ReportFormat parse_format(std::string_view text);

std::string format_number(double x);

nlohmann::json to_json(const SweepRow& row);

/// gnuplot-data groups rows by method and by the parameter that is not swept,
/// one block per group separated by two blank lines.
std::string render_report(const Dataset& dataset, ReportFormat format, SweepParameter swept = SweepParameter::field_hx);

/// Writes render_report to `path`; throws ConfigError when the file cannot
/// be written and ContractViolation for an empty dataset.
void emit_report(const Dataset& dataset, ReportFormat format, const std::filesystem::path& path,
                 SweepParameter swept = SweepParameter::field_hx);

std::string dispersion_csv(const DispersionCurve& curve);
std::string trace_csv(const EvolutionTrace& trace);

}  // namespace tfim
