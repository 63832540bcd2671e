#include "tfim/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "tfim/errors.hpp"

namespace tfim {

std::string_view to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
    case ReportFormat::gnuplot: return "gnuplot-data";
  }
  return "unknown";
}

ReportFormat parse_format(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  if (text == "gnuplot-data" || text == "gnuplot") return ReportFormat::gnuplot;
  throw ConfigError("unknown output format '" + std::string(text) + "' (expected csv, json or gnuplot-data)");
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

template <typename T>
std::string optional_number(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_integral_v<T>) {
    return std::to_string(*v);
  } else {
    return format_number(*v);
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string joined_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) out += (out.empty() ? "" : ";") + f;
  return out;
}

std::string render_csv(const Dataset& rows) {
  std::ostringstream os;
  os << "index,grid_value,method,n,j,hx,boundary,delta_e,e_even,e_odd,lower_sector,gap,tau,flags,error\n";
  for (const auto& r : rows) {
    os << r.grid_index << ',' << format_number(r.grid_value) << ',' << to_string(r.method) << ',' << r.spec.n_sites
       << ',' << format_number(r.spec.coupling_j) << ',' << format_number(r.spec.field_hx) << ','
       << to_string(r.spec.boundary) << ',' << optional_number(r.delta_e) << ',' << optional_number(r.e_even) << ','
       << optional_number(r.e_odd) << ',' << optional_number(r.lower_sector) << ',' << optional_number(r.gap) << ','
       << optional_number(r.tau) << ',' << csv_field(joined_flags(r.flags)) << ',' << csv_field(r.error.value_or(""))
       << '\n';
  }
  return os.str();
}

std::string render_gnuplot(const Dataset& rows, SweepParameter swept) {
  // (method, fixed parameter, boundary) -> rows in dataset order
  std::map<std::tuple<int, double, int>, std::vector<const SweepRow*>> groups;
  for (const auto& r : rows) {
    const double fixed = swept == SweepParameter::field_hx ? r.spec.n_sites : r.spec.field_hx;
    groups[{static_cast<int>(r.method), fixed, static_cast<int>(r.spec.boundary)}].push_back(&r);
  }
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, members] : groups) {
    if (!first) os << "\n\n";
    first = false;
    const SweepRow& head = *members.front();
    os << "# method=" << to_string(head.method) << ' '
       << (swept == SweepParameter::field_hx ? "n=" + std::to_string(head.spec.n_sites)
                                             : "hx=" + format_number(head.spec.field_hx))
       << " j=" << format_number(head.spec.coupling_j) << " boundary=" << to_string(head.spec.boundary) << '\n';
    os << "# " << to_string(swept) << " delta_e\n";
    for (const SweepRow* r : members) {
      const double x = swept == SweepParameter::field_hx ? r->spec.field_hx : r->spec.n_sites;
      if (r->delta_e && !r->error) {
        os << format_number(x) << ' ' << format_number(*r->delta_e) << '\n';
      } else {
        os << "# " << format_number(x) << " skipped: " << r->error.value_or("no value") << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace

nlohmann::json to_json(const SweepRow& r) {
  auto opt = [](const auto& v) -> nlohmann::json {
    if (v) return *v;
    return nullptr;
  };
  nlohmann::json error = nullptr;
  if (r.error) error = *r.error;
  return {{"index", r.grid_index},
          {"grid_value", r.grid_value},
          {"n", r.spec.n_sites},
          {"j", r.spec.coupling_j},
          {"hx", r.spec.field_hx},
          {"boundary", to_string(r.spec.boundary)},
          {"e_even", opt(r.e_even)},
          {"e_odd", opt(r.e_odd)},
          {"delta_e", opt(r.delta_e)},
          {"lower_sector", opt(r.lower_sector)},
          {"gap", opt(r.gap)},
          {"tau", opt(r.tau)},
          {"method", to_string(r.method)},
          {"flags", r.flags},
          {"error", error}};
}

std::string render_report(const Dataset& dataset, ReportFormat format, SweepParameter swept) {
  switch (format) {
    case ReportFormat::csv: return render_csv(dataset);
    case ReportFormat::gnuplot: return render_gnuplot(dataset, swept);
    case ReportFormat::json: {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& r : dataset) arr.push_back(to_json(r));
      return arr.dump(2) + "\n";
    }
  }
  throw ConfigError("unknown output format");
}

void emit_report(const Dataset& dataset, ReportFormat format, const std::filesystem::path& path,
                 SweepParameter swept) {
  if (dataset.empty()) throw ContractViolation("emit_report: empty dataset");
  const std::string text = render_report(dataset, format, swept);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write output file '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

std::string dispersion_csv(const DispersionCurve& c) {
  std::ostringstream os;
  os << "# n=" << c.spec.n_sites << " j=" << format_number(c.spec.coupling_j) << " hx="
     << format_number(c.spec.field_hx) << " boundary=" << to_string(c.spec.boundary) << '\n';
  os << "# gap_numeric=" << format_number(c.gap_numeric) << " (minimum of E(k) on this grid; analytic 2|J-hx|="
     << format_number(2.0 * std::abs(c.spec.coupling_j - c.spec.field_hx)) << ")\n";
  os << "# gap_paper_formula="
     << (c.gap_paper_formula ? format_number(*c.gap_paper_formula) : std::string("undefined (hx > J)"))
     << " (2J*sqrt(1-hx/J); differs from the minimum of E(k) for hx > 0)\n";
  os << "k,energy\n";
  for (std::size_t i = 0; i < c.momenta.size(); ++i) {
    os << format_number(c.momenta[i]) << ',' << format_number(c.energies[i]) << '\n';
  }
  return os.str();
}

std::string trace_csv(const EvolutionTrace& t) {
  std::ostringstream os;
  os << "t,F,pop_down,pop_up,leakage,parity\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << format_number(t.times[i]) << ',' << format_number(t.noon_fidelity[i]) << ',' << format_number(t.pop_down[i])
       << ',' << format_number(t.pop_up[i]) << ',' << format_number(t.leakage[i]) << ',' << format_number(t.parity[i])
       << '\n';
  }
  return os.str();
}

}  // namespace tfim
