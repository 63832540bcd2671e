#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "tfim/errors.hpp"
#include "tfim/report.hpp"
#include "tfim/sweep.hpp"

using namespace tfim;

namespace {

SweepPlan hx_plan(int n, std::string grid, std::vector<Method> methods) {
  SweepPlan p;
  p.base = {n, 1.0, 0.0, Boundary::periodic};
  p.grid = parse_grid(grid);
  p.methods = std::move(methods);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("tfim_test_" + name);
}

bool has_type(const nlohmann::json& v, const nlohmann::json& type) {
  if (type.is_array()) {
    for (const auto& t : type) {
      if (has_type(v, t)) return true;
    }
    return false;
  }
  const std::string t = type;
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer();
  if (t == "string") return v.is_string();
  if (t == "array") return v.is_array();
  if (t == "object") return v.is_object();
  if (t == "null") return v.is_null();
  return false;
}

// The subset of JSON Schema the published schema uses.
void check_against_schema(const nlohmann::json& record, const nlohmann::json& schema) {
  for (const auto& key : schema["required"]) EXPECT_TRUE(record.contains(key)) << key;
  for (const auto& [key, value] : record.items()) {
    ASSERT_TRUE(schema["properties"].contains(key)) << "unexpected key " << key;
    const auto& prop = schema["properties"][key];
    if (prop.contains("type")) EXPECT_TRUE(has_type(value, prop["type"])) << key;
    if (prop.contains("enum")) {
      if (value.is_array()) continue;
      EXPECT_NE(std::find(prop["enum"].begin(), prop["enum"].end(), value), prop["enum"].end()) << key;
    }
    if (prop.contains("items")) {
      for (const auto& item : value) {
        const auto& allowed = prop["items"]["enum"];
        EXPECT_NE(std::find(allowed.begin(), allowed.end(), item), allowed.end()) << item;
      }
    }
  }
}

}  // namespace

TEST(Grid, RangeAndList) {
  const auto g = parse_grid("0.05:0.3:0.05");
  ASSERT_EQ(g.size(), 6u);
  EXPECT_EQ(g[2], 0.15);
  EXPECT_EQ(g.back(), 0.3);
  EXPECT_EQ(parse_grid("4,6,8"), (std::vector<double>{4, 6, 8}));
  EXPECT_THROW(parse_grid("0.1:0.2"), ConfigError);
  EXPECT_THROW(parse_grid("0.3:0.1:0.1"), ConfigError);
  EXPECT_THROW(parse_grid("a,b"), ConfigError);
  EXPECT_THROW(parse_grid(""), ConfigError);
  EXPECT_THROW(parse_methods("dense,exact"), ConfigError);
  EXPECT_EQ(parse_methods("lanczos,closed_form"), (std::vector<Method>{Method::lanczos, Method::closed_form}));
}

TEST(Plan, Validation) {
  SweepPlan p = hx_plan(6, "0.1,0.2", {Method::dense});
  EXPECT_NO_THROW(p.validate());
  p.grid = {0.2, 0.1};
  EXPECT_THROW(p.validate(), ConfigError);
  p.grid = {};
  EXPECT_THROW(p.validate(), ConfigError);
  p.grid = {0.1};
  p.methods = {};
  EXPECT_THROW(p.validate(), ConfigError);
  SweepPlan n = hx_plan(6, "4,6.5", {Method::closed_form});
  n.parameter = SweepParameter::n_sites;
  n.base.field_hx = 0.1;
  EXPECT_THROW(n.validate(), ConfigError);
  SweepPlan neg = hx_plan(6, "-0.1,0.1", {Method::dense});
  EXPECT_THROW(neg.validate(), ConfigError);
}

TEST(Sweep, FieldGridRowsIncrease) {
  const Dataset rows = run_sweep(hx_plan(8, "0.05:0.3:0.05", {Method::lanczos, Method::closed_form}));
  ASSERT_EQ(rows.size(), 12u);
  for (Method m : {Method::lanczos, Method::closed_form}) {
    double prev = 0.0;
    for (const auto& r : rows) {
      if (r.method != m) continue;
      ASSERT_TRUE(r.delta_e.has_value());
      EXPECT_GT(*r.delta_e, prev);
      prev = *r.delta_e;
    }
  }
  EXPECT_EQ(rows[0].method, Method::lanczos);
  EXPECT_EQ(rows[1].method, Method::closed_form);
  EXPECT_EQ(rows[11].grid_index, 5u);
}

TEST(Sweep, LengthGridClosedFormRatios) {
  SweepPlan p = hx_plan(4, "4,6,8", {Method::closed_form});
  p.parameter = SweepParameter::n_sites;
  p.base.field_hx = 0.1;
  const Dataset rows = run_sweep(p);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(*rows[1].delta_e / *rows[0].delta_e, 9.375e-4, 1e-18);
  EXPECT_NEAR(*rows[2].delta_e / *rows[1].delta_e, (8.0 / 6.0) * 0.025 * 0.025, 1e-18);
  EXPECT_EQ(rows[2].spec.n_sites, 8);
}

TEST(Sweep, CapacityFailureIsPerRow) {
  const Dataset rows = run_sweep(hx_plan(16, "0.3", {Method::resolvent, Method::closed_form, Method::free_fermion}));
  ASSERT_EQ(rows.size(), 3u);
  ASSERT_TRUE(rows[0].error.has_value());
  EXPECT_EQ(rows[0].error->rfind("capacity:", 0), 0u);
  EXPECT_FALSE(rows[0].delta_e.has_value());
  EXPECT_FALSE(rows[1].error.has_value());
  EXPECT_TRUE(rows[1].delta_e.has_value());
  EXPECT_TRUE(rows[2].delta_e.has_value());
}

TEST(Sweep, DomainFailureIsPerRow) {
  const Dataset rows = run_sweep(hx_plan(4, "0.5,1.5", {Method::closed_form, Method::dense}));
  EXPECT_FALSE(rows[0].error.has_value());
  ASSERT_TRUE(rows[2].error.has_value());
  EXPECT_EQ(rows[2].error->rfind("domain:", 0), 0u);
  EXPECT_FALSE(rows[3].error.has_value());
}

TEST(Sweep, ParallelEqualsSerial) {
  SweepPlan p = hx_plan(7, "0.1:0.9:0.1", {Method::dense, Method::free_fermion, Method::resolvent, Method::closed_form});
  p.base.boundary = Boundary::open;
  p.threads = 1;
  const Dataset serial = run_sweep(p);
  p.threads = 6;
  const Dataset parallel = run_sweep(p);
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(render_report(serial, ReportFormat::csv), render_report(parallel, ReportFormat::csv));
}

TEST(Sweep, UnwritableOutputFailsBeforeCompute) {
  SweepPlan p = hx_plan(22, "0.1", {Method::lanczos});
  p.output = "/nonexistent-dir/out.csv";
  EXPECT_THROW(run_sweep(p), ConfigError);
}

TEST(Report, CsvShape) {
  const Dataset rows = run_sweep(hx_plan(6, "0.05:0.3:0.05", {Method::dense, Method::closed_form}));
  const std::string csv = render_report(rows, ReportFormat::csv);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "index,grid_value,method,n,j,hx,boundary,delta_e,e_even,e_odd,lower_sector,gap,tau,flags,error");
}

TEST(Report, ByteIdenticalReEmission) {
  const Dataset rows = run_sweep(hx_plan(6, "0.1,0.2,0.4", {Method::dense, Method::resolvent}));
  for (ReportFormat f : {ReportFormat::csv, ReportFormat::json, ReportFormat::gnuplot}) {
    const auto a = scratch("a"), b = scratch("b");
    emit_report(rows, f, a);
    emit_report(run_sweep(hx_plan(6, "0.1,0.2,0.4", {Method::dense, Method::resolvent})), f, b);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_FALSE(slurp(a).empty());
    std::filesystem::remove(a);
    std::filesystem::remove(b);
  }
}

TEST(Report, NumbersRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  const double x = 1.0544703792914056e-06;
  EXPECT_EQ(std::stod(format_number(x)), x);
}

TEST(Report, GnuplotBlocksPerMethod) {
  SweepPlan p = hx_plan(6, "0.1,0.2", {Method::dense, Method::closed_form});
  const std::string text = render_report(run_sweep(p), ReportFormat::gnuplot);
  EXPECT_NE(text.find("# method=dense n=6"), std::string::npos);
  EXPECT_NE(text.find("# method=closed_form n=6"), std::string::npos);
  EXPECT_NE(text.find("\n\n\n# method="), std::string::npos);
}

TEST(Report, JsonMatchesPublishedSchema) {
  const auto schema = nlohmann::json::parse(slurp(TFIM_SCHEMA_PATH));
  const Dataset rows =
      run_sweep(hx_plan(16, "0.0,0.3,1.2", {Method::resolvent, Method::closed_form, Method::free_fermion}));
  const auto parsed = nlohmann::json::parse(render_report(rows, ReportFormat::json));
  ASSERT_EQ(parsed.size(), rows.size());
  for (const auto& rec : parsed) check_against_schema(rec, schema);
  check_against_schema(to_json(tunneling_splitting_ed({2, 1.0, 0.3, Boundary::open})), schema);
}

TEST(Report, Errors) {
  EXPECT_THROW(parse_format("xml"), ConfigError);
  EXPECT_EQ(parse_format("gnuplot-data"), ReportFormat::gnuplot);
  EXPECT_THROW(emit_report({}, ReportFormat::csv, scratch("empty")), ContractViolation);
  const Dataset rows = compare_methods({2, 1.0, 0.3, Boundary::open});
  EXPECT_THROW(emit_report(rows, ReportFormat::csv, "/nonexistent-dir/x.csv"), ConfigError);
}

TEST(Report, CompareCoversEveryMethod) {
  const Dataset rows = compare_methods({2, 1.0, 0.3, Boundary::open});
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& r : rows) EXPECT_FALSE(r.error.has_value()) << to_string(r.method);
}

TEST(Report, DispersionAndTraceCsv) {
  const auto ks = uniform_momenta(4);
  const std::string d = dispersion_csv(dispersion({4, 1.0, 0.5, Boundary::periodic}, ks));
  EXPECT_NE(d.find("gap_numeric=1"), std::string::npos);
  EXPECT_NE(d.find("gap_paper_formula=1.414"), std::string::npos);
  EXPECT_NE(d.find("k,energy\n"), std::string::npos);
  const auto t = linear_times(0.0, 1.0, 3);
  const std::string tr = trace_csv(two_level_predict(0.5, t));
  EXPECT_EQ(tr.substr(0, tr.find('\n')), "t,F,pop_down,pop_up,leakage,parity");
  EXPECT_EQ(std::count(tr.begin(), tr.end(), '\n'), 4);
}
