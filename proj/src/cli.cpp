#include "adw/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "adw/benchmark.hpp"
#include "adw/csv.hpp"
#include "adw/datagen.hpp"
#include "adw/etl.hpp"
#include "adw/exec.hpp"
#include "adw/olap.hpp"
#include "adw/result.hpp"
#include "adw/schema.hpp"
#include "adw/sql/parser.hpp"
#include "adw/strings.hpp"
#include "adw/workload.hpp"

namespace adw::cli {

namespace fs = std::filesystem;

namespace {

/// A usage problem detected after flag parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Settings {
  std::uint64_t seed = 42;
  std::int64_t scale = 10000;
  std::string format = "text";
  int reps = 3;
  std::string path = "holap";
  datagen::DefectRates rates;
  std::string data;
  std::string warehouse;
  std::string out;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream o(path, std::ios::binary | std::ios::trunc);
  if (!o) throw Error("cannot write " + path.string());
  o << text;
}

datagen::GenConfig gen_config(const Settings& s) {
  datagen::GenConfig cfg;
  cfg.seed = s.seed;
  cfg.scale = s.scale;
  cfg.rates = s.rates;
  cfg.validate();
  return cfg;
}

/// Both engines holding the same warehouse contents.
struct Warehouse {
  std::shared_ptr<const ConstellationSchema> schema;
  std::unique_ptr<RowStore> rows;
  std::unique_ptr<ColumnStore> columns;
};

Warehouse open_warehouse(const Settings& s) {
  Warehouse w;
  w.schema = std::make_shared<const ConstellationSchema>(builtin_adw_schema());
  w.rows = std::make_unique<RowStore>(w.schema);
  w.columns = std::make_unique<ColumnStore>(w.schema);
  if (!s.warehouse.empty()) {
    const std::string snap = (fs::path(s.warehouse) / "warehouse.snap").string();
    w.rows->load_snapshot(snap);
    w.columns->load_snapshot(snap);
    return w;
  }
  datagen::RawDataset raw = s.data.empty() ? datagen::generate(*w.schema, gen_config(s))
                                           : datagen::read_dataset(*w.schema, s.data);
  etl::EtlResult r = etl::run(raw, *w.schema);
  raw = {};
  etl::load(r.relations, {w.rows.get(), w.columns.get()});
  return w;
}

bench::Format parse_format(const std::string& f) {
  if (f == "csv") return bench::Format::Csv;
  if (f == "json") return bench::Format::Json;
  return bench::Format::Text;
}

std::string render_result(const ResultSet& r, const std::string& format) {
  if (format == "csv") return to_csv(r);
  if (format == "json") return to_json(r) + "\n";
  return to_text(r);
}

std::string render_cleansing(const etl::CleansingReport& report, const std::string& format) {
  if (format == "json") return report.to_json() + "\n";
  std::vector<std::string> header{"table", "input_rows", "output_rows"};
  for (auto c : datagen::kDefectClasses) header.emplace_back(datagen::to_string(c));
  std::vector<std::vector<std::string>> rows;
  for (const auto& [name, t] : report.tables) {
    std::vector<std::string> r{name, std::to_string(t.input_rows), std::to_string(t.output_rows)};
    for (auto c : datagen::kDefectClasses) r.push_back(std::to_string(t.of(c).detected));
    rows.push_back(std::move(r));
  }
  std::vector<std::string> total{"TOTAL", "", ""};
  for (auto c : datagen::kDefectClasses) total.push_back(std::to_string(report.detected(c)));
  rows.push_back(std::move(total));
  std::string out;
  if (format == "csv") {
    csv::append_record(out, header);
    for (const auto& r : rows) csv::append_record(out, r);
    return out;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::string cell = r[i];
      if (i == 0) {
        cell.resize(width[i], ' ');
      } else {
        cell.insert(0, width[i] - cell.size(), ' ');
      }
      out += cell;
      out += i + 1 < r.size() ? "  " : "\n";
    }
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

// generate / etl -------------------------------------------------------------

int cmd_generate(const Settings& s, std::ostream& out) {
  if (s.out.empty()) throw UsageError("generate needs --out DIR");
  const ConstellationSchema schema = builtin_adw_schema();
  const auto raw = datagen::generate(schema, gen_config(s));
  datagen::write_dataset(raw, s.out);
  std::size_t rows = 0;
  for (const auto& [name, t] : raw.ledger.tables) rows += t.emitted_rows;
  out << "wrote " << raw.files.size() << " tables (" << rows << " rows) and ledger.json to " << s.out << "\n";
  for (auto c : datagen::kDefectClasses) {
    out << "  " << datagen::to_string(c) << " defects: " << raw.ledger.total(c) << "\n";
  }
  return kOk;
}

int cmd_etl(const Settings& s, std::ostream& out) {
  if (s.data.empty()) throw UsageError("etl needs --data DIR");
  auto schema = std::make_shared<const ConstellationSchema>(builtin_adw_schema());
  if (!fs::is_directory(s.data)) throw EtlError("data directory " + s.data + " does not exist");
  const auto raw = datagen::read_dataset(*schema, s.data);
  etl::EtlResult r = etl::run(raw, *schema);
  if (!s.warehouse.empty()) {
    RowStore store(schema);
    etl::load(r.relations, {&store});
    fs::create_directories(s.warehouse);
    store.save_snapshot((fs::path(s.warehouse) / "warehouse.snap").string());
    write_file(fs::path(s.warehouse) / "cleansing_report.json", r.report.to_json() + "\n");
  }
  out << render_cleansing(r.report, s.format);
  return kOk;
}

// query ----------------------------------------------------------------------

struct QueryArgs {
  std::string sql;
  std::string file;
  bool explain = false;
  bool no_cubes = false;
};

int cmd_query(const Settings& s, const QueryArgs& q, std::ostream& out) {
  if (q.sql.empty() == q.file.empty()) throw UsageError("query needs exactly one of --sql or --file");
  const std::string text = q.sql.empty() ? read_file(q.file) : q.sql;
  const auto schema = std::make_shared<const ConstellationSchema>(builtin_adw_schema());
  sql::QueryPlan plan = sql::plan(text, *schema);
  if (q.explain && s.path != "holap") {
    plan.path = s.path == "baseline" ? sql::ExecPath::Baseline : sql::ExecPath::Rolap;
    out << sql::explain(plan);
    return kOk;
  }
  Warehouse w = open_warehouse(s);
  ResultSet result;
  if (s.path == "baseline") {
    result = exec::execute_baseline(plan, *w.rows);
  } else if (s.path == "rolap") {
    result = exec::execute_rolap(plan, *w.columns);
  } else {
    const olap::CubeRegistry reg =
        q.no_cubes ? olap::CubeRegistry{} : olap::build_registry(*w.columns, olap::builtin_cubes());
    if (q.explain) {
      plan.path = olap::match_cube(plan, reg) ? sql::ExecPath::Molap : sql::ExecPath::Rolap;
      out << sql::explain(plan);
      return kOk;
    }
    result = olap::route_holap(plan, reg, *w.columns).result;
  }
  out << render_result(result, s.format);
  return kOk;
}

// cube -----------------------------------------------------------------------

struct CubeArgs {
  std::string name;
  std::string fact = "FieldFact";
  std::vector<std::string> dims;
  std::vector<std::string> measures;
  std::string cube;
  std::string def_file;
  std::string operation;
  std::string dim;
  std::string level;
  std::string member;
  std::string members;
  std::string rows;
  std::string cols;
  bool check = false;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(std::string(trim(cur)));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(std::string(trim(cur)));
  return out;
}

olap::CubeDef define_cube(const CubeArgs& a) {
  if (a.name.empty()) throw UsageError("cube define needs --name");
  olap::CubeDef def;
  def.name = a.name;
  def.fact = a.fact;
  for (const auto& d : a.dims) {
    const auto colon = d.find(':');
    olap::CubeDimension dim{olap::builtin_hierarchy(d.substr(0, colon)), 0};
    if (colon != std::string::npos) {
      const auto l = dim.hierarchy.level_index(d.substr(colon + 1));
      if (!l) throw UsageError("unknown level in --dim " + d);
      dim.level = *l;
    }
    def.dimensions.push_back(std::move(dim));
  }
  for (const auto& m : a.measures) {
    const auto eq = m.find('=');
    const auto open = m.find('(', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || open == std::string::npos || m.back() != ')') {
      throw UsageError("--measure must look like name=agg(column): " + m);
    }
    olap::MeasureDef md;
    md.name = m.substr(0, eq);
    const std::string agg = m.substr(eq + 1, open - eq - 1);
    md.column = m.substr(open + 1, m.size() - open - 2);
    if (md.column == "*") md.column.clear();
    if (iequals(agg, "sum")) {
      md.agg = olap::Aggregator::Sum;
    } else if (iequals(agg, "count")) {
      md.agg = olap::Aggregator::Count;
    } else if (iequals(agg, "max")) {
      md.agg = olap::Aggregator::Max;
    } else {
      throw UsageError("unknown aggregator '" + agg + "'");
    }
    def.measures.push_back(std::move(md));
  }
  return def;
}

olap::CubeDef selected_cube(const CubeArgs& a) {
  if (a.cube.empty() == a.def_file.empty()) throw UsageError("give exactly one of --cube NAME or --def FILE");
  if (!a.def_file.empty()) return olap::cube_def_from_json(read_file(a.def_file));
  return olap::builtin_cube(a.cube);
}

Value parse_member(const olap::DataCube& cube, const std::string& dim_name, const std::string& text) {
  const auto d = cube.dimension_index(dim_name);
  if (!d) throw UsageError("unknown dimension '" + dim_name + "'");
  const auto& dim = cube.def().dimensions[*d];
  if (dim.level >= dim.hierarchy.all_level()) throw UsageError("dimension '" + dim_name + "' is at ALL");
  if (text == "UNKNOWN" || text == "NULL") return Value{};
  const DataType t = olap::member_type(cube.schema(), cube.def().fact, dim.hierarchy.levels[dim.level]);
  auto v = parse_value(text, t);
  if (!v) throw UsageError("'" + text + "' is not a valid " + std::string(to_string(t)) + " member");
  return *v;
}

bool totals_match(const std::vector<Value>& a, const std::vector<Value>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!values_close(a[i], b[i], 1e-9)) return false;
  }
  return true;
}

/// Totals over the whole fact table computed by SQL on the row store.
std::vector<Value> oracle_totals(const olap::CubeDef& def, const RowStore& store) {
  std::string select;
  for (const auto& m : def.measures) {
    if (!select.empty()) select += ", ";
    const std::string arg = m.column.empty() ? "*" : m.column;
    select += std::string(olap::to_string(m.agg)) + "(" + arg + ")";
  }
  const auto plan = sql::plan("SELECT " + select + " FROM " + def.fact, store.schema());
  const ResultSet r = exec::execute_baseline(plan, store);
  if (r.rows.empty()) return std::vector<Value>(def.measures.size());
  return r.rows[0];
}

/// Combines two totals vectors as if their cells were merged.
std::vector<Value> combine_totals(const olap::CubeDef& def, const std::vector<Value>& a, const std::vector<Value>& b) {
  std::vector<Value> out;
  for (std::size_t m = 0; m < def.measures.size(); ++m) {
    if (is_null(a[m])) {
      out.push_back(b[m]);
    } else if (is_null(b[m])) {
      out.push_back(a[m]);
    } else if (def.measures[m].agg == olap::Aggregator::Max) {
      out.push_back(compare_total(a[m], b[m]) >= 0 ? a[m] : b[m]);
    } else if (std::holds_alternative<std::int64_t>(a[m]) && std::holds_alternative<std::int64_t>(b[m])) {
      out.push_back(std::get<std::int64_t>(a[m]) + std::get<std::int64_t>(b[m]));
    } else {
      out.push_back(*as_double(a[m]) + *as_double(b[m]));
    }
  }
  return out;
}

std::string render_totals(const std::vector<Value>& t) {
  std::string out;
  for (const auto& v : t) {
    if (!out.empty()) out += ", ";
    out += format_value(v, "NULL");
  }
  return out;
}

std::string render_pivot(const olap::PivotTable& p, const olap::DataCube& cube, const std::string& format) {
  auto key_text = [](const Row& k) {
    std::string s;
    for (const auto& v : k) {
      if (!s.empty()) s += "|";
      s += format_value(v, "UNKNOWN");
    }
    return s;
  };
  auto cell_text = [](const std::vector<Value>* v) {
    if (!v) return std::string();
    std::string s;
    for (const auto& x : *v) {
      if (!s.empty()) s += "/";
      s += format_value(x, "NULL");
    }
    return s;
  };
  if (format == "json") {
    nlohmann::ordered_json j;
    j["cube"] = cube.def().name;
    j["rows"] = p.row_dimensions;
    j["columns"] = p.column_dimensions;
    j["column_keys"] = nlohmann::ordered_json::array();
    for (const auto& k : p.column_keys) j["column_keys"].push_back(key_text(k));
    j["table"] = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < p.row_keys.size(); ++r) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      row.push_back(key_text(p.row_keys[r]));
      for (std::size_t c = 0; c < p.column_keys.size(); ++c) row.push_back(cell_text(p.at(r, c)));
      j["table"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
  }
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{join(p.row_dimensions, "|") + " \\ " + join(p.column_dimensions, "|")};
  for (const auto& k : p.column_keys) header.push_back(key_text(k));
  grid.push_back(std::move(header));
  for (std::size_t r = 0; r < p.row_keys.size(); ++r) {
    std::vector<std::string> row{key_text(p.row_keys[r])};
    for (std::size_t c = 0; c < p.column_keys.size(); ++c) row.push_back(cell_text(p.at(r, c)));
    grid.push_back(std::move(row));
  }
  std::string out;
  for (const auto& row : grid) {
    if (format == "csv") {
      csv::append_record(out, row);
    } else {
      out += join(row, "\t") + "\n";
    }
  }
  return out;
}

std::string render_cube(const olap::DataCube& cube, const std::string& format) {
  if (format != "csv") return cube.to_json() + "\n";
  std::string out;
  std::vector<std::string> header;
  for (std::size_t d = 0; d < cube.def().dimensions.size(); ++d) {
    if (cube.coordinate_slot(d)) header.push_back(cube.def().dimensions[d].hierarchy.name);
  }
  for (const auto& m : cube.def().measures) header.push_back(m.name);
  csv::append_record(out, header);
  for (const auto& [coord, values] : cube.sorted_cells()) {
    std::vector<std::string> rec;
    for (const auto& v : coord) rec.push_back(format_value(v, "UNKNOWN"));
    for (const auto& v : values) rec.push_back(format_value(v));
    csv::append_record(out, rec);
  }
  return out;
}

int cmd_cube(const std::string& action, const Settings& s, const CubeArgs& a, std::ostream& out, std::ostream& err) {
  if (action == "define") {
    const olap::CubeDef def = define_cube(a);
    const auto problems = olap::validate_cube(def, builtin_adw_schema());
    if (!problems.empty()) throw UsageError("invalid cube: " + join(problems, "; "));
    const std::string text = olap::cube_def_to_json(def);
    if (!s.out.empty()) write_file(s.out, text);
    out << text;
    return kOk;
  }
  const olap::CubeDef def = selected_cube(a);
  Warehouse w = open_warehouse(s);
  const olap::DataCube base = olap::build_cube(*w.columns, def);
  bool conserved = true;
  auto report_check = [&](const std::string& what, bool ok) {
    err << "conservation " << what << ": " << (ok ? "ok" : "FAILED") << "\n";
    conserved = conserved && ok;
  };
  if (a.check) report_check("base totals vs row-store oracle", totals_match(base.totals(), oracle_totals(def, *w.rows)));

  if (action == "build") {
    out << "cube " << def.name << ": " << base.cell_count() << " cells from " << base.source_rows()
        << " fact rows; totals " << render_totals(base.totals()) << "\n";
  } else if (action == "export") {
    out << render_cube(base, s.format);
  } else if (action == "op") {
    const std::string& op = a.operation;
    if (op == "pivot") {
      const auto p = olap::pivot(base, split_list(a.rows), split_list(a.cols));
      out << render_pivot(p, base, s.format);
    } else {
      if (a.dim.empty()) throw UsageError("cube op " + op + " needs --dim");
      olap::DataCube result;
      if (op == "roll_up") {
        if (a.level.empty()) throw UsageError("roll_up needs --level");
        result = olap::roll_up(base, a.dim, a.level);
        if (a.check) report_check("roll_up totals", totals_match(result.totals(), base.totals()));
      } else if (op == "drill_down") {
        if (a.level.empty()) throw UsageError("drill_down needs --level");
        result = olap::drill_down(base, a.dim, a.level, *w.columns);
        if (a.check) report_check("drill_down totals", totals_match(result.totals(), base.totals()));
      } else if (op == "slice" || op == "dice") {
        std::vector<Value> chosen;
        if (op == "slice") {
          chosen.push_back(parse_member(base, a.dim, a.member));
          result = olap::slice(base, a.dim, chosen[0]);
        } else {
          for (const auto& m : split_list(a.members)) chosen.push_back(parse_member(base, a.dim, m));
          result = olap::dice(base, {{a.dim, chosen}});
        }
        if (a.check) {
          const std::size_t slot = *base.coordinate_slot(*base.dimension_index(a.dim));
          sql::ValueSet picked(chosen.begin(), chosen.end());
          std::vector<Value> rest;
          sql::ValueSet seen;
          for (const auto& [coord, cells] : base.cells()) {
            if (!picked.count(coord[slot]) && seen.insert(coord[slot]).second) rest.push_back(coord[slot]);
          }
          const auto complement = olap::dice(base, {{a.dim, rest}});
          report_check(op + " partition totals",
                       totals_match(combine_totals(def, result.totals(), complement.totals()), base.totals()));
        }
      } else {
        throw UsageError("unknown cube operation '" + op + "'");
      }
      out << render_cube(result, s.format);
    }
  } else {
    throw UsageError("unknown cube action '" + action + "'");
  }
  return conserved ? kOk : kRuntimeError;
}

// bench ----------------------------------------------------------------------

int cmd_bench(const Settings& s, const std::string& queries, std::ostream& out, std::ostream& err) {
  std::vector<WorkloadQuery> workload = builtin_workload();
  if (!queries.empty()) {
    const auto wanted = split_list(queries);
    std::vector<WorkloadQuery> subset;
    for (const auto& id : wanted) {
      auto it = std::find_if(workload.begin(), workload.end(), [&](const WorkloadQuery& q) { return q.id == id; });
      if (it == workload.end()) throw UsageError("unknown query id '" + id + "'");
      subset.push_back(*it);
    }
    workload = std::move(subset);
  }
  Warehouse w = open_warehouse(s);
  const olap::CubeRegistry reg = olap::build_registry(*w.columns, olap::builtin_cubes());
  bench::BenchmarkOptions opt;
  opt.repetitions = s.reps;
  opt.scale = s.warehouse.empty() ? s.scale : static_cast<std::int64_t>(w.rows->row_count("FieldFact"));
  opt.seed = s.seed;
  const auto report = bench::run_benchmark({w.rows.get(), w.columns.get(), &reg}, workload, opt);
  if (!s.out.empty()) {
    const fs::path dir(s.out);
    write_file(dir / "report.txt", bench::render_report(report, bench::Format::Text));
    write_file(dir / "report.csv", bench::render_report(report, bench::Format::Csv));
    write_file(dir / "report.json", bench::render_report(report, bench::Format::Json));
  }
  out << bench::render_report(report, parse_format(s.format));
  for (const auto& q : report.queries) {
    if (!q.results_match) err << "warning: " << q.id << " warehouse result differs from baseline\n";
  }
  return report.properties_pass() ? kOk : kRuntimeError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crop-data analytical warehouse", "adw"};
  app.require_subcommand(1);
  app.fallthrough();
  Settings s;
  app.add_option("--seed", s.seed, "generator seed")->envname("ADW_SEED")->capture_default_str();
  app.add_option("--scale", s.scale, "FieldFact rows to generate")
      ->envname("ADW_SCALE")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--format", s.format, "output format")
      ->envname("ADW_FORMAT")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
  app.add_option("--reps", s.reps, "timed repetitions per query")
      ->envname("ADW_REPS")
      ->check(CLI::Range(1, 1000))
      ->capture_default_str();
  app.add_option("--path", s.path, "execution path")
      ->envname("ADW_PATH")
      ->check(CLI::IsMember({"baseline", "rolap", "holap"}))
      ->capture_default_str();
  app.add_option("--duplicate-rate", s.rates.duplicate)->envname("ADW_DUPLICATE_RATE");
  app.add_option("--missing-rate", s.rates.missing)->envname("ADW_MISSING_RATE");
  app.add_option("--inconsistent-rate", s.rates.inconsistent)->envname("ADW_INCONSISTENT_RATE");
  app.add_option("--wrong-rate", s.rates.wrong)->envname("ADW_WRONG_RATE");
  app.add_option("--data", s.data, "directory of raw CSV files")->envname("ADW_DATA");
  app.add_option("--warehouse", s.warehouse, "directory holding warehouse.snap")->envname("ADW_WAREHOUSE");
  app.add_option("--out", s.out, "output directory or file")->envname("ADW_OUT");

  auto* generate = app.add_subcommand("generate", "write raw CSV files and ledger.json to --out");
  auto* etl = app.add_subcommand("etl", "cleanse --data and optionally store it under --warehouse");

  QueryArgs q;
  auto* query = app.add_subcommand("query", "run one SQL query");
  query->add_option("--sql", q.sql, "query text");
  query->add_option("--file", q.file, "file holding the query");
  query->add_flag("--explain", q.explain, "print the plan instead of executing");
  query->add_flag("--no-cubes", q.no_cubes, "holap without materialized cubes");

  CubeArgs c;
  auto* cube = app.add_subcommand("cube", "define, build, export or operate on a cube");
  cube->require_subcommand(1);
  auto* define = cube->add_subcommand("define", "print a cube definition as JSON");
  define->add_option("--name", c.name);
  define->add_option("--fact", c.fact)->capture_default_str();
  define->add_option("--dim", c.dims, "hierarchy[:level]");
  define->add_option("--measure", c.measures, "name=sum|count|max(column)");
  auto* build = cube->add_subcommand("build", "build and summarize");
  auto* exp = cube->add_subcommand("export", "build and print every cell");
  auto* op = cube->add_subcommand("op", "apply one OLAP operation");
  op->add_option("operation", c.operation, "roll_up|drill_down|slice|dice|pivot")
      ->required()
      ->check(CLI::IsMember({"roll_up", "drill_down", "slice", "dice", "pivot"}));
  op->add_option("--dim", c.dim);
  op->add_option("--level", c.level);
  op->add_option("--member", c.member);
  op->add_option("--members", c.members, "comma-separated");
  op->add_option("--rows", c.rows, "comma-separated dimensions");
  op->add_option("--cols", c.cols, "comma-separated dimensions");
  for (auto* sub : {build, exp, op}) {
    sub->add_option("--cube", c.cube, "built-in cube name");
    sub->add_option("--def", c.def_file, "cube definition file");
    sub->add_flag("--check-conservation", c.check, "verify totals against the row store");
  }

  std::string bench_queries;
  auto* benchcmd = app.add_subcommand("bench", "time the workload on both engines");
  benchcmd->add_option("--queries", bench_queries, "comma-separated subset of query ids");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (generate->parsed()) return cmd_generate(s, out);
    if (etl->parsed()) return cmd_etl(s, out);
    if (query->parsed()) return cmd_query(s, q, out);
    if (cube->parsed()) {
      for (auto* sub : {define, build, exp, op}) {
        if (sub->parsed()) return cmd_cube(sub->get_name(), s, c, out, err);
      }
    }
    if (benchcmd->parsed()) return cmd_bench(s, bench_queries, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsageError;
  } catch (const sql::BindError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace adw::cli
