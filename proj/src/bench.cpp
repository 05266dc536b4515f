#include "sqq/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "sqq/errors.hpp"

#ifndef SQQ_DATA_DIR
#define SQQ_DATA_DIR "data"
#endif

namespace sqq {

namespace fs = std::filesystem;

std::string resolve_suite_path(const std::string& name_or_path) {
  if (fs::exists(name_or_path)) return name_or_path;
  const std::string bundled = std::string(SQQ_DATA_DIR) + "/suites/" + name_or_path + ".json";
  if (fs::exists(bundled)) return bundled;
  throw Error(ErrorCode::data_load, "no suite file '" + name_or_path + "' (looked for " + bundled + ")");
}

BenchSuite parse_suite(const nlohmann::json& j) {
  BenchSuite suite;
  try {
    suite.name = j.at("name").get<std::string>();
    for (const auto& t : j.at("tables")) {
      BenchTable table;
      table.name = t.at("name").get<std::string>();
      table.title = t.value("title", table.name);
      for (const auto& c : t.at("cells")) {
        BenchCell cell;
        cell.label = c.at("label").get<std::string>();
        cell.config = run_config_from_json(c.at("config"));
        cell.timing_critical = c.value("timing_critical", false);
        table.cells.push_back(std::move(cell));
      }
      suite.tables.push_back(std::move(table));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::data_load, std::string("suite: ") + e.what());
  }
  return suite;
}

BenchSuite load_suite(const std::string& name_or_path) {
  const std::string path = resolve_suite_path(name_or_path);
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::data_load, "cannot open suite '" + path + "'");
  try {
    return parse_suite(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::data_load, "suite '" + path + "': " + e.what());
  }
}

BenchRecord run_cell(const BenchCell& cell) {
  BenchRecord r;
  const RunConfig& c = cell.config;
  r.label = cell.label;
  r.variant = c.variant;
  r.problem = c.problem;
  r.m = c.m;
  r.n = c.n;
  r.step = c.step;
  try {
    r.duration = c.duration.in_periods ? c.duration.resolve(load_problem(c).period) : c.duration.value;
    RunConfig quiet = c;
    quiet.out.clear();
    quiet.sample_every = std::max(quiet.sample_every, 1000000);
    const RunResult res = run(quiet);
    const Trajectory& t = res.trajectory;
    r.duration = t.duration;
    r.steps = t.stats.steps;
    r.max_abs_energy_error = t.stats.max_abs_energy_error;
    r.max_rel_energy_error = t.stats.max_rel_energy_error;
    r.wall_time = t.wall_time;
    r.mean_iterations = t.stats.mean_iterations();
    r.residual_evaluations = t.stats.residual_evaluations;
  } catch (const StepFailure& f) {
    r.ok = false;
    r.message = f.what();
  } catch (const Error& e) {
    r.ok = false;
    r.message = std::string(to_string(e.code())) + ": " + e.what();
  }
  return r;
}

std::vector<BenchRecord> run_cells(const std::vector<BenchCell>& cells, const BenchOptions& opts) {
  std::vector<BenchRecord> out(cells.size());
  std::vector<std::size_t> parallel;
  std::vector<std::size_t> serial;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    (opts.serial_timing && cells[i].timing_critical ? serial : parallel).push_back(i);
  }

  const int workers = std::max(1, std::min<int>(opts.workers, static_cast<int>(parallel.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < parallel.size(); k = next++) {
      out[parallel[k]] = run_cell(cells[parallel[k]]);
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (std::size_t i : serial) out[i] = run_cell(cells[i]);
  return out;
}

namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2E", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "label,variant,problem,m,n,step,duration,steps,max_abs_energy_error,max_rel_energy_error,"
         "mean_iterations,residual_evaluations,status,message\n";
  for (const BenchRecord& r : records) {
    out << csv_field(r.label) << ',' << r.variant << ',' << r.problem << ',' << r.m << ',' << r.n << ','
        << g17(r.step) << ',' << g17(r.duration) << ',' << r.steps << ',' << g17(r.max_abs_energy_error)
        << ',' << g17(r.max_rel_energy_error) << ',' << g17(r.mean_iterations) << ','
        << r.residual_evaluations << ',' << (r.ok ? "ok" : "failed") << ',' << csv_field(r.message)
        << '\n';
  }
}

void write_wall_time_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "label,variant,wall_time_s\n";
  for (const BenchRecord& r : records) {
    out << csv_field(r.label) << ',' << r.variant << ',' << g17(r.wall_time) << '\n';
  }
}

std::string format_bench_table(const std::string& title, const std::vector<BenchRecord>& records) {
  std::vector<std::vector<std::string>> rows = {{"Integrator"},       {"m, n"},
                                                {"step"},             {"steps"},
                                                {"CPU time (s)"},     {"Max energy error (abs)"},
                                                {"Max energy error (rel)"}, {"Mean iterations"}};
  for (const BenchRecord& r : records) {
    char buf[64];
    rows[0].push_back(r.label);
    rows[1].push_back(r.m == r.n ? std::to_string(r.m) : std::to_string(r.m) + ", " + std::to_string(r.n));
    std::snprintf(buf, sizeof buf, "%g", r.step);
    rows[2].push_back(buf);
    if (!r.ok) {
      for (std::size_t k = 3; k < rows.size(); ++k) rows[k].push_back("failed");
      continue;
    }
    rows[3].push_back(std::to_string(r.steps));
    std::snprintf(buf, sizeof buf, "%.2f", r.wall_time);
    rows[4].push_back(buf);
    rows[5].push_back(sci(r.max_abs_energy_error));
    rows[6].push_back(sci(r.max_rel_energy_error));
    std::snprintf(buf, sizeof buf, "%.2f", r.mean_iterations);
    rows[7].push_back(buf);
  }
  std::vector<std::size_t> width(records.size() + 1, 0);
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) width[k] = std::max(width[k], row[k].size());
  }
  std::string text = title + "\n";
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      std::string cell = row[k];
      cell.resize(width[k], ' ');
      text += (k == 0 ? "" : "  ") + cell;
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    text += '\n';
  }
  for (const BenchRecord& r : records) {
    if (!r.ok) text += "  " + r.label + ": " + r.message + "\n";
  }
  return text;
}

bool run_suite(const BenchSuite& suite, const std::string& out_dir, const BenchOptions& opts,
               std::ostream& log) {
  fs::create_directories(out_dir);
  bool all_ok = true;
  for (const BenchTable& table : suite.tables) {
    const auto records = run_cells(table.cells, opts);
    const std::string stem = (fs::path(out_dir) / table.name).string();
    std::ofstream csv(stem + ".csv");
    std::ofstream txt(stem + ".txt");
    std::ofstream wall(stem + ".wall.csv");
    if (!csv || !txt || !wall) throw Error(ErrorCode::data_load, "cannot write to '" + out_dir + "'");
    write_bench_csv(csv, records);
    write_wall_time_csv(wall, records);
    const std::string text = format_bench_table(table.title, records);
    txt << text;
    log << text << '\n';
    for (const BenchRecord& r : records) all_ok = all_ok && r.ok;
  }
  return all_ok;
}

}  // namespace sqq
