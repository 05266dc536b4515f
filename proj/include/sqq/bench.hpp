/**
 * @file bench.hpp
 * @brief Benchmark matrices: run (variant, problem, parameters) cells and tabulate them.
 *
 * Result CSVs hold only deterministic columns. Wall times go to a separate sidecar so two
 * identical invocations produce byte-identical result files.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sqq/run_config.hpp"

namespace sqq {

struct BenchCell {
  std::string label;
  RunConfig config;
  /// Run alone (after the parallel batch) when serial timing is requested.
  bool timing_critical = false;
};

struct BenchTable {
  std::string name;   // file stem
  std::string title;
  std::vector<BenchCell> cells;
};

struct BenchSuite {
  std::string name;
  std::vector<BenchTable> tables;
};

struct BenchRecord {
  std::string label;
  std::string variant;
  std::string problem;
  int m = 0;
  int n = 0;
  double step = 0.0;
  double duration = 0.0;  // physical time requested
  long steps = 0;
  double max_abs_energy_error = 0.0;  // over all steps
  double max_rel_energy_error = 0.0;
  double wall_time = 0.0;  // seconds
  double mean_iterations = 0.0;
  long residual_evaluations = 0;
  bool ok = true;
  std::string message;  // failure description when !ok
};

struct BenchOptions {
  int workers = 1;
  bool serial_timing = false;
};

/// Suite lookup: an existing path, else data/suites/<name>.json.
std::string resolve_suite_path(const std::string& name_or_path);
BenchSuite load_suite(const std::string& name_or_path);
BenchSuite parse_suite(const nlohmann::json& j);

/// Runs one cell; a step failure is recorded in the record rather than thrown.
BenchRecord run_cell(const BenchCell& cell);

/// Runs cells on up to opts.workers threads. Output order matches the input order.
std::vector<BenchRecord> run_cells(const std::vector<BenchCell>& cells, const BenchOptions& opts);

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);
void write_wall_time_csv(std::ostream& out, const std::vector<BenchRecord>& records);
/// Aligned text table: one column per cell, rows as in the published tables.
std::string format_bench_table(const std::string& title, const std::vector<BenchRecord>& records);

/// Runs every table of the suite and writes <dir>/<table>.csv, .txt and .wall.csv.
/// Returns false when any cell failed.
bool run_suite(const BenchSuite& suite, const std::string& out_dir, const BenchOptions& opts,
               std::ostream& log);

}  // namespace sqq
