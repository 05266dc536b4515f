#include "sqq/trajectory_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "sqq/errors.hpp"

namespace sqq {

namespace {

void put(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::data_load, "trajectory CSV: " + what);
}

}  // namespace

std::string trajectory_csv_header(int dof) {
  std::string h = "t";
  for (int i = 0; i < dof; ++i) h += ",q_" + std::to_string(i);
  for (int i = 0; i < dof; ++i) h += ",p_" + std::to_string(i);
  h += ",H,abs_err,rel_err,sigma,iters";
  return h;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << trajectory_csv_header(traj.dof) << '\n';
  std::string line;
  for (const Sample& s : traj.samples) {
    line.clear();
    put(line, s.t);
    for (Eigen::Index i = 0; i < s.q.size(); ++i) {
      line += ',';
      put(line, s.q[i]);
    }
    for (Eigen::Index i = 0; i < s.p.size(); ++i) {
      line += ',';
      put(line, s.p[i]);
    }
    const double abs_err = std::abs(s.H - traj.H0);
    const double rel_err = traj.H0 != 0.0 ? abs_err / std::abs(traj.H0) : 0.0;
    for (double v : {s.H, abs_err, rel_err, s.sigma}) {
      line += ',';
      put(line, v);
    }
    line += ',' + std::to_string(s.iterations);
    out << line << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::data_load, "cannot open '" + path + "' for writing");
  write_trajectory_csv(out, traj);
  if (!out) throw Error(ErrorCode::data_load, "write to '" + path + "' failed");
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad("empty input");
  const auto header = split(line);
  // t + 2d + 5 trailing columns
  if (header.size() < 8 || (header.size() - 6) % 2 != 0 || header.front() != "t") bad("bad header");
  const int d = static_cast<int>(header.size() - 6) / 2;
  if (line != trajectory_csv_header(d)) bad("header does not match the dump format");

  Trajectory traj;
  traj.dof = d;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) bad("row " + std::to_string(row) + " has the wrong column count");
    Sample s;
    s.q.resize(d);
    s.p.resize(d);
    try {
      s.t = std::stod(cells[0]);
      for (int i = 0; i < d; ++i) s.q[i] = std::stod(cells[1 + i]);
      for (int i = 0; i < d; ++i) s.p[i] = std::stod(cells[1 + d + i]);
      s.H = std::stod(cells[1 + 2 * d]);
      s.sigma = std::stod(cells[4 + 2 * d]);
      s.iterations = std::stoi(cells[5 + 2 * d]);
    } catch (const std::exception&) {
      bad("row " + std::to_string(row) + " holds a non-numeric cell");
    }
    traj.samples.push_back(std::move(s));
  }
  if (traj.samples.empty()) bad("no samples");
  traj.H0 = traj.samples.front().H;
  traj.duration = traj.samples.back().t - traj.samples.front().t;
  return traj;
}

Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::data_load, "cannot open '" + path + "'");
  return read_trajectory_csv(in);
}

}  // namespace sqq
