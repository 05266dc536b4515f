#include "sqq/problems.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "sqq/errors.hpp"

#ifndef SQQ_DATA_DIR
#define SQQ_DATA_DIR "data"
#endif

namespace sqq {

int ProblemSpec::space_dim() const {
  if (const NBodySystem* nb = nbody()) return nb->space_dim();
  return model ? model->dof() : 0;
}

Vec total_linear_momentum(int space_dim, const VecRef& p) {
  Vec total = Vec::Zero(space_dim);
  for (Eigen::Index i = 0; i + space_dim <= p.size(); i += space_dim) {
    total += p.segment(i, space_dim);
  }
  return total;
}

Vec total_angular_momentum(int space_dim, const VecRef& q, const VecRef& p) {
  if (space_dim == 2) {
    Vec L = Vec::Zero(1);
    for (Eigen::Index i = 0; i + 2 <= q.size(); i += 2) {
      L[0] += q[i] * p[i + 1] - q[i + 1] * p[i];
    }
    return L;
  }
  Vec L = Vec::Zero(3);
  for (Eigen::Index i = 0; i + 3 <= q.size(); i += 3) {
    const Eigen::Vector3d r = q.segment<3>(i);
    const Eigen::Vector3d v = p.segment<3>(i);
    L += r.cross(v);
  }
  return L;
}

namespace {

void fill_invariants(ProblemSpec& spec) {
  const int sd = spec.space_dim();
  spec.H0 = spec.model->hamiltonian(spec.initial);
  spec.linear_momentum = total_linear_momentum(sd, spec.initial.p);
  spec.angular_momentum = total_angular_momentum(sd, spec.initial.q, spec.initial.p);
}

}  // namespace

ProblemSpec kepler_problem(double e) {
  auto [model, ic] = kepler_model(e);
  ProblemSpec spec;
  spec.name = "kepler";
  spec.model = std::make_shared<CentralForceModel>(model);
  spec.initial = ic;
  spec.period = 2.0 * std::numbers::pi;
  spec.units = "dimensionless (mu = 1, semi-major axis 1)";
  fill_invariants(spec);
  // A single body about a fixed centre has no conserved linear momentum.
  spec.linear_momentum.resize(0);
  return spec;
}

ProblemSpec three_body_problem() {
  Vec masses(3);
  masses << 0.9, 0.85, 1.0;
  const double velocities[3][2] = {{0.0, 1.7813}, {0.0, 0.4150}, {0.0, -1.9559}};
  ProblemSpec spec;
  spec.name = "three-body";
  spec.model = std::make_shared<NBodySystem>(2, masses, 1.0);
  spec.initial.q = Vec(6);
  spec.initial.q << -0.2227, 0.0, 1.0, 0.0, 0.0, 0.0;
  spec.initial.p = Vec(6);
  for (int i = 0; i < 3; ++i) {
    spec.initial.p[2 * i] = masses[i] * velocities[i][0];
    spec.initial.p[2 * i + 1] = masses[i] * velocities[i][1];
  }
  spec.initial.t = 0.0;
  spec.period = 6.3509;
  spec.units = "dimensionless (G = 1)";
  spec.source = "periodic planar orbit, masses (0.9, 0.85, 1)";
  fill_invariants(spec);
  return spec;
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

std::string default_outer_solar_path() {
  return std::string(SQQ_DATA_DIR) + "/outer_solar_system.json";
}

namespace {

[[noreturn]] void load_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::data_load, "problem file '" + path + "': " + what);
}

Eigen::Vector3d read_vec3(const nlohmann::json& j, const std::string& path, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) {
    load_error(path, std::string("body field '") + key + "' must be an array of 3 numbers");
  }
  Eigen::Vector3d v;
  for (int k = 0; k < 3; ++k) v[k] = j[key][k].get<double>();
  return v;
}

}  // namespace

ProblemSpec load_nbody_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) load_error(path, "cannot open file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    load_error(path, std::string("malformed JSON: ") + e.what());
  }
  for (const char* key : {"name", "bodies", "grav_const", "units", "source", "checksum"}) {
    if (!doc.contains(key)) load_error(path, std::string("missing field '") + key + "'");
  }
  const std::string stated = doc["checksum"].get<std::string>();
  nlohmann::json body = doc;
  body.erase("checksum");
  const std::string computed = "fnv1a64:" + fnv1a64_hex(body.dump());
  if (stated != computed) {
    load_error(path, "checksum mismatch (file says " + stated + ", content hashes to " + computed + ")");
  }

  const auto& bodies = doc["bodies"];
  if (!bodies.is_array() || bodies.empty()) load_error(path, "'bodies' must be a non-empty array");
  const auto nb = static_cast<Eigen::Index>(bodies.size());
  Vec masses(nb);
  PhaseState ic;
  ic.q = Vec(3 * nb);
  ic.p = Vec(3 * nb);
  try {
    for (Eigen::Index i = 0; i < nb; ++i) {
      const auto& b = bodies[i];
      masses[i] = b.at("mass").get<double>();
      ic.q.segment<3>(3 * i) = read_vec3(b, path, "position");
      ic.p.segment<3>(3 * i) = masses[i] * read_vec3(b, path, "velocity");
    }
  } catch (const nlohmann::json::exception& e) {
    load_error(path, std::string("bad body entry: ") + e.what());
  }

  ProblemSpec spec;
  spec.name = doc["name"].get<std::string>();
  try {
    spec.model = std::make_shared<NBodySystem>(3, masses, doc["grav_const"].get<double>());
  } catch (const Error& e) {
    load_error(path, e.what());
  }
  spec.initial = ic;
  spec.units = doc["units"].get<std::string>();
  spec.source = doc["source"].get<std::string>();

  // Reference period: osculating two-body orbit of the reference body about body 0.
  const std::string ref_name = doc.value("reference_body", bodies[1].value("name", ""));
  Eigen::Index ref = -1;
  for (Eigen::Index i = 1; i < nb; ++i) {
    if (bodies[i].value("name", "") == ref_name) ref = i;
  }
  if (ref < 0) load_error(path, "reference body '" + ref_name + "' not found");
  const double mu = doc["grav_const"].get<double>() * (masses[0] + masses[ref]);
  const Eigen::Vector3d r = ic.q.segment<3>(3 * ref) - ic.q.segment<3>(0);
  const Eigen::Vector3d v = ic.p.segment<3>(3 * ref) / masses[ref] - ic.p.segment<3>(0) / masses[0];
  const double inv_a = 2.0 / r.norm() - v.squaredNorm() / mu;
  if (!(inv_a > 0.0)) load_error(path, "reference body is not on a bound orbit");
  spec.period = 2.0 * std::numbers::pi * std::sqrt(1.0 / (inv_a * inv_a * inv_a) / mu);

  fill_invariants(spec);
  return spec;
}

ProblemSpec outer_solar_problem(const std::string& path) {
  return load_nbody_problem(path.empty() ? default_outer_solar_path() : path);
}

ProblemSpec make_problem(const std::string& name, double e, const std::string& data_file) {
  if (name == "kepler") return kepler_problem(e);
  if (name == "three-body") return three_body_problem();
  if (name == "outer-solar") return outer_solar_problem(data_file);
  throw Error(ErrorCode::invalid_argument, "unknown problem '" + name + "'");
}

}  // namespace sqq
