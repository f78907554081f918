#include "so3est/cli/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace so3est::io {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) config_error(where + ": missing field '" + key + "'");
  return obj.at(key);
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) config_error(what + " must be a number");
  return v.get<double>();
}

}  // namespace

void check_schema(const json& doc) {
  if (!doc.is_object()) config_error("config root must be an object");
  if (!doc.contains("schema")) config_error("config lacks the 'schema' field");
  if (!doc["schema"].is_number_integer() || doc["schema"].get<int>() != kSchemaVersion) {
    config_error("unsupported schema version (expected " + std::to_string(kSchemaVersion) + ")");
  }
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    config_error("cannot parse '" + path + "': " + e.what());
  }
  check_schema(doc);
  return doc;
}

Eigen::MatrixXd parse_matrix(const json& value, int rows, int cols, const std::string& what) {
  std::vector<double> flat;
  if (!value.is_array()) config_error(what + " must be an array");
  const bool nested = !value.empty() && value.front().is_array();
  if (nested) {
    if (static_cast<int>(value.size()) != rows) config_error(what + " must have " + std::to_string(rows) + " rows");
    std::size_t width = value.front().size();
    for (const auto& row : value) {
      if (!row.is_array() || row.size() != width) config_error(what + " has ragged rows");
      for (const auto& x : row) flat.push_back(as_number(x, what));
    }
  } else {
    for (const auto& x : value) flat.push_back(as_number(x, what));
  }
  if (flat.empty() || flat.size() % static_cast<std::size_t>(rows) != 0) {
    config_error(what + " element count is not a multiple of " + std::to_string(rows));
  }
  const int inferred = static_cast<int>(flat.size()) / rows;
  if (cols >= 0 && inferred != cols) {
    config_error(what + " must be " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  Eigen::MatrixXd m(rows, inferred);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < inferred; ++c) m(r, c) = flat[static_cast<std::size_t>(r * inferred + c)];
  return m;
}

Matrix3d parse_matrix3(const json& value, const std::string& what) { return parse_matrix(value, 3, 3, what); }

Matrix3Xd parse_matrix3x(const json& value, const std::string& what) { return parse_matrix(value, 3, -1, what); }

Vector3d parse_vector3(const json& value, const std::string& what) {
  if (!value.is_array() || value.size() != 3) config_error(what + " must be an array of 3 numbers");
  return {as_number(value[0], what), as_number(value[1], what), as_number(value[2], what)};
}

VectorXd parse_vector(const json& value, const std::string& what) {
  if (!value.is_array()) config_error(what + " must be an array");
  VectorXd v(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) v(static_cast<Eigen::Index>(i)) = as_number(value[i], what);
  return v;
}

json to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

IntegratorConfig parse_integrator(const json& value) {
  IntegratorConfig cfg;
  if (value.is_null()) return cfg;
  if (!value.is_object()) config_error("integrator must be an object");
  if (value.contains("step")) cfg.step = as_number(value["step"], "integrator.step");
  if (value.contains("scheme")) cfg.scheme = value["scheme"].get<std::string>();
  try {
    validate_integrator(cfg);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return cfg;
}

PotentialModel<double> parse_potential(const json& value, const InertiaSpec<double>& inertia) {
  if (value.is_null()) return zero_potential();
  const std::string type = require(value, "type", "potential").get<std::string>();
  if (type == "zero") return zero_potential();
  if (type == "linear") return linear_potential(parse_matrix3(require(value, "A", "potential"), "potential.A"));
  if (type == "gravity_gradient") {
    const double kappa = as_number(require(value, "kappa", "potential"), "potential.kappa");
    const Vector3d dir = parse_vector3(require(value, "direction", "potential"), "potential.direction");
    if (dir.norm() == 0.0) config_error("potential.direction must be nonzero");
    return gravity_gradient_potential(kappa, dir, inertia);
  }
  config_error("unknown potential type '" + type + "'");
}

BodyState<double> parse_initial_state(const json& value) {
  BodyState<double> s{0.0, Matrix3d::Identity(), Matrix3d::Zero()};
  if (!value.is_object()) config_error("initial must be an object");
  if (value.contains("t")) s.t = as_number(value["t"], "initial.t");
  if (value.contains("C")) s.C = parse_matrix3(value["C"], "initial.C");
  if (value.contains("omega")) s.Omega = hat(parse_vector3(value["omega"], "initial.omega"));
  if (!is_rotation(s.C)) config_error("initial.C is not a rotation matrix");
  return s;
}

std::vector<double> parse_schedule(const json& value) {
  std::vector<double> times;
  if (value.is_array()) {
    for (const auto& x : value) times.push_back(as_number(x, "schedule"));
    return times;
  }
  const double t0 = as_number(require(value, "t0", "schedule"), "schedule.t0");
  const double dt = as_number(require(value, "dt", "schedule"), "schedule.dt");
  const auto count = require(value, "count", "schedule").get<int>();
  if (!(dt > 0.0) || count < 0) config_error("schedule needs dt > 0 and count >= 0");
  for (int k = 0; k < count; ++k) times.push_back(t0 + k * dt);
  return times;
}

namespace {

Matrix3Xd parse_references(const json& value) {
  const std::string type = require(value, "type", "references").get<std::string>();
  if (type == "explicit") return parse_matrix3x(require(value, "E", "references"), "references.E");
  if (type == "cone") {
    const Vector3d axis = parse_vector3(require(value, "axis", "references"), "references.axis");
    const double half_angle = as_number(require(value, "half_angle", "references"), "references.half_angle");
    const int count = require(value, "count", "references").get<int>();
    const auto seed = value.value("seed", std::uint64_t{0});
    if (axis.norm() == 0.0 || !(half_angle > 0.0) || count < 3) config_error("invalid cone references");
    Rng rng(seed);
    return cone_references(axis, half_angle, count, rng);
  }
  config_error("unknown references type '" + type + "'");
}

}  // namespace

ScenarioSpec<double> parse_scenario(const json& value) {
  if (!value.is_object()) config_error("scenario must be an object");
  ScenarioSpec<double> scn;
  const Matrix3d lambda = parse_matrix3(require(value, "inertia", "scenario"), "scenario.inertia");
  if (!is_symmetric_pd(lambda)) config_error("scenario.inertia is not symmetric positive definite");
  scn.inertia = make_inertia(lambda);
  scn.potential = parse_potential(value.value("potential", json()), scn.inertia);
  scn.init = parse_initial_state(require(value, "initial", "scenario"));
  scn.schedule = parse_schedule(require(value, "schedule", "scenario"));
  scn.E = parse_references(require(value, "references", "scenario"));
  scn.W = value.contains("weights") ? parse_vector(value["weights"], "scenario.weights")
                                    : VectorXd::Ones(scn.E.cols()).eval();
  if (value.contains("noise")) {
    const json& n = value["noise"];
    scn.noise.sigma_vec = n.value("sigma_vec", 0.0);
    scn.noise.sigma_gyro = n.value("sigma_gyro", 0.0);
    scn.noise.seed = n.value("seed", std::uint64_t{0});
  }
  if (value.contains("gyro_weight")) scn.gyro_weight = parse_matrix3(value["gyro_weight"], "scenario.gyro_weight");
  scn.integrator = parse_integrator(value.value("integrator", json()));
  try {
    validate_scenario(scn);
    require_symmetric_pd(scn.gyro_weight, "gyro_weight");
  } catch (const Error& e) {
    config_error(e.what());
  }
  return scn;
}

FilterConfig<double> parse_filter_config(const json& value, const IntegratorConfig& fallback) {
  FilterConfig<double> cfg;
  cfg.integrator = fallback;
  if (value.is_null()) return cfg;
  if (value.contains("Delta")) cfg.Delta = parse_matrix3(value["Delta"], "filter.Delta");
  if (value.contains("Pi")) cfg.Pi = parse_matrix3(value["Pi"], "filter.Pi");
  if (value.contains("Gamma")) cfg.Gamma = parse_matrix3(value["Gamma"], "filter.Gamma");
  if (value.contains("integrator")) cfg.integrator = parse_integrator(value["integrator"]);
  try {
    validate_filter_config(cfg);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return cfg;
}

FilterMode parse_mode(const std::string& text) {
  if (text == "no-gyro") return FilterMode::NoGyro;
  if (text == "with-gyro") return FilterMode::WithGyro;
  config_error("mode must be 'no-gyro' or 'with-gyro'");
}

std::string to_string(FilterMode mode) { return mode == FilterMode::NoGyro ? "no-gyro" : "with-gyro"; }

std::string resolve_output_path(const std::string& path) {
  if (path.empty()) return path;
  const char* dir = std::getenv("SO3EST_OUTPUT_DIR");
  std::filesystem::path p(path);
  if (dir != nullptr && *dir != '\0' && p.is_relative()) return (std::filesystem::path(dir) / p).string();
  return path;
}

void write_artifact(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) config_error("cannot write output '" + path + "'");
  out << text;
}

}  // namespace so3est::io
