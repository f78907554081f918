#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "so3est/dynamics.hpp"
#include "so3est/filters.hpp"
#include "so3est/sim.hpp"

namespace so3est::io {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Reads a JSON document and checks its `schema` field. Throws ConfigError.
json load_config(const std::string& path);
void check_schema(const json& doc);

/// Matrices are row-major flat arrays ([r0c0, r0c1, ...]); nested row arrays are also
/// accepted on input. cols < 0 infers the column count from the element count.
Eigen::MatrixXd parse_matrix(const json& value, int rows, int cols, const std::string& what);
Matrix3d parse_matrix3(const json& value, const std::string& what);
Matrix3Xd parse_matrix3x(const json& value, const std::string& what);
Vector3d parse_vector3(const json& value, const std::string& what);
VectorXd parse_vector(const json& value, const std::string& what);

json to_json(const Eigen::MatrixXd& m);

/// "%.10g".
std::string format_number(double value);

IntegratorConfig parse_integrator(const json& value);
PotentialModel<double> parse_potential(const json& value, const InertiaSpec<double>& inertia);
BodyState<double> parse_initial_state(const json& value);
std::vector<double> parse_schedule(const json& value);
ScenarioSpec<double> parse_scenario(const json& value);
FilterConfig<double> parse_filter_config(const json& value, const IntegratorConfig& fallback);
FilterMode parse_mode(const std::string& text);
std::string to_string(FilterMode mode);

/// Resolves --output against the SO3EST_OUTPUT_DIR override for relative paths.
std::string resolve_output_path(const std::string& path);

/// Writes text to `path` (creating parent directories) or to `fallback` if path is empty.
void write_artifact(const std::string& path, const std::string& text, std::ostream& fallback);

}  // namespace so3est::io
