#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ctrlgrad/controllability.hpp"
#include "ctrlgrad/flow.hpp"
#include "json.hpp"

namespace ctrlgrad::io {

using json = nlohmann::json;

/// Round-trip safe decimal representation ("%.17g", '.' separator).
std::string format_double(double x);

/// {"n", "A" (row-major), "b", "c"}
json problem_to_json(const QuadraticProblem& p);
QuadraticProblem problem_from_json(const json& doc);

/// {"n", "m", "A", "B" (row-major n×m), "b", "c"}
json system_to_json(const ControlSystem& sys);
ControlSystem system_from_json(const json& doc);

/// Reads and validates a ControlSystem document. Unreadable or malformed
/// files raise IoError / ParseError; invariant failures raise ContractError.
ControlSystem load_system(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);

/// Writes to `path.tmp` and renames, so readers never see a partial file.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// "1,2,3", "[1, 2, 3]" or "" (empty vector).
Vector parse_vector(std::string_view text);

/// Nested JSON arrays [[..], [..]] with `rows` rows; a flat array is read
/// row-major when `cols` is given.
Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const std::string& pointer);

json vector_to_json(const Vector& v);

/// Columns t, x_0..x_{n−1}, u_0..u_{m−1}, f_value.
void write_trajectory_csv(const ControlSystem& sys, const Trajectory& traj, std::ostream& out);

} // namespace ctrlgrad::io
