#include "ctrlgrad/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ctrlgrad/errors.hpp"

namespace ctrlgrad::io {

namespace {

const json& require_field(const json& doc, const char* key)
{
    if (!doc.is_object()) {
        throw ParseError("", "expected a JSON object");
    }
    const auto it = doc.find(key);
    if (it == doc.end()) {
        throw ParseError(std::string("/") + key, "missing required field");
    }
    return *it;
}

std::size_t read_dim(const json& doc, const char* key)
{
    const json& v = require_field(doc, key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ParseError(std::string("/") + key, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
}

double read_number(const json& v, const std::string& pointer)
{
    if (!v.is_number()) {
        throw ParseError(pointer, "expected a number");
    }
    return v.get<double>();
}

std::vector<double> read_flat(const json& j, const std::string& pointer)
{
    if (!j.is_array()) {
        throw ParseError(pointer, "expected an array");
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(read_number(j[i], pointer + "/" + std::to_string(i)));
    }
    return out;
}

Vector vector_from_json(const json& j, std::size_t dim, const std::string& pointer)
{
    std::vector<double> v = read_flat(j, pointer);
    if (v.size() != dim) {
        throw ParseError(pointer, "expected " + std::to_string(dim) + " entries, got " + std::to_string(v.size()));
    }
    return Vector(std::move(v));
}

} // namespace

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json vector_to_json(const Vector& v)
{
    return json(v.values());
}

Matrix matrix_from_json(const json& j, std::size_t rows, std::size_t cols, const std::string& pointer)
{
    if (!j.is_array()) {
        throw ParseError(pointer, "expected an array");
    }
    // Flat row-major layout.
    if (j.empty() || !j[0].is_array()) {
        std::vector<double> flat = read_flat(j, pointer);
        if (flat.size() != rows * cols) {
            throw ParseError(pointer, "expected " + std::to_string(rows * cols) + " entries, got " +
                                          std::to_string(flat.size()));
        }
        return Matrix(rows, cols, std::move(flat));
    }
    if (j.size() != rows) {
        throw ParseError(pointer, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
    }
    std::vector<double> flat;
    flat.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string row_ptr = pointer + "/" + std::to_string(r);
        std::vector<double> row = read_flat(j[r], row_ptr);
        if (row.size() != cols) {
            throw ParseError(row_ptr, "expected " + std::to_string(cols) + " columns, got " +
                                          std::to_string(row.size()));
        }
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return Matrix(rows, cols, std::move(flat));
}

json problem_to_json(const QuadraticProblem& p)
{
    return json{{"n", p.dim()}, {"A", p.a().values()}, {"b", p.b().values()}, {"c", p.c()}};
}

QuadraticProblem problem_from_json(const json& doc)
{
    const std::size_t n = read_dim(doc, "n");
    Matrix a = matrix_from_json(require_field(doc, "A"), n, n, "/A");
    Vector b = vector_from_json(require_field(doc, "b"), n, "/b");
    const double c = doc.contains("c") ? read_number(doc["c"], "/c") : 0.0;
    return QuadraticProblem(std::move(a), std::move(b), c);
}

json system_to_json(const ControlSystem& sys)
{
    return json{{"n", sys.state_dim()},        {"m", sys.control_dim()},
                {"A", sys.a().values()},       {"B", sys.input().values()},
                {"b", sys.drift().values()},   {"c", sys.problem().c()}};
}

ControlSystem system_from_json(const json& doc)
{
    const std::size_t m = read_dim(doc, "m");
    const std::size_t n = read_dim(doc, "n");
    Matrix b_in = matrix_from_json(require_field(doc, "B"), n, m, "/B");
    return ControlSystem(problem_from_json(doc), std::move(b_in));
}

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("", path.string() + ": " + e.what());
    }
}

ControlSystem load_system(const std::filesystem::path& path)
{
    return system_from_json(read_json_file(path));
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write " + tmp.string());
        }
        out << text;
        if (!out.flush()) {
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

Vector parse_vector(std::string_view text)
{
    std::string s(text);
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return Vector();
    }
    if (s[first] == '[') {
        json j;
        try {
            j = json::parse(s);
        } catch (const json::parse_error& e) {
            throw ParseError("", std::string("vector: ") + e.what());
        }
        return Vector(read_flat(j, ""));
    }
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw ParseError("", "vector: cannot parse '" + item + "'");
        }
    }
    return Vector(std::move(out));
}

void write_trajectory_csv(const ControlSystem& sys, const Trajectory& traj, std::ostream& out)
{
    out << 't';
    for (std::size_t i = 0; i < sys.state_dim(); ++i) {
        out << ",x_" << i;
    }
    for (std::size_t i = 0; i < sys.control_dim(); ++i) {
        out << ",u_" << i;
    }
    out << ",f_value\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << format_double(traj.times[k]);
        for (double x : traj.states[k]) {
            out << ',' << format_double(x);
        }
        for (double u : traj.controls[k]) {
            out << ',' << format_double(u);
        }
        out << ',' << format_double(eval(sys.problem(), traj.states[k])) << '\n';
    }
}

} // namespace ctrlgrad::io
