#include "ctrlgrad/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "ctrlgrad/errors.hpp"

namespace ctrlgrad {

namespace {

void require_finite(std::span<const double> xs, const char* what)
{
    for (double x : xs) {
        if (!std::isfinite(x)) {
            throw ContractError(std::string(what) + " has a non-finite entry");
        }
    }
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()));
    }
}

void require_square(const Matrix& a, const char* op)
{
    if (!a.is_square()) {
        throw DimensionError(std::string(op) + ": matrix is " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + ", expected square");
    }
}

// Inf-norm (max absolute row sum).
double inf_norm(const Matrix& a)
{
    double best = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c) {
            s += std::abs(a(r, c));
        }
        best = std::max(best, s);
    }
    return best;
}

// Deterministic start vector with no exact symmetry, so it is not orthogonal to
// a coordinate-aligned dominant direction.
Vector power_start(std::size_t n)
{
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = 1.0 + 0.1 * std::sin(static_cast<double>(i) + 1.0);
    }
    const double nv = norm2(v);
    for (auto& x : v) {
        x /= nv;
    }
    return v;
}

constexpr int kMaxPowerIters = 10000;

// Largest eigenvalue of a symmetric PSD operator given by `apply`, via the
// Rayleigh quotient of the power iterate.
template<typename Apply>
double dominant_rayleigh(std::size_t n, Apply apply)
{
    if (n == 0) {
        return 0.0;
    }
    Vector v = power_start(n);
    double estimate = 0.0;
    for (int it = 0; it < kMaxPowerIters; ++it) {
        Vector w = apply(v);
        const double rq = dot(v, w);
        const double nw = norm2(w);
        if (nw == 0.0) {
            return 0.0;
        }
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = w[i] / nw;
        }
        if (it > 0 && std::abs(rq - estimate) <= 1e-15 * std::abs(rq)) {
            return rq;
        }
        estimate = rq;
    }
    return estimate;
}

} // namespace

// ---------------------------------------------------------------------------
// Vector / Matrix

Vector::Vector(std::vector<double> entries) : data_(std::move(entries))
{
    require_finite(data_, "vector");
}

Vector::Vector(std::initializer_list<double> entries) : data_(entries)
{
    require_finite(data_, "vector");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries))
{
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("matrix: expected " + std::to_string(rows_ * cols_) + " entries, got " +
                             std::to_string(data_.size()));
    }
    require_finite(data_, "matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) : rows_(rows.size())
{
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw DimensionError("matrix: ragged row list");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
    require_finite(data_, "matrix");
}

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Matrix Matrix::diagonal(const Vector& d)
{
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        m(i, i) = d[i];
    }
    return m;
}

Matrix Matrix::column(const Vector& v)
{
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        m(i, 0) = v[i];
    }
    return m;
}

Vector Matrix::col(std::size_t c) const
{
    Vector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        v[r] = (*this)(r, c);
    }
    return v;
}

Vector Matrix::row(std::size_t r) const
{
    Vector v(cols_);
    for (std::size_t c = 0; c < cols_; ++c) {
        v[c] = (*this)(r, c);
    }
    return v;
}

void Matrix::set_col(std::size_t c, const Vector& v)
{
    if (v.size() != rows_) {
        throw DimensionError("set_col: length mismatch");
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        (*this)(r, c) = v[r];
    }
}

Matrix operator+(const Matrix& a, const Matrix& b)
{
    require_same_shape(a, b, "matrix +");
    Matrix out = a;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        out.data()[i] += b.data()[i];
    }
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b)
{
    require_same_shape(a, b, "matrix -");
    Matrix out = a;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        out.data()[i] -= b.data()[i];
    }
    return out;
}

Matrix operator*(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows()) {
        throw DimensionError("matrix *: inner dimensions " + std::to_string(a.cols()) + " and " +
                             std::to_string(b.rows()));
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

Matrix operator*(double s, const Matrix& a)
{
    Matrix out = a;
    for (auto* p = out.data(); p != out.data() + out.values().size(); ++p) {
        *p *= s;
    }
    return out;
}

Vector operator*(const Matrix& a, const Vector& x)
{
    if (a.cols() != x.size()) {
        throw DimensionError("matrix-vector *: matrix has " + std::to_string(a.cols()) + " columns, vector has " +
                             std::to_string(x.size()) + " entries");
    }
    Vector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            s += a(i, j) * x[j];
        }
        out[i] = s;
    }
    return out;
}

Vector operator+(const Vector& a, const Vector& b)
{
    if (a.size() != b.size()) {
        throw DimensionError("vector +: length mismatch");
    }
    Vector out = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] += b[i];
    }
    return out;
}

Vector operator-(const Vector& a, const Vector& b)
{
    if (a.size() != b.size()) {
        throw DimensionError("vector -: length mismatch");
    }
    Vector out = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] -= b[i];
    }
    return out;
}

Vector operator*(double s, const Vector& v)
{
    Vector out = v;
    for (auto& x : out) {
        x *= s;
    }
    return out;
}

Vector operator-(const Vector& v)
{
    return -1.0 * v;
}

Matrix transpose(const Matrix& a)
{
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(j, i) = a(i, j);
        }
    }
    return out;
}

Vector transpose_times(const Matrix& a, const Vector& x)
{
    if (a.rows() != x.size()) {
        throw DimensionError("transpose_times: length mismatch");
    }
    Vector out(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out[j] += a(i, j) * xi;
        }
    }
    return out;
}

Matrix hconcat(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows()) {
        throw DimensionError("hconcat: row mismatch");
    }
    Matrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out(r, c) = a(r, c);
        }
        for (std::size_t c = 0; c < b.cols(); ++c) {
            out(r, a.cols() + c) = b(r, c);
        }
    }
    return out;
}

double dot(const Vector& a, const Vector& b)
{
    if (a.size() != b.size()) {
        throw DimensionError("dot: length mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double norm2(const Vector& v)
{
    // Scaled accumulation so that tiny iterates do not underflow to zero.
    double scale = max_abs(v);
    if (scale == 0.0) {
        return 0.0;
    }
    double s = 0.0;
    for (double x : v) {
        const double y = x / scale;
        s += y * y;
    }
    return scale * std::sqrt(s);
}

double max_abs(const Vector& v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

double max_abs(const Matrix& a)
{
    double m = 0.0;
    for (double x : a.values()) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

double frobenius_norm(const Matrix& a)
{
    double s = 0.0;
    for (double x : a.values()) {
        s += x * x;
    }
    return std::sqrt(s);
}

double trace(const Matrix& a)
{
    require_square(a, "trace");
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        s += a(i, i);
    }
    return s;
}

double asymmetry(const Matrix& a)
{
    require_square(a, "asymmetry");
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            m = std::max(m, std::abs(a(i, j) - a(j, i)));
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Matrix functions

Matrix mat_exp(const Matrix& a, double t)
{
    require_square(a, "mat_exp");
    if (!std::isfinite(t)) {
        throw InvalidParameterError("mat_exp: t must be finite");
    }
    const std::size_t n = a.rows();
    Matrix x = t * a;

    // Scale so that ‖X/2^s‖_∞ ≤ 0.5.
    int squarings = 0;
    const double norm = inf_norm(x);
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        x = std::ldexp(1.0, -squarings) * x;
    }

    Matrix result = Matrix::identity(n);
    Matrix term = Matrix::identity(n);
    for (int k = 1; k <= 60; ++k) {
        term = (1.0 / k) * (term * x);
        result = result + term;
        if (max_abs(term) < 1e-18) {
            break;
        }
    }
    for (int i = 0; i < squarings; ++i) {
        result = result * result;
    }
    return result;
}

PolyCoeffs char_poly(const Matrix& a)
{
    require_square(a, "char_poly");
    const std::size_t n = a.rows();
    if (n > 64) {
        throw UnsupportedSizeError("char_poly: n = " + std::to_string(n) + " exceeds the supported maximum of 64");
    }
    PolyCoeffs p;
    p.coefficients.assign(n + 1, 0.0);
    p.coefficients[n] = 1.0;

    // M_k = A·M_{k-1} + c_{n-k+1}·I,  c_{n-k} = -tr(A·M_k)/k
    Matrix m(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        m = a * m;
        const double shift = p.coefficients[n - k + 1];
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) += shift;
        }
        p.coefficients[n - k] = -trace(a * m) / static_cast<double>(k);
    }
    return p;
}

Matrix eval_matrix_poly(const PolyCoeffs& p, const Matrix& a)
{
    require_square(a, "eval_matrix_poly");
    const std::size_t n = a.rows();
    Matrix acc(n, n);
    for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) {
        acc = a * acc;
        for (std::size_t i = 0; i < n; ++i) {
            acc(i, i) += *it;
        }
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Decompositions and solvers

namespace {

// Hestenes one-sided Jacobi for rows >= cols.
Svd jacobi_svd_tall(const Matrix& m)
{
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    Matrix u = m;
    Matrix v = Matrix::identity(cols);
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < cols; ++p) {
            for (std::size_t q = p + 1; q < cols; ++q) {
                double alpha = 0.0;
                double beta = 0.0;
                double gamma = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    const double up = u(i, p);
                    const double uq = u(i, q);
                    alpha += up * up;
                    beta += uq * uq;
                    gamma += up * uq;
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) {
                    continue;
                }
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    const double up = u(i, p);
                    const double uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
                for (std::size_t i = 0; i < cols; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) {
            break;
        }
    }

    Vector sigma(cols);
    for (std::size_t j = 0; j < cols; ++j) {
        sigma[j] = norm2(u.col(j));
    }
    std::vector<std::size_t> order(cols);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

    Svd out{Matrix(rows, cols), Vector(cols), Matrix(cols, cols)};
    for (std::size_t k = 0; k < cols; ++k) {
        const std::size_t j = order[k];
        out.sigma[k] = sigma[j];
        for (std::size_t i = 0; i < rows; ++i) {
            out.u(i, k) = sigma[j] > 0.0 ? u(i, j) / sigma[j] : 0.0;
        }
        for (std::size_t i = 0; i < cols; ++i) {
            out.v(i, k) = v(i, j);
        }
    }
    return out;
}

} // namespace

Svd svd(const Matrix& m)
{
    if (m.rows() >= m.cols()) {
        return jacobi_svd_tall(m);
    }
    Svd t = jacobi_svd_tall(transpose(m));
    return Svd{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

double default_rank_tol(std::size_t rows, std::size_t cols)
{
    return static_cast<double>(std::max<std::size_t>({rows, cols, 1})) * std::numeric_limits<double>::epsilon() *
           1e3;
}

std::size_t numerical_rank(const Matrix& m, double tol_rel)
{
    if (!(tol_rel > 0.0)) {
        throw InvalidParameterError("numerical_rank: tol_rel must be positive");
    }
    if (m.rows() == 0 || m.cols() == 0) {
        return 0;
    }
    const Svd d = svd(m);
    const double smax = d.sigma[0];
    if (smax == 0.0) {
        return 0;
    }
    return static_cast<std::size_t>(
        std::count_if(d.sigma.begin(), d.sigma.end(), [&](double s) { return s > tol_rel * smax; }));
}

Matrix pseudo_inverse(const Matrix& m, double tol_rel)
{
    Matrix out(m.cols(), m.rows());
    if (m.rows() == 0 || m.cols() == 0) {
        return out;
    }
    const Svd d = svd(m);
    const double cutoff = tol_rel * d.sigma[0];
    for (std::size_t k = 0; k < d.sigma.size(); ++k) {
        const double s = d.sigma[k];
        if (s == 0.0 || s <= cutoff) {
            continue;
        }
        for (std::size_t i = 0; i < m.cols(); ++i) {
            const double vik = d.v(i, k) / s;
            for (std::size_t j = 0; j < m.rows(); ++j) {
                out(i, j) += vik * d.u(j, k);
            }
        }
    }
    return out;
}

Vector min_norm_least_squares(const Matrix& m, const Vector& rhs)
{
    if (m.rows() != rhs.size()) {
        throw DimensionError("min_norm_least_squares: matrix has " + std::to_string(m.rows()) +
                             " rows, rhs has " + std::to_string(rhs.size()) + " entries");
    }
    Vector x(m.cols());
    if (m.rows() == 0 || m.cols() == 0) {
        return x;
    }
    const Svd d = svd(m);
    const double cutoff = default_rank_tol(m.rows(), m.cols()) * d.sigma[0];
    for (std::size_t k = 0; k < d.sigma.size(); ++k) {
        const double s = d.sigma[k];
        if (s == 0.0 || s <= cutoff) {
            continue;
        }
        double coef = 0.0;
        for (std::size_t j = 0; j < m.rows(); ++j) {
            coef += d.u(j, k) * rhs[j];
        }
        coef /= s;
        for (std::size_t i = 0; i < m.cols(); ++i) {
            x[i] += coef * d.v(i, k);
        }
    }
    return x;
}

Matrix cholesky(const Matrix& spd)
{
    require_square(spd, "cholesky");
    const std::size_t n = spd.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = spd(j, j);
        for (std::size_t k = 0; k < j; ++k) {
            diag -= l(j, k) * l(j, k);
        }
        if (!(diag > 0.0)) {
            throw ContractError("cholesky: matrix is not positive definite (pivot " + std::to_string(j) + ")");
        }
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = spd(i, j);
            for (std::size_t k = 0; k < j; ++k) {
                s -= l(i, k) * l(j, k);
            }
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

Vector cholesky_solve(const Matrix& lower, const Vector& rhs)
{
    const std::size_t n = lower.rows();
    if (rhs.size() != n) {
        throw DimensionError("cholesky_solve: length mismatch");
    }
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k) {
            s -= lower(i, k) * y[k];
        }
        y[i] = s / lower(i, i);
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) {
            s -= lower(k, ii) * x[k];
        }
        x[ii] = s / lower(ii, ii);
    }
    return x;
}

Vector solve_shifted_spd(const Matrix& a, double gamma, const Vector& rhs)
{
    require_square(a, "solve_shifted_spd");
    if (rhs.size() != a.rows()) {
        throw DimensionError("solve_shifted_spd: rhs length mismatch");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw InvalidParameterError("solve_shifted_spd: gamma must be positive");
    }
    if (asymmetry(a) > 1e-12 * max_abs(a)) {
        throw ContractError("A not symmetric");
    }
    Matrix shifted = gamma * a;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        shifted(i, i) += 1.0;
    }
    return cholesky_solve(cholesky(shifted), rhs);
}

double spectral_norm(const Matrix& m)
{
    if (m.rows() == 0 || m.cols() == 0 || max_abs(m) == 0.0) {
        return 0.0;
    }
    const double sigma2 =
        dominant_rayleigh(m.cols(), [&](const Vector& v) { return transpose_times(m, m * v); });
    return std::sqrt(std::max(sigma2, 0.0));
}

double max_eigenvalue_sym(const Matrix& a)
{
    require_square(a, "max_eigenvalue_sym");
    const double rho = spectral_norm(a);
    if (rho == 0.0) {
        return 0.0;
    }
    // A + ρI is PSD; its dominant eigenvalue is λ_max + ρ.
    return dominant_rayleigh(a.rows(), [&](const Vector& v) { return a * v + rho * v; }) - rho;
}

double min_eigenvalue_sym(const Matrix& a)
{
    require_square(a, "min_eigenvalue_sym");
    const double rho = spectral_norm(a);
    if (rho == 0.0) {
        return 0.0;
    }
    // ρI − A is PSD; its dominant eigenvalue is ρ − λ_min.
    return rho - dominant_rayleigh(a.rows(), [&](const Vector& v) { return rho * v - a * v; });
}

} // namespace ctrlgrad
