#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace ctrlgrad {

/// Dense real vector.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
    /// Throws ContractError if any entry is not finite.
    explicit Vector(std::vector<double> entries);
    Vector(std::initializer_list<double> entries);

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }
    std::span<const double> span() const noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    bool operator==(const Vector&) const = default;

private:
    std::vector<double> data_;
};

/// Dense row-major real matrix. Zero-sized dimensions are allowed so that an
/// n×0 input matrix can represent "no control channels".
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    /// Row-major entries; throws DimensionError on length mismatch and
    /// ContractError on non-finite entries.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
    /// Nested row lists, e.g. {{1, 2}, {3, 4}}.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);
    static Matrix column(const Vector& v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    const double* data() const noexcept { return data_.data(); }
    double* data() noexcept { return data_.data(); }
    const std::vector<double>& values() const noexcept { return data_; }

    Vector col(std::size_t c) const;
    Vector row(std::size_t r) const;
    void set_col(std::size_t c, const Vector& v);

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Arithmetic. All throw DimensionError on shape mismatch.
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vector operator*(const Matrix& a, const Vector& x);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& v);
Vector operator-(const Vector& v);

Matrix transpose(const Matrix& a);
/// aᵀx without forming the transpose.
Vector transpose_times(const Matrix& a, const Vector& x);
/// [a | b]
Matrix hconcat(const Matrix& a, const Matrix& b);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double max_abs(const Vector& v);
double max_abs(const Matrix& m);
double frobenius_norm(const Matrix& m);
double trace(const Matrix& m);
/// max_ij |a_ij - a_ji|
double asymmetry(const Matrix& a);

/// Monic polynomial coefficients, lowest degree first: P(λ) = Σ c_i λ^i.
struct PolyCoeffs {
    std::vector<double> coefficients;

    std::size_t degree() const noexcept { return coefficients.empty() ? 0 : coefficients.size() - 1; }
};

/// Thin singular value decomposition M = U·diag(sigma)·Vᵀ with sigma sorted
/// in descending order. For an r×c input, U is r×k, V is c×k, k = min(r, c).
struct Svd {
    Matrix u;
    Vector sigma;
    Matrix v;
};

/// e^{tA} by scaling and squaring with a truncated Taylor series.
Matrix mat_exp(const Matrix& a, double t = 1.0);

/// det(λI − A) via the Faddeev–LeVerrier recurrence. Rejects n > 64.
PolyCoeffs char_poly(const Matrix& a);

/// P(A) = Σ c_i A^i by Horner's scheme.
Matrix eval_matrix_poly(const PolyCoeffs& p, const Matrix& a);

/// One-sided Jacobi SVD.
Svd svd(const Matrix& m);

/// Default relative rank tolerance for an r×c matrix: max(r, c)·ε·1e3.
double default_rank_tol(std::size_t rows, std::size_t cols);

/// Number of singular values above tol_rel·σ_max.
std::size_t numerical_rank(const Matrix& m, double tol_rel);

/// Moore–Penrose pseudo-inverse, singular values below tol_rel·σ_max dropped.
Matrix pseudo_inverse(const Matrix& m, double tol_rel);

/// Minimum-norm minimizer of ‖Mx − rhs‖.
Vector min_norm_least_squares(const Matrix& m, const Vector& rhs);

/// Cholesky factor L (lower) of an SPD matrix; throws ContractError if a
/// pivot is not positive.
Matrix cholesky(const Matrix& spd);

/// Solves L·Lᵀx = rhs for a Cholesky factor L.
Vector cholesky_solve(const Matrix& lower, const Vector& rhs);

/// Solves (I + γA)x = rhs for symmetric PSD A and γ > 0.
Vector solve_shifted_spd(const Matrix& a, double gamma, const Vector& rhs);

/// Largest singular value by power iteration on MᵀM.
double spectral_norm(const Matrix& m);

/// Symmetric matrices only: largest and smallest eigenvalue estimates by power
/// iteration (the smallest via the shifted matrix σI − A).
double max_eigenvalue_sym(const Matrix& a);
double min_eigenvalue_sym(const Matrix& a);

} // namespace ctrlgrad
