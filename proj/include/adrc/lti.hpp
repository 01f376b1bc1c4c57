#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>

namespace adrc::lti {

inline constexpr std::size_t kMaxDim = 4;

// ============================================================================
// Matrix
// ============================================================================
// Dense row-major matrix with fixed stack capacity (kMaxDim x kMaxDim) and
// runtime dimensions. Column vectors are n x 1 matrices.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zero(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n);
    static Matrix column(std::initializer_list<double> values);
    static Matrix column(std::span<const double> values);
    static Matrix row(std::initializer_list<double> values);
    static Matrix ones_row(std::size_t n);
    static Matrix diagonal(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return rows_ * cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * kMaxDim + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * kMaxDim + c]; }

    // Linear indexing, intended for vectors.
    double& operator[](std::size_t i);
    double operator[](std::size_t i) const;

    Matrix transposed() const;
    double trace() const;
    double max_abs() const;
    bool is_finite() const;
    bool is_zero() const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double k);

    friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
    friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
    friend Matrix operator*(Matrix lhs, double k) { return lhs *= k; }
    friend Matrix operator*(double k, Matrix rhs) { return rhs *= k; }
    friend Matrix operator*(const Matrix& lhs, const Matrix& rhs);
    friend bool operator==(const Matrix& lhs, const Matrix& rhs);

private:
    std::size_t rows_{0};
    std::size_t cols_{0};
    std::array<double, kMaxDim * kMaxDim> data_{};
};

// Sum of the entries of a vector.
double sum(const Matrix& v);

// Determinant by closed-form cofactor expansion (n <= 4).
double determinant(const Matrix& m);

// Inverse by Gauss-Jordan elimination with partial pivoting. Returns nullopt
// when the matrix is numerically singular.
std::optional<Matrix> inverse(const Matrix& m);

// ============================================================================
// Polynomial
// ============================================================================
// Real coefficients, highest degree first, degree <= 4.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> coefficients);
    explicit Polynomial(std::span<const double> coefficients);

    std::size_t degree() const noexcept { return count_ == 0 ? 0 : count_ - 1; }
    std::span<const double> coefficients() const noexcept { return {coeffs_.data(), count_}; }
    double operator[](std::size_t i) const { return coeffs_[i]; }

    double evaluate(double s) const;
    // Divides by the leading coefficient.
    Polynomial monic() const;

private:
    std::array<double, kMaxDim + 1> coeffs_{};
    std::size_t count_{0};
};

// (s - root)^degree, expanded.
Polynomial repeated_root(double root, std::size_t degree);

// det(sI - m) for n in {1, 2, 3}, by trace / principal-minor expansion.
Polynomial characteristic_polynomial(const Matrix& m);

// True iff monic(p) equals (s - expected_root)^degree coefficient-wise. A coefficient
// matches when |a - e| <= tol * max(1, |e|).
bool poly_roots_all_equal(const Polynomial& p, double expected_root, double tol);

// ============================================================================
// State space models
// ============================================================================
struct StateSpaceModel {
    Matrix a;
    Matrix b;
    Matrix c;
    Matrix d;
    std::optional<double> sample_time; // set for discrete models

    // Validates dimensions (n <= 4, m <= 2, p <= 1) and sample_time > 0.
    StateSpaceModel(Matrix a, Matrix b, Matrix c, Matrix d,
                    std::optional<double> sample_time = std::nullopt);

    std::size_t states() const noexcept { return a.rows(); }
    std::size_t inputs() const noexcept { return b.cols(); }
    std::size_t outputs() const noexcept { return c.rows(); }
    bool is_discrete() const noexcept { return sample_time.has_value(); }
};

// Zero-order-hold discretization:
//   Ad = I + sum_{i>=1} A^i Ts^i / i!,  Bd = (sum_{i>=1} A^{i-1} Ts^i / i!) B.
// The series stops at an exactly-zero term (nilpotent A) or once the term falls
// below 1e-15 relative to the running sum.
StateSpaceModel zoh_discretize(const StateSpaceModel& model, double sample_time);

} // namespace adrc::lti
