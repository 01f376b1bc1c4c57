#include "adrc/lti.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <string>

#include "adrc/error.hpp"

namespace adrc::lti {

namespace {

void check_dims(std::size_t rows, std::size_t cols) {
    if (rows > kMaxDim || cols > kMaxDim) {
        throw InvalidInput("matrix dimension exceeds " + std::to_string(kMaxDim));
    }
}

void require_finite(const Matrix& m, const char* name) {
    if (!m.is_finite()) {
        throw InvalidInput(std::string("non-finite entries in ") + name);
    }
}

double inf_norm(const Matrix& m) {
    double best = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double row = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) row += std::abs(m(r, c));
        best = std::max(best, row);
    }
    return best;
}

bool is_nilpotent(const Matrix& a) {
    Matrix p = a;
    for (std::size_t i = 1; i < a.rows(); ++i) p = p * a;
    return p.is_zero();
}

// Ad and Gamma = int_0^ts exp(A t) dt by direct series summation.
std::pair<Matrix, Matrix> zoh_series(const Matrix& a, double ts) {
    constexpr int kMaxTerms = 60;
    const std::size_t n = a.rows();
    Matrix ad = Matrix::identity(n);
    Matrix gamma = Matrix::identity(n) * ts;
    // term_i = A^i ts^i / i!; gamma term = A^i ts^(i+1) / (i+1)!
    Matrix term = Matrix::identity(n);
    for (int i = 1; i <= kMaxTerms; ++i) {
        term = term * a * (ts / i);
        if (term.is_zero()) break;
        ad += term;
        const Matrix gterm = term * (ts / (i + 1));
        gamma += gterm;
        if (term.max_abs() <= 1e-15 * ad.max_abs() && gterm.max_abs() <= 1e-15 * gamma.max_abs()) {
            break;
        }
    }
    return {ad, gamma};
}

} // namespace

// ----------------------------------------------------------------------------
// Matrix
// ----------------------------------------------------------------------------

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    check_dims(rows, cols);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    check_dims(rows_, cols_);
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != cols_) throw InvalidInput("ragged matrix initializer");
        std::size_t c = 0;
        for (double v : row) (*this)(r, c++) = v;
        ++r;
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::column(std::initializer_list<double> values) {
    return column(std::span<const double>(values.begin(), values.size()));
}

Matrix Matrix::column(std::span<const double> values) {
    Matrix m(values.size(), 1);
    for (std::size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
    return m;
}

Matrix Matrix::row(std::initializer_list<double> values) {
    Matrix m(1, values.size());
    std::size_t i = 0;
    for (double v : values) m(0, i++) = v;
    return m;
}

Matrix Matrix::ones_row(std::size_t n) {
    Matrix m(1, n);
    for (std::size_t i = 0; i < n; ++i) m(0, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
    Matrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

double& Matrix::operator[](std::size_t i) {
    return cols_ == 1 ? (*this)(i, 0) : (*this)(i / cols_, i % cols_);
}

double Matrix::operator[](std::size_t i) const {
    return cols_ == 1 ? (*this)(i, 0) : (*this)(i / cols_, i % cols_);
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

double Matrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m = std::max(m, std::abs((*this)(r, c)));
    return m;
}

bool Matrix::is_finite() const {
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (!std::isfinite((*this)(r, c))) return false;
    return true;
}

bool Matrix::is_zero() const {
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if ((*this)(r, c) != 0.0) return false;
    return true;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw InvalidInput("dimension mismatch in +");
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) += rhs(r, c);
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw InvalidInput("dimension mismatch in -");
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) -= rhs(r, c);
    return *this;
}

Matrix& Matrix::operator*=(double k) {
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) *= k;
    return *this;
}

Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.cols_ != rhs.rows_) throw InvalidInput("dimension mismatch in *");
    Matrix out(lhs.rows_, rhs.cols_);
    for (std::size_t r = 0; r < lhs.rows_; ++r)
        for (std::size_t c = 0; c < rhs.cols_; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < lhs.cols_; ++k) acc += lhs(r, k) * rhs(k, c);
            out(r, c) = acc;
        }
    return out;
}

bool operator==(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.rows_ != rhs.rows_ || lhs.cols_ != rhs.cols_) return false;
    for (std::size_t r = 0; r < lhs.rows_; ++r)
        for (std::size_t c = 0; c < lhs.cols_; ++c)
            if (lhs(r, c) != rhs(r, c)) return false;
    return true;
}

double sum(const Matrix& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i];
    return s;
}

double determinant(const Matrix& m) {
    if (!m.is_square()) throw InvalidInput("determinant of non-square matrix");
    switch (m.rows()) {
    case 0:
        return 1.0;
    case 1:
        return m(0, 0);
    case 2:
        return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
             - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
             + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default: {
        // Laplace expansion along the first row into 3x3 minors.
        double det = 0.0;
        for (std::size_t j = 0; j < 4; ++j) {
            Matrix minor(3, 3);
            for (std::size_t r = 1; r < 4; ++r) {
                std::size_t mc = 0;
                for (std::size_t c = 0; c < 4; ++c) {
                    if (c == j) continue;
                    minor(r - 1, mc++) = m(r, c);
                }
            }
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            det += sign * m(0, j) * determinant(minor);
        }
        return det;
    }
    }
}

std::optional<Matrix> inverse(const Matrix& m) {
    if (!m.is_square()) throw InvalidInput("inverse of non-square matrix");
    require_finite(m, "inverse argument");
    const std::size_t n = m.rows();
    Matrix work = m;
    Matrix inv = Matrix::identity(n);
    const double scale = std::max(m.max_abs(), 1e-300);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
        if (std::abs(work(pivot, col)) <= 1e-14 * scale) return std::nullopt;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(work(pivot, c), work(col, c));
                std::swap(inv(pivot, c), inv(col, c));
            }
        }
        const double p = work(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            work(col, c) /= p;
            inv(col, c) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = work(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                work(r, c) -= f * work(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

// ----------------------------------------------------------------------------
// Polynomial
// ----------------------------------------------------------------------------

Polynomial::Polynomial(std::initializer_list<double> coefficients)
    : Polynomial(std::span<const double>(coefficients.begin(), coefficients.size())) {}

Polynomial::Polynomial(std::span<const double> coefficients) {
    if (coefficients.size() > kMaxDim + 1) throw InvalidInput("polynomial degree exceeds 4");
    std::copy(coefficients.begin(), coefficients.end(), coeffs_.begin());
    count_ = coefficients.size();
}

double Polynomial::evaluate(double s) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < count_; ++i) acc = acc * s + coeffs_[i];
    return acc;
}

Polynomial Polynomial::monic() const {
    if (count_ == 0 || coeffs_[0] == 0.0) throw InvalidInput("cannot normalize: zero leading coefficient");
    Polynomial out = *this;
    for (std::size_t i = 0; i < count_; ++i) out.coeffs_[i] = coeffs_[i] / coeffs_[0];
    return out;
}

Polynomial repeated_root(double root, std::size_t degree) {
    if (degree > kMaxDim) throw InvalidInput("polynomial degree exceeds 4");
    std::array<double, kMaxDim + 1> c{};
    c[0] = 1.0;
    // multiply by (s - root) degree times
    for (std::size_t k = 1; k <= degree; ++k) {
        for (std::size_t i = k; i > 0; --i) c[i] -= root * c[i - 1];
    }
    return Polynomial(std::span<const double>(c.data(), degree + 1));
}

Polynomial characteristic_polynomial(const Matrix& m) {
    if (!m.is_square() || m.rows() < 1 || m.rows() > 3) {
        throw InvalidInput("characteristic_polynomial requires a square matrix with n in {1,2,3}");
    }
    require_finite(m, "characteristic_polynomial argument");
    const double tr = m.trace();
    switch (m.rows()) {
    case 1:
        return {1.0, -m(0, 0)};
    case 2:
        return {1.0, -tr, determinant(m)};
    default: {
        const double minors = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0))
                            + (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0))
                            + (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1));
        return {1.0, -tr, minors, -determinant(m)};
    }
    }
}

bool poly_roots_all_equal(const Polynomial& p, double expected_root, double tol) {
    if (p.coefficients().empty() || p[0] == 0.0) return false;
    const Polynomial q = p.monic();
    const Polynomial expected = repeated_root(expected_root, p.degree());
    for (std::size_t i = 0; i <= p.degree(); ++i) {
        const double e = expected[i];
        if (!(std::abs(q[i] - e) <= tol * std::max(1.0, std::abs(e)))) return false;
    }
    return true;
}

// ----------------------------------------------------------------------------
// State space
// ----------------------------------------------------------------------------

StateSpaceModel::StateSpaceModel(Matrix a_, Matrix b_, Matrix c_, Matrix d_,
                                 std::optional<double> sample_time_)
    : a(a_), b(b_), c(c_), d(d_), sample_time(sample_time_) {
    const std::size_t n = a.rows();
    if (!a.is_square() || n == 0) throw InvalidInput("state matrix must be square and non-empty");
    if (b.rows() != n || c.cols() != n) throw InvalidInput("B/C dimensions inconsistent with A");
    if (d.rows() != c.rows() || d.cols() != b.cols()) throw InvalidInput("D dimensions inconsistent");
    if (b.cols() > 2) throw InvalidInput("at most two inputs are supported");
    if (c.rows() > 1) throw InvalidInput("at most one output is supported");
    if (sample_time && !(*sample_time > 0.0)) throw InvalidInput("discrete model needs sample_time > 0");
}

StateSpaceModel zoh_discretize(const StateSpaceModel& model, double sample_time) {
    if (model.is_discrete()) throw InvalidInput("zoh_discretize expects a continuous model");
    if (!(sample_time > 0.0) || !std::isfinite(sample_time)) throw InvalidInput("sample_time must be > 0");
    require_finite(model.a, "A");
    require_finite(model.b, "B");
    require_finite(model.c, "C");
    require_finite(model.d, "D");

    Matrix ad;
    Matrix gamma;
    if (is_nilpotent(model.a)) {
        std::tie(ad, gamma) = zoh_series(model.a, sample_time);
    } else {
        // Scaling and squaring keeps the series well conditioned:
        // Ad(2t) = Ad(t)^2, Gamma(2t) = Gamma(t) + Ad(t) Gamma(t).
        int squarings = 0;
        const double norm = inf_norm(model.a) * sample_time;
        if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        std::tie(ad, gamma) = zoh_series(model.a, std::ldexp(sample_time, -squarings));
        for (int i = 0; i < squarings; ++i) {
            gamma = gamma + ad * gamma;
            ad = ad * ad;
        }
    }
    return StateSpaceModel(ad, gamma * model.b, model.c, model.d, sample_time);
}

} // namespace adrc::lti
