#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "adrc/error.hpp"
#include "adrc/lti.hpp"

using namespace adrc;
using lti::Matrix;

namespace {

bool near(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return (a - b).max_abs() <= tol;
}

// Plain Laplace expansion, independent of the library's determinant.
double det_oracle(const Matrix& m) {
    const std::size_t n = m.rows();
    if (n == 1) return m(0, 0);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        Matrix minor(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = m(r, c);
            }
        }
        acc += ((j % 2 == 0) ? 1.0 : -1.0) * m(0, j) * det_oracle(minor);
    }
    return acc;
}

// Matrix exponential series with a fixed number of terms.
Matrix expm_series(const Matrix& a, double t, int terms) {
    Matrix sum = Matrix::identity(a.rows());
    Matrix term = Matrix::identity(a.rows());
    for (int i = 1; i < terms; ++i) {
        term = term * a * (t / i);
        sum += term;
    }
    return sum;
}

lti::StateSpaceModel chain2(double b0) {
    return {Matrix{{0.0, 1.0}, {0.0, 0.0}}, Matrix::column({b0, 0.0}), Matrix{{1.0, 0.0}}, Matrix(1, 1)};
}

lti::StateSpaceModel chain3(double b0) {
    return {Matrix{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}}, Matrix::column({0.0, b0, 0.0}),
            Matrix{{1.0, 0.0, 0.0}}, Matrix(1, 1)};
}

} // namespace

TEST_CASE("matrix arithmetic basics") {
    const Matrix a{{1.0, 2.0}, {3.0, 4.0}};
    const Matrix b{{0.0, 1.0}, {1.0, 0.0}};
    CHECK(a * b == Matrix{{2.0, 1.0}, {4.0, 3.0}});
    CHECK(a + b == Matrix{{1.0, 3.0}, {4.0, 4.0}});
    CHECK(a.transposed() == Matrix{{1.0, 3.0}, {2.0, 4.0}});
    CHECK(a.trace() == 5.0);
    CHECK(lti::determinant(a) == doctest::Approx(-2.0));
    const auto inv = lti::inverse(a);
    REQUIRE(inv);
    CHECK(near(a * *inv, Matrix::identity(2), 1e-14));
    CHECK_FALSE(lti::inverse(Matrix{{1.0, 2.0}, {2.0, 4.0}}).has_value());
    CHECK(lti::sum(Matrix::column({1.0, 2.0, 3.5})) == 6.5);
}

TEST_CASE("determinant agrees with cofactor oracle up to 4x4") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (std::size_t n = 1; n <= 4; ++n) {
        for (int trial = 0; trial < 200; ++trial) {
            Matrix m(n, n);
            for (std::size_t i = 0; i < n * n; ++i) m(i / n, i % n) = u(rng);
            const double expect = det_oracle(m);
            CHECK(std::abs(lti::determinant(m) - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
        }
    }
}

TEST_CASE("zoh of the first-order observer chain") {
    const auto d = lti::zoh_discretize(chain2(1.0), 0.01);
    CHECK(d.is_discrete());
    CHECK(*d.sample_time == 0.01);
    CHECK(near(d.a, Matrix{{1.0, 0.01}, {0.0, 1.0}}, 1e-15));
    CHECK(near(d.b, Matrix::column({0.01, 0.0}), 1e-15));
    CHECK(d.c == chain2(1.0).c);
}

TEST_CASE("zoh of the second-order observer chain") {
    const auto d = lti::zoh_discretize(chain3(1.0), 0.1);
    CHECK(near(d.a, Matrix{{1.0, 0.1, 0.005}, {0.0, 1.0, 0.1}, {0.0, 0.0, 1.0}}, 1e-15));
    CHECK(near(d.b, Matrix::column({0.005, 0.1, 0.0}), 1e-15));
}

TEST_CASE("zoh of a scalar integrator") {
    const lti::StateSpaceModel m(Matrix{{0.0}}, Matrix{{2.5}}, Matrix{{1.0}}, Matrix(1, 1));
    const auto d = lti::zoh_discretize(m, 0.3);
    CHECK(d.a(0, 0) == 1.0);
    CHECK(d.b(0, 0) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("zoh of nilpotent chains matches a 20-term exponential series") {
    for (double ts : {0.001, 0.01, 0.2, 1.0}) {
        for (const auto& m : {chain2(3.0), chain3(0.5)}) {
            const auto d = lti::zoh_discretize(m, ts);
            CHECK(near(d.a, expm_series(m.a, ts, 20), 1e-14));
        }
    }
}

TEST_CASE("zoh semigroup property on nilpotent chains") {
    for (const auto& m : {chain2(1.0), chain3(2.0)}) {
        const double t1 = 0.013, t2 = 0.037;
        const auto whole = lti::zoh_discretize(m, t1 + t2);
        const auto a1 = lti::zoh_discretize(m, t1).a;
        const auto a2 = lti::zoh_discretize(m, t2).a;
        CHECK(near(whole.a, a1 * a2, 1e-13));
    }
}

TEST_CASE("zoh of a stable first-order lag matches the closed form") {
    // x' = -x / T + u / T  ->  Ad = e^{-Ts/T}, Bd = 1 - e^{-Ts/T}
    for (double t : {0.001, 0.05, 1.0, 20.0}) {
        const lti::StateSpaceModel m(Matrix{{-1.0 / t}}, Matrix{{1.0 / t}}, Matrix{{1.0}}, Matrix(1, 1));
        const double ts = 0.01;
        const auto d = lti::zoh_discretize(m, ts);
        CHECK(d.a(0, 0) == doctest::Approx(std::exp(-ts / t)).epsilon(1e-13));
        CHECK(d.b(0, 0) == doctest::Approx(-std::expm1(-ts / t)).epsilon(1e-12));
    }
}

TEST_CASE("zoh rejects bad input") {
    CHECK_THROWS_AS(lti::zoh_discretize(chain2(1.0), 0.0), InvalidInput);
    CHECK_THROWS_AS(lti::zoh_discretize(chain2(1.0), -1.0), InvalidInput);
    auto bad = chain2(1.0);
    bad.a(0, 1) = NAN;
    CHECK_THROWS_AS(lti::zoh_discretize(bad, 0.1), InvalidInput);
}

TEST_CASE("state space model validation") {
    CHECK_THROWS_AS(lti::StateSpaceModel(Matrix{{1.0, 0.0}}, Matrix{{1.0}}, Matrix{{1.0}}, Matrix(1, 1)),
                    InvalidInput);
    CHECK_THROWS_AS(
        lti::StateSpaceModel(Matrix{{0.0}}, Matrix{{1.0}}, Matrix{{1.0}}, Matrix(1, 1), std::optional<double>(0.0)),
        InvalidInput);
}

TEST_CASE("characteristic polynomial examples") {
    const auto p = lti::characteristic_polynomial(Matrix{{-80.0, 1.0}, {-1600.0, 0.0}});
    REQUIRE(p.degree() == 2);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == doctest::Approx(80.0));
    CHECK(p[2] == doctest::Approx(1600.0));

    const auto id = lti::characteristic_polynomial(Matrix::identity(2));
    CHECK(id[0] == 1.0);
    CHECK(id[1] == -2.0);
    CHECK(id[2] == 1.0);

    const auto z = lti::characteristic_polynomial(Matrix(3, 3));
    REQUIRE(z.degree() == 3);
    CHECK(z[0] == 1.0);
    CHECK(z[1] == 0.0);
    CHECK(z[2] == 0.0);
    CHECK(z[3] == 0.0);
}

TEST_CASE("characteristic polynomial equals det(sI - M) at probe points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
        Matrix m(n, n);
        for (std::size_t i = 0; i < n * n; ++i) m(i / n, i % n) = u(rng);
        const double s = u(rng);
        const double expect = det_oracle(Matrix::identity(n) * s - m);
        const double got = lti::characteristic_polynomial(m).evaluate(s);
        // Scale by the size of the terms involved so cancellation near a root does not dominate.
        double scale = 1.0;
        for (std::size_t i = 0; i < n; ++i) scale *= (std::abs(s) + m.max_abs() * static_cast<double>(n));
        CHECK(std::abs(got - expect) <= 1e-10 * scale);
    }
}

TEST_CASE("poly_roots_all_equal examples") {
    CHECK(lti::poly_roots_all_equal(lti::Polynomial{1.0, 80.0, 1600.0}, -40.0, 1e-9));
    CHECK_FALSE(lti::poly_roots_all_equal(lti::Polynomial{1.0, 80.0, 1599.0}, -40.0, 1e-9));
    CHECK(lti::poly_roots_all_equal(lti::Polynomial{1.0, 36.0, 432.0, 1728.0}, -12.0, 1e-9));
    CHECK(lti::poly_roots_all_equal(lti::Polynomial{2.0, 160.0, 3200.0}, -40.0, 1e-9)); // normalized first
}

TEST_CASE("repeated_root expansion") {
    const auto p = lti::repeated_root(-3.0, 3);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 9.0);
    CHECK(p[2] == 27.0);
    CHECK(p[3] == 27.0);
    CHECK(p.evaluate(-3.0) == 0.0);
}
