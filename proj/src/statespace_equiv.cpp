#include "adrc/statespace_equiv.hpp"

#include <algorithm>
#include <cmath>

#include "adrc/error.hpp"

namespace adrc {

namespace {

void require_square(const lti::Matrix& a) {
    if (!a.is_square() || a.rows() == 0 || a.rows() > lti::kMaxDim) throw InvalidInput("matrix must be square, n <= 4");
}

// p(A) for p = (s - pole)^n, by Horner.
lti::Matrix characteristic_of(const lti::Matrix& a, double pole) {
    const std::size_t n = a.rows();
    const lti::Polynomial p = lti::repeated_root(pole, n);
    lti::Matrix acc = lti::Matrix::identity(n) * p[0];
    for (std::size_t i = 1; i <= n; ++i) acc = acc * a + lti::Matrix::identity(n) * p[i];
    return acc;
}

double relative_deviation(double actual, double expected) {
    return std::abs(actual - expected) / std::max(1.0, std::abs(expected));
}

} // namespace

AugmentedDesign augmented_plant(int order, double b0, double time_constant) {
    if (order != 1 && order != 2) throw InvalidInput("order must be 1 or 2");
    if (!std::isfinite(b0) || b0 == 0.0) throw InvalidInput("b0 must be finite and non-zero");
    if (!(time_constant > 0.0)) throw InvalidInput("time constant must be > 0");
    AugmentedDesign d;
    d.order = order;
    d.b0 = b0;
    const double scale = order == 1 ? time_constant : time_constant * time_constant;
    if (order == 1) {
        d.a = lti::Matrix{{0.0}};
        d.b = lti::Matrix{{b0}};
        d.c = lti::Matrix{{1.0}};
        d.e = lti::Matrix{{1.0 / scale}};
    } else {
        d.a = lti::Matrix{{0.0, 1.0}, {0.0, 0.0}};
        d.b = lti::Matrix::column({0.0, b0});
        d.c = lti::Matrix{{1.0, 0.0}};
        d.e = lti::Matrix::column({0.0, 1.0 / scale});
    }
    d.a_dist = lti::Matrix{{0.0}};
    d.c_dist = lti::Matrix{{scale}};
    return d;
}

lti::Matrix augmented_a(const AugmentedDesign& d) {
    const std::size_t n = d.a.rows();
    lti::Matrix out(n + 1, n + 1);
    const lti::Matrix coupling = d.e * d.c_dist;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out(i, j) = d.a(i, j);
        out(i, n) = coupling[i];
    }
    out(n, n) = d.a_dist(0, 0);
    return out;
}

lti::Matrix augmented_b(const AugmentedDesign& d) {
    const std::size_t n = d.a.rows();
    lti::Matrix out(n + 1, 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = d.b[i];
    return out;
}

lti::Matrix augmented_c(const AugmentedDesign& d) {
    const std::size_t n = d.a.rows();
    lti::Matrix out(1, n + 1);
    for (std::size_t i = 0; i < n; ++i) out(0, i) = d.c(0, i);
    return out;
}

lti::Matrix design_feedback(const lti::Matrix& a, const lti::Matrix& b, double pole) {
    require_square(a);
    const std::size_t n = a.rows();
    if (b.rows() != n || b.cols() != 1) throw InvalidInput("B must be n x 1");
    lti::Matrix ctrb(n, n);
    lti::Matrix col = b;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) ctrb(i, j) = col[i];
        col = a * col;
    }
    const auto inv = lti::inverse(ctrb);
    if (!inv) throw InvalidInput("(A, B) is not controllable");
    lti::Matrix last(1, n);
    last(0, n - 1) = 1.0;
    return last * *inv * characteristic_of(a, pole);
}

lti::Matrix place_observer(const lti::Matrix& a, const lti::Matrix& c, double pole) {
    require_square(a);
    if (c.rows() != 1 || c.cols() != a.rows()) throw InvalidInput("C must be 1 x n");
    return design_feedback(a.transposed(), c.transposed(), pole).transposed();
}

double gain_compensation(const lti::Matrix& a, const lti::Matrix& b, const lti::Matrix& c, const lti::Matrix& k) {
    const auto inv = lti::inverse(a - b * k);
    if (!inv) throw InvalidInput("A - B K is singular");
    const double dc = (c * *inv * b)[0];
    if (dc == 0.0 || !std::isfinite(dc)) throw InvalidInput("closed loop has zero DC gain");
    return -1.0 / dc;
}

DisturbanceGain disturbance_gain(const lti::Matrix& b, const lti::Matrix& e, const lti::Matrix& c_dist) {
    const lti::Matrix target = e * c_dist;
    if (target.rows() != b.rows() || b.cols() != 1 || target.cols() != 1) {
        throw InvalidInput("B and E C_dist must be n x 1");
    }
    const double btb = (b.transposed() * b)[0];
    if (btb == 0.0) return {0.0, false, target.max_abs()};
    DisturbanceGain out;
    out.k_d = (b.transposed() * target)[0] / btb;
    out.residual = (b * out.k_d - target).max_abs();
    out.feasible = out.residual <= 1e-12 * std::max(1.0, target.max_abs());
    return out;
}

AugmentedDesign design_augmented(int order, double b0, double s_cl, double s_eso, double time_constant) {
    AugmentedDesign d = augmented_plant(order, b0, time_constant);
    d.k_fb = design_feedback(d.a, d.b, s_cl);
    d.g = gain_compensation(d.a, d.b, d.c, d.k_fb);
    d.k_d = disturbance_gain(d.b, d.e, d.c_dist).k_d;
    d.l_aug = place_observer(augmented_a(d), augmented_c(d), s_eso);
    return d;
}

EquivalenceReport verify_equivalence(const AdrcDesign& design, double tol) {
    const AugmentedDesign ss = design_augmented(design.order, design.b0, design.s_cl, design.s_eso);
    EquivalenceReport report;
    auto check = [&](std::string name, double expected, double actual) {
        EquivalenceCheck c{std::move(name), expected, actual, relative_deviation(actual, expected), false};
        c.pass = std::isfinite(c.deviation) && c.deviation < tol;
        report.max_deviation = std::max(report.max_deviation, c.deviation);
        report.pass = report.pass && c.pass;
        report.checks.push_back(std::move(c));
    };

    check("K1 = KP/b0", design.k_p / design.b0, ss.k_fb(0, 0));
    if (design.order == 2) check("K2 = KD/b0", design.k_d / design.b0, ss.k_fb(0, 1));
    check("G = K1", ss.k_fb(0, 0), ss.g);
    check("Kd = 1/b0", 1.0 / design.b0, ss.k_d);
    for (std::size_t i = 0; i < design.observer_dim(); ++i) {
        check("l" + std::to_string(i + 1), design.l_cont[i], ss.l_aug[i]);
    }
    return report;
}

PredictionObserver make_prediction_observer(const AdrcDesign& design, const DiscreteEsoGains& gains) {
    const auto d = lti::zoh_discretize(eso_model(design), gains.sample_time);
    PredictionObserver p;
    p.l = d.a * gains.l_current;
    p.a = d.a - p.l * d.c;
    p.b = d.b;
    return p;
}

} // namespace adrc
