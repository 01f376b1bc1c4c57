#include "adrc/design.hpp"

#include <cmath>
#include <string>

#include "adrc/error.hpp"

namespace adrc {

namespace {

void check_requirements(double b0, double t_settle, double k_eso) {
    if (!std::isfinite(b0) || b0 == 0.0) throw InvalidInput("b0 must be finite and non-zero");
    if (!std::isfinite(t_settle) || !(t_settle > 0.0)) throw InvalidInput("t_settle must be > 0");
    if (!std::isfinite(k_eso) || !(k_eso >= 1.0)) throw InvalidInput("k_eso must be >= 1");
}

void check_discrete(double z_eso, double sample_time) {
    if (!std::isfinite(z_eso) || !(z_eso >= 0.0) || z_eso > 1.0) {
        throw InvalidInput("z_eso must lie in [0, 1], got " + std::to_string(z_eso));
    }
    if (!std::isfinite(sample_time) || !(sample_time > 0.0)) throw InvalidInput("sample_time must be > 0");
}

} // namespace

AdrcDesign design_first_order(double b0, double t_settle, double k_eso) {
    check_requirements(b0, t_settle, k_eso);
    AdrcDesign d;
    d.order = 1;
    d.b0 = b0;
    d.k_eso = k_eso;
    d.s_cl = -4.0 / t_settle;
    d.k_p = -d.s_cl;
    d.s_eso = k_eso * d.s_cl;
    d.l_cont = lti::Matrix::column({-2.0 * d.s_eso, d.s_eso * d.s_eso});
    return d;
}

AdrcDesign design_second_order(double b0, double t_settle, double k_eso) {
    check_requirements(b0, t_settle, k_eso);
    AdrcDesign d;
    d.order = 2;
    d.b0 = b0;
    d.k_eso = k_eso;
    d.s_cl = -6.0 / t_settle;
    d.k_p = d.s_cl * d.s_cl;
    d.k_d = -2.0 * d.s_cl;
    d.s_eso = k_eso * d.s_cl;
    const double s = d.s_eso;
    d.l_cont = lti::Matrix::column({-3.0 * s, 3.0 * s * s, -s * s * s});
    return d;
}

AdrcDesign design_adrc(int order, double b0, double t_settle, double k_eso) {
    switch (order) {
    case 1:
        return design_first_order(b0, t_settle, k_eso);
    case 2:
        return design_second_order(b0, t_settle, k_eso);
    default:
        throw InvalidInput("ADRC order must be 1 or 2");
    }
}

double map_pole_to_z(double s_eso, double sample_time) {
    if (!(sample_time > 0.0)) throw InvalidInput("sample_time must be > 0");
    return std::exp(s_eso * sample_time);
}

DiscreteEsoGains discrete_gains_first(double z_eso, double sample_time) {
    check_discrete(z_eso, sample_time);
    const double one_minus = 1.0 - z_eso;
    DiscreteEsoGains g;
    g.z_eso = z_eso;
    g.sample_time = sample_time;
    g.l_current = lti::Matrix::column({1.0 - z_eso * z_eso, one_minus * one_minus / sample_time});
    return g;
}

DiscreteEsoGains discrete_gains_second(double z_eso, double sample_time) {
    check_discrete(z_eso, sample_time);
    const double one_minus = 1.0 - z_eso;
    const double ts = sample_time;
    DiscreteEsoGains g;
    g.z_eso = z_eso;
    g.sample_time = sample_time;
    g.l_current = lti::Matrix::column({
        1.0 - z_eso * z_eso * z_eso,
        3.0 / (2.0 * ts) * one_minus * one_minus * (1.0 + z_eso),
        one_minus * one_minus * one_minus / (ts * ts),
    });
    return g;
}

DiscreteEsoGains design_discrete_gains(const AdrcDesign& design, double sample_time) {
    const double z = map_pole_to_z(design.s_eso, sample_time);
    return design.order == 1 ? discrete_gains_first(z, sample_time) : discrete_gains_second(z, sample_time);
}

lti::StateSpaceModel eso_model(const AdrcDesign& design) {
    const std::size_t n = design.observer_dim();
    lti::Matrix a(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
    lti::Matrix b(n, 1);
    b(static_cast<std::size_t>(design.order) - 1, 0) = design.b0;
    lti::Matrix c(1, n);
    c(0, 0) = 1.0;
    return lti::StateSpaceModel(a, b, c, lti::Matrix(1, 1));
}

lti::Matrix observer_error_matrix(const AdrcDesign& design) {
    const auto model = eso_model(design);
    return model.a - design.l_cont * model.c;
}

lti::Matrix current_observer_error_matrix(const AdrcDesign& design, const DiscreteEsoGains& gains) {
    const auto discrete = lti::zoh_discretize(eso_model(design), gains.sample_time);
    return discrete.a - gains.l_current * discrete.c * discrete.a;
}

} // namespace adrc
