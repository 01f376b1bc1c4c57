#include "adrc/controllers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "adrc/error.hpp"

namespace adrc {

ControllerState make_controller_state(const AdrcDesign& design, std::size_t delay_steps) {
    ControllerState s;
    s.x_hat = lti::Matrix(design.observer_dim(), 1);
    s.u_delay_buffer = DelayLine(delay_steps);
    return s;
}

lti::Matrix eso_derivative(const AdrcDesign& design, const lti::Matrix& x_hat, double u_effective, double y) {
    const std::size_t n = design.observer_dim();
    if (x_hat.rows() != n) throw InvalidInput("observer state has wrong length");
    // Integrator chain with correction L (y - x1); B injects b0 at row `order - 1`.
    const double innovation = y - x_hat[0];
    lti::Matrix dx(n, 1);
    for (std::size_t i = 0; i + 1 < n; ++i) dx[i] = x_hat[i + 1];
    dx[static_cast<std::size_t>(design.order) - 1] += design.b0 * u_effective;
    for (std::size_t i = 0; i < n; ++i) dx[i] += design.l_cont[i] * innovation;
    return dx;
}

double control_law(const AdrcDesign& design, const lti::Matrix& x_hat, double r) {
    if (x_hat.rows() != design.observer_dim()) throw InvalidInput("observer state has wrong length");
    if (design.order == 1) {
        return (design.k_p * (r - x_hat[0]) - x_hat[1]) / design.b0;
    }
    return (design.k_p * (r - x_hat[0]) - design.k_d * x_hat[1] - x_hat[2]) / design.b0;
}

DiscreteEso make_discrete_eso(const AdrcDesign& design, const DiscreteEsoGains& gains) {
    const auto d = lti::zoh_discretize(eso_model(design), gains.sample_time);
    const lti::Matrix lc = gains.l_current * d.c;
    DiscreteEso eso;
    eso.a = d.a - lc * d.a;
    eso.b = d.b - lc * d.b;
    eso.l = gains.l_current;
    eso.sample_time = gains.sample_time;
    return eso;
}

double discrete_adrc_update(ControllerState& state, const AdrcDesign& design, const DiscreteEso& eso,
                            double y_k, double r_k) {
    state.x_hat = eso.a * state.x_hat + eso.b * state.u_prev + eso.l * y_k;
    return control_law(design, state.x_hat, r_k);
}

void commit_output(ControllerState& state, double u_applied) {
    state.u_prev = state.u_delay_buffer.push(u_applied);
}

TransformedEso build_transformed(const AdrcDesign& design, const DiscreteEsoGains& gains) {
    if (design.k_p == 0.0 || (design.order == 2 && design.k_d == 0.0) || design.b0 == 0.0) {
        throw InvalidInput("transformation matrix is singular (KP, KD and b0 must be non-zero)");
    }
    std::array<double, 3> scale{};
    std::size_t n = 0;
    scale[n++] = design.k_p / design.b0;
    if (design.order == 2) scale[n++] = design.k_d / design.b0;
    scale[n++] = 1.0 / design.b0;

    std::array<double, 3> inv_scale{};
    for (std::size_t i = 0; i < n; ++i) inv_scale[i] = 1.0 / scale[i];
    const lti::Matrix t_inv = lti::Matrix::diagonal({scale.data(), n});
    const lti::Matrix t = lti::Matrix::diagonal({inv_scale.data(), n});

    const DiscreteEso eso = make_discrete_eso(design, gains);
    TransformedEso out;
    out.a_t = t_inv * eso.a * t;
    out.b_t = t_inv * eso.b;
    out.l_t = t_inv * eso.l;
    out.t = t;
    out.l_sum = lti::sum(out.l_t);
    out.r_gain = design.k_p / design.b0;
    return out;
}

void optimized_post_step(ControllerState& state, const TransformedEso& t, double u_k, double y_k, double r_next) {
    const lti::Matrix corrected = state.x_hat + t.l_t * y_k;
    state.x_hat = t.a_t * corrected + t.b_t * u_k;
    state.u_precomputed = t.r_gain * r_next - lti::sum(state.x_hat);
}

void optimized_start(ControllerState& state, const TransformedEso& t, double r0) {
    state.x_hat = lti::Matrix(t.a_t.rows(), 1);
    state.u_precomputed = t.r_gain * r0;
}

double pi_update(PiState& state, const PidGains& gains, double e_k, double sample_time) {
    state.integral += 0.5 * sample_time * (e_k + state.e_prev);
    state.e_prev = e_k;
    return gains.k_p * e_k + gains.k_i * state.integral;
}

lti::StateSpaceModel pidt1_realization(const PidGains& gains) {
    if (!(gains.t_1 > 0.0)) throw InvalidInput("PIDT1 requires t_1 > 0");
    const double k = gains.k_i / gains.t_1;
    const double zz = gains.t_z1 * gains.t_z2;
    lti::Matrix a{{0.0, 1.0}, {0.0, -1.0 / gains.t_1}};
    lti::Matrix b = lti::Matrix::column({0.0, 1.0});
    lti::Matrix c{{k, k * (gains.t_z1 + gains.t_z2 - zz / gains.t_1)}};
    lti::Matrix d{{gains.k_i * zz / gains.t_1}};
    return lti::StateSpaceModel(a, b, c, d);
}

Pidt1State make_pidt1_state(const PidGains& gains, double sample_time) {
    auto discrete = lti::zoh_discretize(pidt1_realization(gains), sample_time);
    lti::Matrix x(discrete.states(), 1);
    return Pidt1State{std::move(discrete), x};
}

double pidt1_update(Pidt1State& state, double e_k) {
    const auto& m = state.discrete;
    const double u = (m.c * state.x)[0] + m.d(0, 0) * e_k;
    state.x = m.a * state.x + m.b * e_k;
    return u;
}

double apply_saturation(double u, double limit) {
    return std::clamp(u, -limit, limit);
}

// ----------------------------------------------------------------------------

ContinuousAdrc::ContinuousAdrc(AdrcDesign design, std::size_t eso_delay_steps)
    : design_(std::move(design)), state_(make_controller_state(design_, eso_delay_steps)) {}

double ContinuousAdrc::compute(double r, double /*y*/, double /*r_next*/) {
    return control_law(design_, state_.x_hat, r);
}

void ContinuousAdrc::commit(double u_applied) {
    commit_output(state_, u_applied);
}

lti::Matrix ContinuousAdrc::continuous_derivative(const lti::Matrix& x, double y, double u_applied) const {
    // With observer-side dead time the delayed, step-held output is used instead.
    const double u = state_.u_delay_buffer.length() > 0 ? state_.u_prev : u_applied;
    return eso_derivative(design_, x, u, y);
}

std::optional<double> ContinuousAdrc::continuous_output(const lti::Matrix& x, double r) const {
    return control_law(design_, x, r);
}

DiscreteAdrc::DiscreteAdrc(AdrcDesign design, double sample_time, std::size_t eso_delay_samples)
    : design_(std::move(design)),
      eso_(make_discrete_eso(design_, design_discrete_gains(design_, sample_time))),
      state_(make_controller_state(design_, eso_delay_samples)) {}

double DiscreteAdrc::compute(double r, double y, double /*r_next*/) {
    return discrete_adrc_update(state_, design_, eso_, y, r);
}

void DiscreteAdrc::commit(double u_applied) {
    commit_output(state_, u_applied);
}

OptimizedAdrc::OptimizedAdrc(AdrcDesign design, double sample_time, std::size_t eso_delay_samples)
    : transformed_(build_transformed(design, design_discrete_gains(design, sample_time))),
      state_(make_controller_state(design, eso_delay_samples)),
      sample_time_(sample_time),
      estimate_(design.observer_dim(), 1) {}

void OptimizedAdrc::start(double r0) {
    optimized_start(state_, transformed_, r0);
}

double OptimizedAdrc::compute(double /*r*/, double y, double r_next) {
    const double u = optimized_latency_update(state_, transformed_, y);
    y_last_ = y;
    r_next_ = r_next;
    return u;
}

void OptimizedAdrc::commit(double u_applied) {
    // x~(k) is only materialized for recording; the control path never needs it.
    estimate_ = transformed_.t * (state_.x_hat + transformed_.l_t * y_last_);
    const double u_observer = state_.u_delay_buffer.push(u_applied);
    optimized_post_step(state_, transformed_, u_observer, y_last_, r_next_);
}

PiController::PiController(PidGains gains, double sample_time)
    : gains_(gains), sample_time_(sample_time) {
    if (!(sample_time > 0.0)) throw InvalidInput("PI sample_time must be > 0");
}

double PiController::compute(double r, double y, double /*r_next*/) {
    return pi_update(state_, gains_, r - y, sample_time_);
}

Pidt1Controller::Pidt1Controller(const PidGains& gains, double sample_time)
    : state_(make_pidt1_state(gains, sample_time)), sample_time_(sample_time) {}

double Pidt1Controller::compute(double r, double y, double /*r_next*/) {
    return pidt1_update(state_, r - y);
}

} // namespace adrc
