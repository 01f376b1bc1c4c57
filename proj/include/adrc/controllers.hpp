#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "adrc/design.hpp"
#include "adrc/lti.hpp"

namespace adrc {

// Fixed-length FIFO. push() returns the value pushed `length` calls earlier
// (zero until the line has filled); a zero-length line passes values through.
class DelayLine {
public:
    explicit DelayLine(std::size_t length = 0) : buffer_(length, 0.0) {}

    double push(double value) {
        if (buffer_.empty()) return value;
        const double out = buffer_[head_];
        buffer_[head_] = value;
        head_ = (head_ + 1) % buffer_.size();
        return out;
    }

    std::size_t length() const noexcept { return buffer_.size(); }

private:
    std::vector<double> buffer_;
    std::size_t head_{0};
};

// Runtime state of one ADRC instance.
struct ControllerState {
    lti::Matrix x_hat;         // observer estimate; last entry is the disturbance estimate
    double u_prev{0.0};        // u(k-1) as seen by the observer (post-saturation, delayed)
    double u_precomputed{0.0}; // u(k|k-1), latency-optimized form only
    DelayLine u_delay_buffer;  // observer-side dead-time compensation
};

// Zero observer state, delay buffer of `delay_steps` samples.
ControllerState make_controller_state(const AdrcDesign& design, std::size_t delay_steps = 0);

// ----------------------------------------------------------------------------
// Continuous-time ADRC
// ----------------------------------------------------------------------------

// d/dt x_hat = (A - L C) x_hat + B u_effective + L y
lti::Matrix eso_derivative(const AdrcDesign& design, const lti::Matrix& x_hat, double u_effective, double y);

// order 1: (KP (r - x1) - x2) / b0
// order 2: (KP (r - x1) - KD x2 - x3) / b0
double control_law(const AdrcDesign& design, const lti::Matrix& x_hat, double r);

// ----------------------------------------------------------------------------
// Discrete-time ADRC (current observer)
// ----------------------------------------------------------------------------

// x_hat(k) = a * x_hat(k-1) + b * u(k-1) + l * y(k)
struct DiscreteEso {
    lti::Matrix a; // Ad - Lc Cd Ad
    lti::Matrix b; // Bd - Lc Cd Bd
    lti::Matrix l; // Lc
    double sample_time{0.0};
};

DiscreteEso make_discrete_eso(const AdrcDesign& design, const DiscreteEsoGains& gains);

// Observer correction with y(k), then the control law. Returns the raw u(k);
// the caller saturates it and reports the applied value via commit_output().
double discrete_adrc_update(ControllerState& state, const AdrcDesign& design, const DiscreteEso& eso,
                            double y_k, double r_k);

// Feeds the applied output through the observer delay buffer into u_prev.
void commit_output(ControllerState& state, double u_applied);

// ----------------------------------------------------------------------------
// Latency-optimized discrete ADRC
// ----------------------------------------------------------------------------
// Observer in scaled coordinates x~ = T^-1 x_hat with
//   T^-1 = diag(KP, 1) / b0  or  diag(KP, KD, 1) / b0,
// so that u(k) = (KP/b0) r(k) - sum(x~(k)).
struct TransformedEso {
    lti::Matrix a_t;   // T^-1 A_eso T
    lti::Matrix b_t;   // T^-1 B_eso
    lti::Matrix l_t;   // T^-1 L_eso
    lti::Matrix t;     // back-transformation x_hat = T x~
    double l_sum{0.0}; // sum of l_t
    double r_gain{0.0}; // KP / b0
};

TransformedEso build_transformed(const AdrcDesign& design, const DiscreteEsoGains& gains);

// The only arithmetic between measurement and output: one multiply, one subtract.
template <class Real>
constexpr Real latency_output(Real u_precomputed, Real l_sum, Real y) {
    return u_precomputed - l_sum * y;
}

// u(k) = u(k|k-1) - l_sum * y(k). state.x_hat holds x~(k|k-1).
inline double optimized_latency_update(const ControllerState& state, const TransformedEso& t, double y_k) {
    return latency_output(state.u_precomputed, t.l_sum, y_k);
}

// x~(k+1|k) = A~ (x~(k|k-1) + L~ y(k)) + B~ u(k)
// u(k+1|k)  = (KP/b0) r(k+1|k) - sum(x~(k+1|k))
void optimized_post_step(ControllerState& state, const TransformedEso& t, double u_k, double y_k, double r_next);

// Zero observer state and u(0|-1) = (KP/b0) r(0).
void optimized_start(ControllerState& state, const TransformedEso& t, double r0);

// ----------------------------------------------------------------------------
// PI / PIDT1 baselines
// ----------------------------------------------------------------------------
enum class PidForm { pi, pidt1 };

// PI:    C(s) = KP + KI / s
// PIDT1: C(s) = KI (1 + Tz1 s)(1 + Tz2 s) / (s (1 + T1 s))
struct PidGains {
    double k_p{0.0};
    double k_i{0.0};
    double t_z1{0.0};
    double t_z2{0.0};
    double t_1{0.0};
    PidForm form{PidForm::pi};
};

struct PiState {
    double integral{0.0};
    double e_prev{0.0};
};

// u = KP e + KI * integral(e), trapezoidal integration.
double pi_update(PiState& state, const PidGains& gains, double e_k, double sample_time);

// Controllable-canonical realization of the PIDT1 transfer function (input e, output u).
lti::StateSpaceModel pidt1_realization(const PidGains& gains);

struct Pidt1State {
    lti::StateSpaceModel discrete;
    lti::Matrix x;
};

// ZOH-discretized realization with zero initial state.
Pidt1State make_pidt1_state(const PidGains& gains, double sample_time);

double pidt1_update(Pidt1State& state, double e_k);

// Clamp to [-limit, +limit].
double apply_saturation(double u, double limit);

// ----------------------------------------------------------------------------
// Uniform sample-by-sample interface used by the simulator
// ----------------------------------------------------------------------------
class Controller {
public:
    virtual ~Controller() = default;

    // Seconds between samples; 0 means "every simulation step".
    virtual double sample_time() const = 0;

    // Called once before the first sample.
    virtual void start(double /*r0*/) {}

    // Raw output at a sample instant. r_next is r(k+1|k).
    virtual double compute(double r, double y, double r_next) = 0;

    // Output actually applied for the sample just computed (after saturation).
    virtual void commit(double u_applied) = 0;

    // Continuous-time internal states integrated by the simulator alongside the plant.
    virtual std::size_t continuous_dim() const { return 0; }
    virtual lti::Matrix continuous_state() const { return {}; }
    virtual void set_continuous_state(const lti::Matrix& /*x*/) {}
    // u_applied is the output the plant sees at this integration stage.
    virtual lti::Matrix continuous_derivative(const lti::Matrix& /*x*/, double /*y*/, double /*u_applied*/) const {
        return {};
    }
    // Output as an algebraic function of the continuous state, re-evaluated at every
    // integration stage. Empty for sampled controllers, whose output is held.
    virtual std::optional<double> continuous_output(const lti::Matrix& /*x*/, double /*r*/) const { return {}; }

    // Observer estimate in original coordinates, for recording (empty if none).
    virtual lti::Matrix observer_estimate() const { return {}; }
};

class ContinuousAdrc final : public Controller {
public:
    ContinuousAdrc(AdrcDesign design, std::size_t eso_delay_steps);

    double sample_time() const override { return 0.0; }
    double compute(double r, double y, double r_next) override;
    void commit(double u_applied) override;
    std::size_t continuous_dim() const override { return design_.observer_dim(); }
    lti::Matrix continuous_state() const override { return state_.x_hat; }
    void set_continuous_state(const lti::Matrix& x) override { state_.x_hat = x; }
    lti::Matrix continuous_derivative(const lti::Matrix& x, double y, double u_applied) const override;
    std::optional<double> continuous_output(const lti::Matrix& x, double r) const override;
    lti::Matrix observer_estimate() const override { return state_.x_hat; }

private:
    AdrcDesign design_;
    ControllerState state_;
};

class DiscreteAdrc final : public Controller {
public:
    DiscreteAdrc(AdrcDesign design, double sample_time, std::size_t eso_delay_samples);

    double sample_time() const override { return eso_.sample_time; }
    double compute(double r, double y, double r_next) override;
    void commit(double u_applied) override;
    lti::Matrix observer_estimate() const override { return state_.x_hat; }

private:
    AdrcDesign design_;
    DiscreteEso eso_;
    ControllerState state_;
};

class OptimizedAdrc final : public Controller {
public:
    OptimizedAdrc(AdrcDesign design, double sample_time, std::size_t eso_delay_samples);

    double sample_time() const override { return sample_time_; }
    void start(double r0) override;
    double compute(double r, double y, double r_next) override;
    void commit(double u_applied) override;
    lti::Matrix observer_estimate() const override { return estimate_; }

private:
    TransformedEso transformed_;
    ControllerState state_;
    double sample_time_;
    double y_last_{0.0};
    double r_next_{0.0};
    lti::Matrix estimate_;
};

class PiController final : public Controller {
public:
    PiController(PidGains gains, double sample_time);

    double sample_time() const override { return sample_time_; }
    double compute(double r, double y, double r_next) override;
    void commit(double) override {}

private:
    PidGains gains_;
    PiState state_;
    double sample_time_;
};

class Pidt1Controller final : public Controller {
public:
    Pidt1Controller(const PidGains& gains, double sample_time);

    double sample_time() const override { return sample_time_; }
    double compute(double r, double y, double r_next) override;
    void commit(double) override {}

private:
    Pidt1State state_;
    double sample_time_;
};

} // namespace adrc
