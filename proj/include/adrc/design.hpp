#pragma once

#include "adrc/lti.hpp"

namespace adrc {

// Gains for one linear ADRC instance. The observer estimates
//   order 1: [y, f]        order 2: [y, dy/dt, f]
// with f the generalized disturbance.
struct AdrcDesign {
    int order{1};
    double b0{1.0};
    double k_p{0.0};
    double k_d{0.0};    // order 2 only
    double s_cl{0.0};   // closed-loop pole (rad/s)
    double s_eso{0.0};  // common observer pole (rad/s)
    double k_eso{1.0};  // s_eso = k_eso * s_cl
    lti::Matrix l_cont; // continuous observer gain, length order + 1

    std::size_t observer_dim() const noexcept { return static_cast<std::size_t>(order) + 1; }
};

// Current-observer gain placing every eigenvalue of (Ad - Lc*Cd*Ad) at z_eso.
struct DiscreteEsoGains {
    double z_eso{0.0};
    lti::Matrix l_current;
    double sample_time{0.0};
};

// KP = 4 / t_settle, observer poles at k_eso * s_cl, l = [-2 s, s^2].
AdrcDesign design_first_order(double b0, double t_settle, double k_eso);

// KP = s_cl^2, KD = -2 s_cl with s_cl = -6 / t_settle, l = [-3 s, 3 s^2, -s^3].
AdrcDesign design_second_order(double b0, double t_settle, double k_eso);

// Dispatches on order (1 or 2).
AdrcDesign design_adrc(int order, double b0, double t_settle, double k_eso);

// z = exp(s * Ts).
double map_pole_to_z(double s_eso, double sample_time);

DiscreteEsoGains discrete_gains_first(double z_eso, double sample_time);
DiscreteEsoGains discrete_gains_second(double z_eso, double sample_time);

// Maps the design's s_eso to the z-plane and computes the matching current-observer gains.
DiscreteEsoGains design_discrete_gains(const AdrcDesign& design, double sample_time);

// Integrator-chain ESO model: A (shift), B (b0 on the order-th state), C = [1 0 ..].
lti::StateSpaceModel eso_model(const AdrcDesign& design);

// Continuous observer error matrix (A - L C).
lti::Matrix observer_error_matrix(const AdrcDesign& design);

// Discrete current-observer error matrix (Ad - Lc Cd Ad).
lti::Matrix current_observer_error_matrix(const AdrcDesign& design, const DiscreteEsoGains& gains);

} // namespace adrc
