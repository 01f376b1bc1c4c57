#pragma once

#include <string>
#include <vector>

#include "adrc/design.hpp"
#include "adrc/lti.hpp"

namespace adrc {

// ============================================================================
// State-space design with disturbance estimation
// ============================================================================
//   x' = A x + B u + E d,   d = C_dist xi,   xi' = A_dist xi  (constant: A_dist = 0)
//   u  = G r - K x_hat - K_d xi_hat
// The plant is the integrator chain of a first- (n = 1) or second-order (n = 2)
// ADRC loop; the disturbance enters the last state.
struct AugmentedDesign {
    int order{1};
    double b0{1.0};
    lti::Matrix a;      // n x n
    lti::Matrix b;      // n x 1
    lti::Matrix c;      // 1 x n
    lti::Matrix e;      // n x 1
    lti::Matrix a_dist; // 1 x 1, disturbance generator
    lti::Matrix c_dist; // 1 x 1
    lti::Matrix k_fb;   // 1 x n
    double k_d{0.0};
    double g{0.0};
    lti::Matrix l_aug;  // (n + 1) x 1
};

// Integrator chain with disturbance input scaled by 1/T^n and generator output T^n,
// so that E * C_dist hits the last state with unit weight.
AugmentedDesign augmented_plant(int order, double b0, double time_constant = 1.0);

// Augmented matrices [[A, E C_dist], [0, A_dist]], [B; 0], [C, 0].
lti::Matrix augmented_a(const AugmentedDesign& d);
lti::Matrix augmented_b(const AugmentedDesign& d);
lti::Matrix augmented_c(const AugmentedDesign& d);

// Ackermann's formula: K such that det(sI - (A - B K)) = (s - pole)^n.
lti::Matrix design_feedback(const lti::Matrix& a, const lti::Matrix& b, double pole);

// Observer dual: L such that det(sI - (A - L C)) = (s - pole)^n.
lti::Matrix place_observer(const lti::Matrix& a, const lti::Matrix& c, double pole);

// G = -(C (A - B K)^-1 B)^-1. Throws InvalidInput if (A - B K) or the DC gain is singular.
double gain_compensation(const lti::Matrix& a, const lti::Matrix& b, const lti::Matrix& c, const lti::Matrix& k);

// Least-squares solution of B K_d = E C_dist; feasible when the residual vanishes.
struct DisturbanceGain {
    double k_d{0.0};
    bool feasible{false};
    double residual{0.0};
};
DisturbanceGain disturbance_gain(const lti::Matrix& b, const lti::Matrix& e, const lti::Matrix& c_dist);

// Complete design with closed-loop pole s_cl and common observer pole s_eso.
AugmentedDesign design_augmented(int order, double b0, double s_cl, double s_eso, double time_constant = 1.0);

// ============================================================================
// Comparison against an ADRC design
// ============================================================================
struct EquivalenceCheck {
    std::string quantity;
    double expected{0.0}; // from the ADRC design
    double actual{0.0};   // from the state-space design
    double deviation{0.0}; // |actual - expected| / max(1, |expected|)
    bool pass{false};
};

struct EquivalenceReport {
    std::vector<EquivalenceCheck> checks;
    double max_deviation{0.0};
    bool pass{true};
};

inline constexpr double kEquivalenceTolerance = 1e-9;

// Compares the ADRC gains with an independently computed state-space design.
EquivalenceReport verify_equivalence(const AdrcDesign& design, double tol = kEquivalenceTolerance);

// ============================================================================
// Prediction observer (reference only)
// ============================================================================
// x_hat(k+1) = Ad x_hat(k) + Bd u(k) + Lp (y(k) - Cd x_hat(k)),  Lp = Ad Lc
struct PredictionObserver {
    lti::Matrix a; // Ad - Lp Cd
    lti::Matrix b; // Bd
    lti::Matrix l; // Lp
};

PredictionObserver make_prediction_observer(const AdrcDesign& design, const DiscreteEsoGains& gains);

} // namespace adrc
