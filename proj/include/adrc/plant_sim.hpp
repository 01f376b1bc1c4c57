#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "adrc/controllers.hpp"
#include "adrc/lti.hpp"

namespace adrc {

// ============================================================================
// Plants
// ============================================================================

// K / (T s + 1)
struct FirstOrderPlant {
    double k{1.0};
    double t{1.0};
};

// K / (T^2 s^2 + 2 D T s + 1)
struct SecondOrderPlant {
    double k{1.0};
    double d{1.0};
    double t{1.0};
};

// K_I / s
struct IntegratorPlant {
    double k_i{1.0};
};

// The input disturbance d enters beside K*u, i.e. y = P(s) (u + d / K):
//   first order   T y' + y = K u + d
//   second order  T^2 y'' + 2 D T y' + y = K u + d
//   integrator    y' = K_I u + d
// An extra pole is a unit-gain lag 1 / (T_extra s + 1) in front of the plant on u.
struct PlantSpec {
    std::variant<FirstOrderPlant, SecondOrderPlant, IntegratorPlant> kind{FirstOrderPlant{}};
    std::optional<double> extra_pole; // T_extra in seconds
    double dead_time{0.0};            // on the plant input u, seconds
};

struct PlantModel {
    lti::StateSpaceModel model;       // inputs [u, d], output y
    std::size_t delay_steps{0};       // round(dead_time / sim_step)
    double fastest_time_constant{0.0}; // smallest positive time constant, 0 if none
};

PlantModel build_plant(const PlantSpec& spec, double sim_step);

// ============================================================================
// Scenarios
// ============================================================================

// Piecewise-constant signal. Each point (t, v) holds v from t on; before the
// first point the value is `initial`.
struct Schedule {
    std::vector<std::pair<double, double>> points;
    double initial{0.0};

    double at(double t) const;
    static Schedule constant(double value) { return Schedule{{{0.0, value}}, 0.0}; }
    static Schedule step(double time, double value) { return Schedule{{{time, value}}, 0.0}; }
};

enum class ControllerKind { adrc_continuous, adrc_discrete, adrc_optimized, pi, pid, open_loop };

struct ControllerConfig {
    ControllerKind kind{ControllerKind::adrc_continuous};
    int order{1};
    double b0{1.0};
    double t_settle{1.0};
    double k_eso{10.0};
    double eso_dead_time{0.0}; // observer-side input delay
    PidGains pid;              // pi / pid baselines
    double sample_time{0.0};   // 0: run every simulation step
};

struct Scenario {
    PlantSpec plant;
    ControllerConfig controller;
    Schedule reference{Schedule::constant(1.0)};
    Schedule input_disturbance{};
    std::optional<double> saturation_limit;
    double noise_variance{0.0};
    std::uint64_t noise_seed{1};
    double sim_step{1e-3};
    double horizon{5.0};
};

// Uniformly sampled closed-loop record (one row per simulation step).
struct Trajectory {
    std::vector<double> t;
    std::vector<double> r;
    std::vector<double> y;       // measured (noisy)
    std::vector<double> y_clean;
    std::vector<double> u_raw;
    std::vector<double> u_lim;
    std::vector<std::vector<double>> x_hat; // one column per observer state
    std::size_t controller_stride{1};       // simulation steps per controller sample
    double sim_step{0.0};

    std::size_t size() const noexcept { return t.size(); }
};

std::unique_ptr<Controller> make_controller(const ControllerConfig& config, double sim_step);

// Fixed-step RK4 closed-loop simulation. Deterministic for a given scenario.
// Throws SimulationError if the state becomes non-finite or exceeds 1e9.
Trajectory run_closed_loop(const Scenario& scenario);

// Same, with a caller-supplied controller (scenario.controller is ignored).
Trajectory run_closed_loop(const Scenario& scenario, Controller& controller);

// CSV: header t,r,y,y_clean,u_raw,u_lim,xhat1,..., 10 significant digits, LF.
void write_csv(const Trajectory& trajectory, std::ostream& out);

} // namespace adrc
