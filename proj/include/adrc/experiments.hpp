#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adrc/config.hpp"
#include "adrc/plant_sim.hpp"

namespace adrc {

// ============================================================================
// Metrics
// ============================================================================
struct Metrics {
    double settling_time{0.0};      // 2% band, seconds after the step; +inf if never held
    double overshoot_pct{0.0};      // relative to the step size, >= 0
    double iae{0.0};                // integral of |r - y_clean|
    double steady_state_error{0.0}; // |r - y_clean| at the end
    double u_max{0.0};              // max |u_lim|
};

struct Step {
    double time{0.0};
    double size{0.0};
};

// First change of the reference (a non-zero r(0) counts as a step at t = 0).
// Throws InvalidInput if the reference never changes.
Step detect_step(const Trajectory& traj);

// All quantities are computed on y_clean. Throws InvalidInput for a zero step.
Metrics compute_metrics(const Trajectory& traj, double step_time, double step_size);

// Trapezoidal integral of |r - y_clean| over [t_start, t_end].
double iae_window(const Trajectory& traj, double t_start, double t_end);

// Sample standard deviation of the applied output increments, taken at controller
// sample instants from t_start on.
double du_std(const Trajectory& traj, double t_start);

// ============================================================================
// Suites
// ============================================================================
struct SeriesResult {
    std::string label;
    double value{0.0};
    Trajectory trajectory;
    Metrics metrics;
    double du_std{0.0};
    double window_iae{0.0};
    std::optional<std::string> failure; // simulation error, if any
};

struct FigureResult {
    std::string name;
    std::string title;
    std::string parameter;
    std::vector<SeriesResult> series;
};

struct SuiteResult {
    std::string id;
    std::vector<FigureResult> figures;
};

// Runs every series of the suite with up to `jobs` worker threads (0: hardware
// concurrency). The result does not depend on the worker count.
SuiteResult run_suite(const SuiteSpec& suite, unsigned jobs = 0);

// Writes <figure>_<label>.csv per series, <figure>_summary.csv,
// <figure>_extra.csv and <figure>.svg into out_dir.
void write_suite(const SuiteResult& result, const std::filesystem::path& out_dir);

// Convenience for a single scenario: trajectory.csv, summary.csv, plot.svg.
void write_single(const Trajectory& traj, const std::string& title, const std::filesystem::path& out_dir);

// Summary CSV row: sweep_value,settling_time,overshoot_pct,iae,u_max,steady_state_error.
std::string summary_header();
std::string summary_row(double sweep_value, const Metrics& m);

} // namespace adrc
