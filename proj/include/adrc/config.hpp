#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adrc/plant_sim.hpp"

namespace adrc {

// ============================================================================
// Scenario files (JSON, "schema": 1)
// ============================================================================
//   {
//     "schema": 1,
//     "plant": {"type": "first_order", "K": 1, "T": 1, "extra_pole_T": null, "dead_time": 0},
//     "controller": {"type": "adrc_continuous", "order": 1, "b0": 1, "t_settle": 1, "k_eso": 10},
//     "reference": [[0, 1]],
//     "disturbance": [[2, 1], [4, 0]],
//     "saturation": null,
//     "noise": {"variance": 0, "seed": 1},
//     "sim_step": 0.001,
//     "horizon": 5
//   }
inline constexpr int kSchemaVersion = 1;

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

nlohmann::json read_json_file(const std::filesystem::path& path);

// Sets a dotted path ("plant.K") in a JSON tree. Throws InvalidInput unless the
// key already exists.
void set_dotted(nlohmann::json& tree, const std::string& path, const nlohmann::json& value);

// ============================================================================
// Suites
// ============================================================================
// Analysis settings for metrics; every field is optional and defaults to the
// reference step detected in the trajectory.
struct AnalysisSpec {
    std::optional<double> step_time;
    std::optional<double> step_size;
    std::optional<std::pair<double, double>> window; // disturbance IAE window
    std::optional<double> steady_from;               // start of the steady-state Δu statistics
};

struct SeriesSpec {
    std::string label;
    double value{0.0};     // sweep value, or the series index
    nlohmann::json scenario; // fully resolved scenario tree
};

struct FigureSpec {
    std::string name;
    std::string title;
    std::string parameter; // dotted path for sweeps, empty for hand-picked series
    AnalysisSpec analysis;
    std::vector<SeriesSpec> series;
};

struct SuiteSpec {
    std::string id;
    std::string title;
    std::vector<FigureSpec> figures;
};

//   {
//     "schema": 1, "id": "...", "title": "...",
//     "base": { scenario },
//     "analysis": { "window": [2, 4], "steady_from": 3 },
//     "figures": [
//       {"name": "...", "title": "...", "patch": { partial scenario },
//        "sweep": {"parameter": "plant.K", "values": [0.1, 1, 10]}},
//       {"name": "...", "series": [{"label": "ADRC", "set": {"controller.type": "pi"}}]}
//     ]
//   }
SuiteSpec suite_from_json(const nlohmann::json& j);

// Directory holding suites/ and scenarios/.
std::filesystem::path default_config_dir();

// Sorted suite ids found in <config_dir>/suites.
std::vector<std::string> list_suite_ids(const std::filesystem::path& config_dir);

SuiteSpec load_suite(const std::filesystem::path& config_dir, const std::string& id);

} // namespace adrc
