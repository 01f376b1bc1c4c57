#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "adrc/config.hpp"
#include "adrc/design.hpp"
#include "adrc/error.hpp"
#include "adrc/experiments.hpp"
#include "adrc/plant_sim.hpp"
#include "adrc/statespace_equiv.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitVerify = 3;

std::string joined(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) out += "  " + id + "\n";
    return out;
}

struct VerifyTally {
    int passed{0};
    int failed{0};

    void row(const std::string& name, bool ok, double deviation) {
        std::printf("%-44s %-4s  max dev %.3e\n", name.c_str(), ok ? "PASS" : "FAIL", deviation);
        (ok ? passed : failed)++;
    }
};

int run_verify(unsigned seed, int count) {
    VerifyTally tally;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> b0_dist(0.1, 10.0), ts_dist(0.2, 20.0), k_dist(1.0, 100.0);

    for (int order = 1; order <= 2; ++order) {
        const auto nominal = adrc::design_adrc(order, 1.0, order == 1 ? 1.0 : 5.0, 10.0);
        const auto report = adrc::verify_equivalence(nominal);
        tally.row("state-space equivalence, order " + std::to_string(order) + " nominal", report.pass,
                  report.max_deviation);

        bool all = true;
        double worst = 0.0;
        bool placed = true;
        double worst_poly = 0.0;
        for (int i = 0; i < count; ++i) {
            const auto d = adrc::design_adrc(order, b0_dist(rng), ts_dist(rng), k_dist(rng));
            const auto r = adrc::verify_equivalence(d);
            all = all && r.pass;
            worst = std::max(worst, r.max_deviation);

            const auto cont = adrc::lti::characteristic_polynomial(adrc::observer_error_matrix(d));
            const double ts = 0.01;
            const auto gains = adrc::design_discrete_gains(d, ts);
            const auto disc = adrc::lti::characteristic_polynomial(adrc::current_observer_error_matrix(d, gains));
            const bool ok = adrc::lti::poly_roots_all_equal(cont, d.s_eso, 1e-9) &&
                            adrc::lti::poly_roots_all_equal(disc, gains.z_eso, 1e-9);
            placed = placed && ok;
            const auto expect = adrc::lti::repeated_root(d.s_eso, d.observer_dim());
            for (std::size_t k = 0; k < expect.coefficients().size(); ++k) {
                worst_poly = std::max(worst_poly,
                                      std::abs(cont[k] - expect[k]) / std::max(1.0, std::abs(expect[k])));
            }
        }
        tally.row("state-space equivalence, order " + std::to_string(order) + " x" + std::to_string(count), all,
                  worst);
        tally.row("observer pole placement, order " + std::to_string(order) + " x" + std::to_string(count), placed,
                  worst_poly);
    }
    std::printf("%d passed, %d failed\n", tally.passed, tally.failed);
    return tally.failed == 0 ? 0 : kExitVerify;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adrc-lab: linear ADRC simulation experiments"};
    app.require_subcommand(1);
    std::string config_dir = adrc::default_config_dir().string();
    app.add_option("--configs", config_dir, "Directory containing suites/ and scenarios/");

    std::string scenario_file, out_dir = "out";
    auto* run = app.add_subcommand("run", "Simulate one scenario file");
    run->add_option("scenario", scenario_file, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory");

    std::string suite_id;
    unsigned jobs = 0;
    auto* suite = app.add_subcommand("suite", "Run an experiment suite");
    suite->add_option("id", suite_id, "Suite id (see list-suites)")->required();
    suite->add_option("--out", out_dir, "Output directory");
    suite->add_option("--jobs", jobs, "Worker threads (0: all cores)");

    auto* list = app.add_subcommand("list-suites", "List available suite ids");

    unsigned seed = 20240611;
    int count = 200;
    auto* verify = app.add_subcommand("verify", "Check state-space equivalence and observer pole placement");
    verify->add_option("--seed", seed, "Random seed for the design sample");
    verify->add_option("--count", count, "Random designs per order")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*list) {
            for (const auto& id : adrc::list_suite_ids(config_dir)) std::cout << id << '\n';
            return 0;
        }
        if (*verify) return run_verify(seed, count);
        if (*run) {
            const auto scenario = adrc::scenario_from_json(adrc::read_json_file(scenario_file));
            const auto traj = adrc::run_closed_loop(scenario);
            adrc::write_single(traj, std::filesystem::path(scenario_file).stem().string(), out_dir);
            std::cout << "wrote " << out_dir << '\n';
            return 0;
        }
        if (*suite) {
            const auto ids = adrc::list_suite_ids(config_dir);
            if (std::find(ids.begin(), ids.end(), suite_id) == ids.end()) {
                std::cerr << "unknown suite '" << suite_id << "'; valid ids:\n" << joined(ids);
                return kExitUsage;
            }
            const auto spec = adrc::load_suite(config_dir, suite_id);
            const auto result = adrc::run_suite(spec, jobs);
            const auto dir = std::filesystem::path(out_dir) / suite_id;
            adrc::write_suite(result, dir);
            for (const auto& fig : result.figures) {
                std::cout << fig.name << ": " << fig.title << '\n';
                std::cout << "  " << adrc::summary_header() << '\n';
                for (const auto& s : fig.series) {
                    std::cout << "  " << adrc::summary_row(s.value, s.metrics) << "  " << s.label
                              << (s.failure ? "  (diverged)" : "") << '\n';
                }
            }
            std::cout << "wrote " << dir.string() << '\n';
            return 0;
        }
    } catch (const adrc::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const adrc::SimulationError& e) {
        std::cerr << "simulation failed: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}
