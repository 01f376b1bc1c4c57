#include "adrc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "adrc/error.hpp"
#include "adrc/svg_plot.hpp"

namespace adrc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t index_at(const Trajectory& traj, double t) {
    if (traj.size() == 0) return 0;
    const double k = std::round(t / traj.sim_step);
    if (k <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(k), traj.size() - 1);
}

double trapezoid_abs_error(const Trajectory& traj, std::size_t first, std::size_t last) {
    double acc = 0.0;
    for (std::size_t k = first; k < last; ++k) {
        const double e0 = std::abs(traj.r[k] - traj.y_clean[k]);
        const double e1 = std::abs(traj.r[k + 1] - traj.y_clean[k + 1]);
        acc += 0.5 * (e0 + e1) * (traj.t[k + 1] - traj.t[k]);
    }
    return acc;
}

std::string g10(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string file_safe(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
    return out;
}

void open_for_write(std::ofstream& f, const std::filesystem::path& p) {
    f.open(p, std::ios::binary);
    if (!f) throw InvalidInput("cannot write " + p.string());
}

SeriesResult run_series(const SeriesSpec& spec, const AnalysisSpec& analysis) {
    SeriesResult out;
    out.label = spec.label;
    out.value = spec.value;
    const Scenario scenario = scenario_from_json(spec.scenario);
    try {
        out.trajectory = run_closed_loop(scenario);
    } catch (const SimulationError& e) {
        out.failure = e.what();
        out.metrics = Metrics{kInf, kNaN, kNaN, kNaN, kNaN};
        out.du_std = kNaN;
        out.window_iae = kNaN;
        return out;
    }
    Step step;
    if (analysis.step_time && analysis.step_size) {
        step = {*analysis.step_time, *analysis.step_size};
    } else {
        step = detect_step(out.trajectory);
        if (analysis.step_time) step.time = *analysis.step_time;
        if (analysis.step_size) step.size = *analysis.step_size;
    }
    out.metrics = compute_metrics(out.trajectory, step.time, step.size);
    out.du_std = du_std(out.trajectory, analysis.steady_from.value_or(scenario.horizon / 2.0));
    out.window_iae = analysis.window ? iae_window(out.trajectory, analysis.window->first, analysis.window->second)
                                     : out.metrics.iae;
    return out;
}

void write_figure_svg(const std::filesystem::path& path, const std::string& title,
                      const std::vector<const SeriesResult*>& series) {
    PlotPanel y_panel{"y", {}};
    PlotPanel u_panel{"u", {}};
    for (const auto* s : series) {
        if (s->failure || s->trajectory.size() == 0) continue;
        y_panel.series.push_back({s->label, &s->trajectory.t, &s->trajectory.y, false});
        u_panel.series.push_back({s->label, &s->trajectory.t, &s->trajectory.u_lim, false});
    }
    for (const auto* s : series) {
        if (!s->failure && s->trajectory.size() > 0) {
            y_panel.series.push_back({"r", &s->trajectory.t, &s->trajectory.r, true});
            break;
        }
    }
    std::ofstream f;
    open_for_write(f, path);
    write_svg(f, title, "t [s]", {y_panel, u_panel});
}

} // namespace

Step detect_step(const Trajectory& traj) {
    if (traj.size() == 0) throw InvalidInput("empty trajectory");
    if (traj.r[0] != 0.0) return {traj.t[0], traj.r[0]};
    for (std::size_t k = 1; k < traj.size(); ++k) {
        if (traj.r[k] != traj.r[0]) return {traj.t[k], traj.r[k] - traj.r[0]};
    }
    throw InvalidInput("reference contains no step");
}

Metrics compute_metrics(const Trajectory& traj, double step_time, double step_size) {
    if (!std::isfinite(step_size) || step_size == 0.0) throw InvalidInput("no step: step size must be non-zero");
    if (traj.size() < 2) throw InvalidInput("trajectory too short for metrics");

    const double final_ref = traj.r.back();
    const double band = 0.02 * std::abs(step_size);
    const double sign = step_size > 0.0 ? 1.0 : -1.0;
    std::size_t first = 0;
    while (first < traj.size() && traj.t[first] < step_time - 1e-12) ++first;
    if (first >= traj.size()) throw InvalidInput("step time beyond the trajectory");
    const std::size_t last = traj.size() - 1;

    Metrics m;
    std::size_t k = last + 1;
    while (k-- > first) {
        if (std::abs(traj.y_clean[k] - final_ref) > band) break;
        if (k == first) {
            k = last + 1; // never outside
            break;
        }
    }
    if (k == last + 1) {
        m.settling_time = 0.0;
    } else if (k == last) {
        m.settling_time = kInf;
    } else {
        const double e0 = traj.y_clean[k] - final_ref;
        const double e1 = traj.y_clean[k + 1] - final_ref;
        const double edge = e0 > 0.0 ? band : -band;
        const double frac = (e0 - edge) / (e0 - e1);
        m.settling_time = traj.t[k] + frac * (traj.t[k + 1] - traj.t[k]) - step_time;
    }

    double peak = 0.0;
    for (std::size_t i = first; i <= last; ++i) peak = std::max(peak, sign * (traj.y_clean[i] - final_ref));
    m.overshoot_pct = 100.0 * peak / std::abs(step_size);

    m.iae = trapezoid_abs_error(traj, first, last);
    m.steady_state_error = std::abs(final_ref - traj.y_clean[last]);
    for (double u : traj.u_lim) m.u_max = std::max(m.u_max, std::abs(u));
    return m;
}

double iae_window(const Trajectory& traj, double t_start, double t_end) {
    if (!(t_end > t_start)) throw InvalidInput("IAE window must have t_end > t_start");
    return trapezoid_abs_error(traj, index_at(traj, t_start), index_at(traj, t_end));
}

double du_std(const Trajectory& traj, double t_start) {
    const std::size_t stride = std::max<std::size_t>(1, traj.controller_stride);
    std::size_t k = index_at(traj, t_start);
    k = ((k + stride - 1) / stride) * stride;
    if (k < stride) k = stride;
    std::vector<double> du;
    for (; k < traj.size(); k += stride) du.push_back(traj.u_lim[k] - traj.u_lim[k - stride]);
    if (du.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : du) mean += v;
    mean /= static_cast<double>(du.size());
    double ss = 0.0;
    for (double v : du) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(du.size() - 1));
}

SuiteResult run_suite(const SuiteSpec& suite, unsigned jobs) {
    SuiteResult result;
    result.id = suite.id;
    struct Task {
        std::size_t figure;
        std::size_t series;
    };
    std::vector<Task> tasks;
    for (std::size_t f = 0; f < suite.figures.size(); ++f) {
        const FigureSpec& spec = suite.figures[f];
        result.figures.push_back({spec.name, spec.title, spec.parameter, {}});
        result.figures.back().series.resize(spec.series.size());
        for (std::size_t s = 0; s < spec.series.size(); ++s) tasks.push_back({f, s});
    }

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, tasks.size())));

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(tasks.size());
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task t = tasks[i];
            const FigureSpec& fig = suite.figures[t.figure];
            try {
                result.figures[t.figure].series[t.series] = run_series(fig.series[t.series], fig.analysis);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return result;
}

std::string summary_header() { return "sweep_value,settling_time,overshoot_pct,iae,u_max,steady_state_error"; }

std::string summary_row(double sweep_value, const Metrics& m) {
    return g10(sweep_value) + ',' + g10(m.settling_time) + ',' + g10(m.overshoot_pct) + ',' + g10(m.iae) + ',' +
           g10(m.u_max) + ',' + g10(m.steady_state_error);
}

void write_suite(const SuiteResult& result, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const FigureResult& fig : result.figures) {
        std::ofstream summary, extra;
        open_for_write(summary, out_dir / (fig.name + "_summary.csv"));
        open_for_write(extra, out_dir / (fig.name + "_extra.csv"));
        summary << summary_header() << '\n';
        extra << "sweep_value,label,du_std,window_iae,status\n";

        std::vector<const SeriesResult*> plotted;
        for (const SeriesResult& s : fig.series) {
            summary << summary_row(s.value, s.metrics) << '\n';
            extra << g10(s.value) << ',' << s.label << ',' << g10(s.du_std) << ',' << g10(s.window_iae) << ','
                  << (s.failure ? "diverged" : "ok") << '\n';
            if (!s.failure) {
                std::ofstream traj;
                open_for_write(traj, out_dir / (fig.name + "_" + file_safe(s.label) + ".csv"));
                write_csv(s.trajectory, traj);
            }
            plotted.push_back(&s);
        }
        write_figure_svg(out_dir / (fig.name + ".svg"), fig.title, plotted);
    }
}

void write_single(const Trajectory& traj, const std::string& title, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream f;
        open_for_write(f, out_dir / "trajectory.csv");
        write_csv(traj, f);
    }
    {
        std::ofstream f;
        open_for_write(f, out_dir / "summary.csv");
        f << summary_header() << '\n';
        Metrics m{kInf, kNaN, kNaN, kNaN, kNaN};
        try {
            const Step step = detect_step(traj);
            m = compute_metrics(traj, step.time, step.size);
        } catch (const InvalidInput&) {
            // constant reference: keep the sentinel row
        }
        f << summary_row(0.0, m) << '\n';
    }
    SeriesResult s;
    s.label = "y";
    s.trajectory = traj;
    write_figure_svg(out_dir / "plot.svg", title, {&s});
}

} // namespace adrc
