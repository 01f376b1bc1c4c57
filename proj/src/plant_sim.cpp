#include "adrc/plant_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include "adrc/error.hpp"
#include "adrc/noise.hpp"

namespace adrc {

namespace {

constexpr double kDivergenceLimit = 1e9;

struct BaseRealization {
    lti::Matrix a;
    lti::Matrix b_u;
    lti::Matrix b_d;
    lti::Matrix c;
    double fastest{0.0};
};

void require_positive(double v, const char* what) {
    if (!std::isfinite(v) || !(v > 0.0)) throw InvalidInput(std::string(what) + " must be > 0");
}

BaseRealization realize(const FirstOrderPlant& p) {
    require_positive(p.t, "plant T");
    return {lti::Matrix{{-1.0 / p.t}}, lti::Matrix{{p.k / p.t}}, lti::Matrix{{1.0 / p.t}},
            lti::Matrix{{1.0}}, p.t};
}

BaseRealization realize(const SecondOrderPlant& p) {
    require_positive(p.t, "plant T");
    if (!std::isfinite(p.d) || p.d < 0.0) throw InvalidInput("plant D must be >= 0");
    const double t2 = p.t * p.t;
    // Time constants of the two poles; for an underdamped pair use T itself.
    double fastest = p.t;
    if (p.d > 1.0) fastest = p.t * (p.d - std::sqrt(p.d * p.d - 1.0));
    return {lti::Matrix{{0.0, 1.0}, {-1.0 / t2, -2.0 * p.d / p.t}},
            lti::Matrix::column({0.0, p.k / t2}), lti::Matrix::column({0.0, 1.0 / t2}),
            lti::Matrix{{1.0, 0.0}}, fastest};
}

BaseRealization realize(const IntegratorPlant& p) {
    return {lti::Matrix{{0.0}}, lti::Matrix{{p.k_i}}, lti::Matrix{{1.0}}, lti::Matrix{{1.0}}, 0.0};
}

// Indices into a per-step signal, resolved once so that breakpoints land on
// exact simulation steps.
std::vector<double> sample_schedule(const Schedule& s, double h, std::size_t count) {
    std::vector<std::pair<long long, double>> idx;
    idx.reserve(s.points.size());
    for (const auto& [t, v] : s.points) idx.emplace_back(std::llround(t / h), v);
    std::stable_sort(idx.begin(), idx.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<double> out(count, s.initial);
    std::size_t next = 0;
    double current = s.initial;
    for (std::size_t k = 0; k < count; ++k) {
        while (next < idx.size() && idx[next].first <= static_cast<long long>(k)) current = idx[next++].second;
        out[k] = current;
    }
    return out;
}

bool healthy(const lti::Matrix& x) {
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || std::abs(x[i]) > kDivergenceLimit) return false;
    return true;
}

std::string format_g10(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

PlantModel build_plant(const PlantSpec& spec, double sim_step) {
    require_positive(sim_step, "sim_step");
    if (!std::isfinite(spec.dead_time) || spec.dead_time < 0.0) throw InvalidInput("dead_time must be >= 0");
    const BaseRealization base = std::visit([](const auto& p) { return realize(p); }, spec.kind);
    const std::size_t delay = static_cast<std::size_t>(std::llround(spec.dead_time / sim_step));

    double fastest = base.fastest;
    if (!spec.extra_pole) {
        const std::size_t n = base.a.rows();
        lti::Matrix b(n, 2);
        for (std::size_t i = 0; i < n; ++i) {
            b(i, 0) = base.b_u[i];
            b(i, 1) = base.b_d[i];
        }
        return {lti::StateSpaceModel(base.a, b, base.c, lti::Matrix(1, 2)), delay, fastest};
    }

    const double te = *spec.extra_pole;
    require_positive(te, "extra pole time constant");
    fastest = fastest > 0.0 ? std::min(fastest, te) : te;
    // State [lag, base...]: lag' = (u - lag) / Te, base driven by lag in place of u.
    const std::size_t n = base.a.rows() + 1;
    lti::Matrix a(n, n);
    lti::Matrix b(n, 2);
    lti::Matrix c(1, n);
    a(0, 0) = -1.0 / te;
    b(0, 0) = 1.0 / te;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = 0; j + 1 < n; ++j) a(i + 1, j + 1) = base.a(i, j);
        a(i + 1, 0) = base.b_u[i];
        b(i + 1, 1) = base.b_d[i];
        c(0, i + 1) = base.c(0, i);
    }
    return {lti::StateSpaceModel(a, b, c, lti::Matrix(1, 2)), delay, fastest};
}

double Schedule::at(double t) const {
    double value = initial;
    double best = -INFINITY;
    for (const auto& [pt, pv] : points) {
        if (pt <= t && pt >= best) {
            best = pt;
            value = pv;
        }
    }
    return value;
}

namespace {

class OpenLoop final : public Controller {
public:
    double sample_time() const override { return 0.0; }
    double compute(double r, double, double) override { return r; }
    void commit(double) override {}
};

std::size_t steps_for(double seconds, double h) {
    return static_cast<std::size_t>(std::llround(seconds / h));
}

} // namespace

std::unique_ptr<Controller> make_controller(const ControllerConfig& cfg, double sim_step) {
    require_positive(sim_step, "sim_step");
    const double ts = cfg.sample_time > 0.0 ? cfg.sample_time : sim_step;
    if (!std::isfinite(cfg.eso_dead_time) || cfg.eso_dead_time < 0.0) {
        throw InvalidInput("eso_dead_time must be >= 0");
    }
    switch (cfg.kind) {
    case ControllerKind::adrc_continuous:
        return std::make_unique<ContinuousAdrc>(design_adrc(cfg.order, cfg.b0, cfg.t_settle, cfg.k_eso),
                                                steps_for(cfg.eso_dead_time, sim_step));
    case ControllerKind::adrc_discrete:
        return std::make_unique<DiscreteAdrc>(design_adrc(cfg.order, cfg.b0, cfg.t_settle, cfg.k_eso), ts,
                                              steps_for(cfg.eso_dead_time, ts));
    case ControllerKind::adrc_optimized:
        return std::make_unique<OptimizedAdrc>(design_adrc(cfg.order, cfg.b0, cfg.t_settle, cfg.k_eso), ts,
                                               steps_for(cfg.eso_dead_time, ts));
    case ControllerKind::pi: {
        PidGains g = cfg.pid;
        g.form = PidForm::pi;
        return std::make_unique<PiController>(g, ts);
    }
    case ControllerKind::pid: {
        PidGains g = cfg.pid;
        g.form = PidForm::pidt1;
        return std::make_unique<Pidt1Controller>(g, ts);
    }
    case ControllerKind::open_loop:
        return std::make_unique<OpenLoop>();
    }
    throw InvalidInput("unknown controller kind");
}

Trajectory run_closed_loop(const Scenario& scenario) {
    auto controller = make_controller(scenario.controller, scenario.sim_step);
    return run_closed_loop(scenario, *controller);
}

Trajectory run_closed_loop(const Scenario& scenario, Controller& controller) {
    const double h = scenario.sim_step;
    require_positive(h, "sim_step");
    require_positive(scenario.horizon, "horizon");
    if (scenario.saturation_limit) require_positive(*scenario.saturation_limit, "saturation limit");

    const PlantModel plant = build_plant(scenario.plant, h);
    const lti::Matrix& a = plant.model.a;
    const lti::Matrix& b = plant.model.b;
    const lti::Matrix& c = plant.model.c;

    std::size_t stride = 1;
    if (controller.sample_time() > 0.0) {
        const double ratio = controller.sample_time() / h;
        stride = static_cast<std::size_t>(std::llround(ratio));
        if (stride == 0 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio) {
            throw InvalidInput("controller sample time must be an integer multiple of sim_step");
        }
    }

    const std::size_t last = steps_for(scenario.horizon, h);
    const std::vector<double> ref = sample_schedule(scenario.reference, h, last + stride + 1);
    const std::vector<double> dist = sample_schedule(scenario.input_disturbance, h, last + 1);

    // Stiff extra lags are integrated with ten RK4 sub-steps per simulation step.
    const int substeps = (plant.fastest_time_constant > 0.0 && plant.fastest_time_constant < 10.0 * h) ? 10 : 1;
    const double dt = h / substeps;

    GaussianNoise noise(scenario.noise_seed, scenario.noise_variance);
    DelayLine plant_delay(plant.delay_steps);

    lti::Matrix x(plant.model.states(), 1);
    lti::Matrix xc = controller.continuous_state();
    const bool has_continuous = controller.continuous_dim() > 0;

    Trajectory traj;
    traj.controller_stride = stride;
    traj.sim_step = h;
    const std::size_t rows = last + 1;
    for (auto* col : {&traj.t, &traj.r, &traj.y, &traj.y_clean, &traj.u_raw, &traj.u_lim}) col->reserve(rows);

    controller.start(ref[0]);
    double noise_k = 0.0;
    double u_raw = 0.0;
    double u_lim = 0.0;

    for (std::size_t k = 0; k <= last; ++k) {
        const double t = static_cast<double>(k) * h;
        const double y_clean = (c * x)[0];
        if (k % stride == 0) {
            noise_k = noise.next();
            u_raw = controller.compute(ref[k], y_clean + noise_k, ref[k + stride]);
            u_lim = scenario.saturation_limit ? apply_saturation(u_raw, *scenario.saturation_limit) : u_raw;
            controller.commit(u_lim);
            if (!std::isfinite(u_raw)) {
                throw SimulationError("controller output became non-finite at t=" + format_g10(t), t);
            }
        }

        traj.t.push_back(t);
        traj.r.push_back(ref[k]);
        traj.y.push_back(y_clean + noise_k);
        traj.y_clean.push_back(y_clean);
        traj.u_raw.push_back(u_raw);
        traj.u_lim.push_back(u_lim);
        const lti::Matrix est = controller.observer_estimate();
        if (traj.x_hat.size() < est.size()) traj.x_hat.resize(est.size());
        for (std::size_t i = 0; i < est.size(); ++i) {
            if (traj.x_hat[i].empty()) traj.x_hat[i].reserve(rows);
            traj.x_hat[i].push_back(est[i]);
        }

        if (k == last) break;

        const double u_delayed = plant_delay.push(u_lim);
        const double noise_held = noise_k;
        const double r_k = ref[k];
        const double d_k = dist[k];
        const bool staged = has_continuous && controller.continuous_output(xc, r_k).has_value();
        // Applied output at an integration stage: continuous controllers are re-evaluated,
        // sampled ones hold u_lim over the step.
        auto applied = [&](const lti::Matrix& xcs) {
            if (!staged) return u_lim;
            const double raw = *controller.continuous_output(xcs, r_k);
            return scenario.saturation_limit ? apply_saturation(raw, *scenario.saturation_limit) : raw;
        };
        auto plant_rate = [&](const lti::Matrix& xs, double u_now) {
            const double u_plant = (staged && plant.delay_steps == 0) ? u_now : u_delayed;
            return a * xs + b * lti::Matrix::column({u_plant, d_k});
        };
        auto ctrl_rate = [&](const lti::Matrix& xs, const lti::Matrix& xcs, double u_now) {
            return controller.continuous_derivative(xcs, (c * xs)[0] + noise_held, u_now);
        };

        for (int s = 0; s < substeps; ++s) {
            if (has_continuous) {
                const double u1 = applied(xc);
                const lti::Matrix k1 = plant_rate(x, u1);
                const lti::Matrix m1 = ctrl_rate(x, xc, u1);
                const lti::Matrix x2 = x + k1 * (dt / 2), xc2 = xc + m1 * (dt / 2);
                const double u2 = applied(xc2);
                const lti::Matrix k2 = plant_rate(x2, u2);
                const lti::Matrix m2 = ctrl_rate(x2, xc2, u2);
                const lti::Matrix x3 = x + k2 * (dt / 2), xc3 = xc + m2 * (dt / 2);
                const double u3 = applied(xc3);
                const lti::Matrix k3 = plant_rate(x3, u3);
                const lti::Matrix m3 = ctrl_rate(x3, xc3, u3);
                const lti::Matrix x4 = x + k3 * dt, xc4 = xc + m3 * dt;
                const double u4 = applied(xc4);
                const lti::Matrix k4 = plant_rate(x4, u4);
                const lti::Matrix m4 = ctrl_rate(x4, xc4, u4);
                x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6);
                xc += (m1 + m2 * 2.0 + m3 * 2.0 + m4) * (dt / 6);
            } else {
                const lti::Matrix k1 = plant_rate(x, u_lim);
                const lti::Matrix k2 = plant_rate(x + k1 * (dt / 2), u_lim);
                const lti::Matrix k3 = plant_rate(x + k2 * (dt / 2), u_lim);
                const lti::Matrix k4 = plant_rate(x + k3 * dt, u_lim);
                x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6);
            }
        }
        if (has_continuous) controller.set_continuous_state(xc);

        if (!healthy(x) || (has_continuous && !healthy(xc))) {
            const double bad = static_cast<double>(k + 1) * h;
            throw SimulationError("simulation diverged (state non-finite or above 1e9) at t=" + format_g10(bad), bad);
        }
    }
    return traj;
}

void write_csv(const Trajectory& trajectory, std::ostream& out) {
    out << "t,r,y,y_clean,u_raw,u_lim";
    for (std::size_t i = 0; i < trajectory.x_hat.size(); ++i) out << ",xhat" << (i + 1);
    out << '\n';
    std::string line;
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        line.clear();
        for (double v : {trajectory.t[k], trajectory.r[k], trajectory.y[k], trajectory.y_clean[k],
                         trajectory.u_raw[k], trajectory.u_lim[k]}) {
            if (!line.empty()) line += ',';
            line += format_g10(v);
        }
        for (const auto& col : trajectory.x_hat) {
            line += ',';
            line += format_g10(col[k]);
        }
        line += '\n';
        out << line;
    }
}

} // namespace adrc
