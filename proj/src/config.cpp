#include "adrc/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "adrc/error.hpp"

namespace adrc {

using nlohmann::json;

namespace {

double number(const json& j, const char* key, double fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    if (!j.at(key).is_number()) throw InvalidInput(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::optional<double> optional_number(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    if (!j.at(key).is_number()) throw InvalidInput(std::string("'") + key + "' must be a number or null");
    return j.at(key).get<double>();
}

std::string text(const json& j, const char* key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_string()) throw InvalidInput(std::string("'") + key + "' must be a string");
    return j.at(key).get<std::string>();
}

Schedule schedule_from(const json& j, const char* key) {
    Schedule s;
    if (!j.contains(key) || j.at(key).is_null()) return s;
    const json& v = j.at(key);
    if (v.is_number()) return Schedule::constant(v.get<double>());
    if (!v.is_array()) throw InvalidInput(std::string("'") + key + "' must be a list of [time, value]");
    for (const auto& p : v) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw InvalidInput(std::string("'") + key + "' entries must be [time, value]");
        }
        s.points.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return s;
}

json schedule_to(const Schedule& s) {
    json out = json::array();
    for (const auto& [t, v] : s.points) out.push_back({t, v});
    return out;
}

PlantSpec plant_from(const json& j) {
    PlantSpec p;
    const std::string type = text(j, "type", "first_order");
    if (type == "first_order") {
        p.kind = FirstOrderPlant{number(j, "K", 1.0), number(j, "T", 1.0)};
    } else if (type == "second_order") {
        p.kind = SecondOrderPlant{number(j, "K", 1.0), number(j, "D", 1.0), number(j, "T", 1.0)};
    } else if (type == "integrator") {
        p.kind = IntegratorPlant{number(j, "K_I", 1.0)};
    } else {
        throw InvalidInput("unknown plant type '" + type + "'");
    }
    p.extra_pole = optional_number(j, "extra_pole_T");
    p.dead_time = number(j, "dead_time", 0.0);
    return p;
}

json plant_to(const PlantSpec& p) {
    json j;
    if (const auto* f = std::get_if<FirstOrderPlant>(&p.kind)) {
        j = {{"type", "first_order"}, {"K", f->k}, {"T", f->t}};
    } else if (const auto* s = std::get_if<SecondOrderPlant>(&p.kind)) {
        j = {{"type", "second_order"}, {"K", s->k}, {"D", s->d}, {"T", s->t}};
    } else {
        j = {{"type", "integrator"}, {"K_I", std::get<IntegratorPlant>(p.kind).k_i}};
    }
    j["extra_pole_T"] = p.extra_pole ? json(*p.extra_pole) : json(nullptr);
    j["dead_time"] = p.dead_time;
    return j;
}

struct KindName {
    ControllerKind kind;
    const char* name;
};
constexpr KindName kKinds[] = {
    {ControllerKind::adrc_continuous, "adrc_continuous"},
    {ControllerKind::adrc_discrete, "adrc_discrete"},
    {ControllerKind::adrc_optimized, "adrc_optimized"},
    {ControllerKind::pi, "pi"},
    {ControllerKind::pid, "pid"},
    {ControllerKind::open_loop, "open_loop"},
};

ControllerConfig controller_from(const json& j) {
    ControllerConfig c;
    const std::string type = text(j, "type", "adrc_continuous");
    const auto it = std::find_if(std::begin(kKinds), std::end(kKinds), [&](const KindName& k) { return type == k.name; });
    if (it == std::end(kKinds)) throw InvalidInput("unknown controller type '" + type + "'");
    c.kind = it->kind;
    const double order = number(j, "order", 1.0);
    if (order != 1.0 && order != 2.0) throw InvalidInput("controller order must be 1 or 2");
    c.order = static_cast<int>(order);
    c.b0 = number(j, "b0", 1.0);
    c.t_settle = number(j, "t_settle", 1.0);
    c.k_eso = number(j, "k_eso", 10.0);
    c.eso_dead_time = number(j, "eso_dead_time", 0.0);
    c.sample_time = number(j, "sample_time", 0.0);
    c.pid.k_p = number(j, "k_p", 0.0);
    c.pid.k_i = number(j, "k_i", 0.0);
    c.pid.t_z1 = number(j, "t_z1", 0.0);
    c.pid.t_z2 = number(j, "t_z2", 0.0);
    c.pid.t_1 = number(j, "t_1", 0.0);
    c.pid.form = c.kind == ControllerKind::pid ? PidForm::pidt1 : PidForm::pi;
    return c;
}

json controller_to(const ControllerConfig& c) {
    const auto it = std::find_if(std::begin(kKinds), std::end(kKinds), [&](const KindName& k) { return c.kind == k.kind; });
    return {{"type", it->name},       {"order", c.order},         {"b0", c.b0},
            {"t_settle", c.t_settle}, {"k_eso", c.k_eso},         {"eso_dead_time", c.eso_dead_time},
            {"sample_time", c.sample_time}, {"k_p", c.pid.k_p},   {"k_i", c.pid.k_i},
            {"t_z1", c.pid.t_z1},     {"t_z2", c.pid.t_z2},       {"t_1", c.pid.t_1}};
}

void check_schema(const json& j) {
    if (!j.is_object()) throw InvalidInput("configuration must be a JSON object");
    if (!j.contains("schema") || !j.at("schema").is_number_integer() || j.at("schema").get<int>() != kSchemaVersion) {
        throw InvalidInput("missing or unsupported \"schema\" (expected 1)");
    }
}

AnalysisSpec analysis_from(const json& j, AnalysisSpec base) {
    if (j.is_null()) return base;
    if (auto v = optional_number(j, "step_time")) base.step_time = v;
    if (auto v = optional_number(j, "step_size")) base.step_size = v;
    if (auto v = optional_number(j, "steady_from")) base.steady_from = v;
    if (j.contains("window") && !j.at("window").is_null()) {
        const json& w = j.at("window");
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number() || w[0] >= w[1]) {
            throw InvalidInput("analysis window must be [t_start, t_end] with t_start < t_end");
        }
        base.window = std::make_pair(w[0].get<double>(), w[1].get<double>());
    }
    return base;
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

Scenario scenario_from_json(const json& j) {
    check_schema(j);
    Scenario s;
    s.plant = plant_from(j.value("plant", json::object()));
    s.controller = controller_from(j.value("controller", json::object()));
    s.reference = j.contains("reference") ? schedule_from(j, "reference") : Schedule::constant(1.0);
    s.input_disturbance = schedule_from(j, "disturbance");
    s.saturation_limit = optional_number(j, "saturation");
    if (j.contains("noise") && !j.at("noise").is_null()) {
        const json& n = j.at("noise");
        s.noise_variance = number(n, "variance", 0.0);
        if (n.contains("seed")) {
            if (!n.at("seed").is_number_unsigned()) throw InvalidInput("noise seed must be a non-negative integer");
            s.noise_seed = n.at("seed").get<std::uint64_t>();
        }
    }
    s.sim_step = number(j, "sim_step", 1e-3);
    s.horizon = number(j, "horizon", 5.0);
    if (!(s.horizon > 0.0)) throw InvalidInput("horizon must be > 0");
    if (!(s.sim_step > 0.0)) throw InvalidInput("sim_step must be > 0");
    if (s.saturation_limit && !(*s.saturation_limit > 0.0)) throw InvalidInput("saturation must be > 0");
    return s;
}

json scenario_to_json(const Scenario& s) {
    return {{"schema", kSchemaVersion},
            {"plant", plant_to(s.plant)},
            {"controller", controller_to(s.controller)},
            {"reference", schedule_to(s.reference)},
            {"disturbance", schedule_to(s.input_disturbance)},
            {"saturation", s.saturation_limit ? json(*s.saturation_limit) : json(nullptr)},
            {"noise", {{"variance", s.noise_variance}, {"seed", s.noise_seed}}},
            {"sim_step", s.sim_step},
            {"horizon", s.horizon}};
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
}

void set_dotted(json& tree, const std::string& path, const json& value) {
    json* node = &tree;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object() || !node->contains(key)) throw InvalidInput("parameter '" + path + "' does not resolve");
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = value;
}

SuiteSpec suite_from_json(const json& j) {
    check_schema(j);
    SuiteSpec suite;
    suite.id = text(j, "id", "");
    if (suite.id.empty()) throw InvalidInput("suite needs an \"id\"");
    suite.title = text(j, "title", suite.id);
    const json base = j.value("base", json::object());
    const AnalysisSpec suite_analysis = analysis_from(j.value("analysis", json()), {});

    if (!j.contains("figures") || !j.at("figures").is_array() || j.at("figures").empty()) {
        throw InvalidInput("suite '" + suite.id + "' has no figures");
    }
    for (const json& f : j.at("figures")) {
        FigureSpec fig;
        fig.name = text(f, "name", "");
        if (fig.name.empty()) throw InvalidInput("figure needs a \"name\"");
        fig.title = text(f, "title", fig.name);
        fig.analysis = analysis_from(f.value("analysis", json()), suite_analysis);

        json figure_base = base;
        figure_base["schema"] = kSchemaVersion;
        if (f.contains("patch")) figure_base.merge_patch(f.at("patch"));

        if (f.contains("sweep")) {
            const json& sw = f.at("sweep");
            fig.parameter = text(sw, "parameter", "");
            if (!sw.contains("values") || !sw.at("values").is_array() || sw.at("values").empty()) {
                throw InvalidInput("sweep '" + fig.name + "' needs non-empty values");
            }
            for (const json& v : sw.at("values")) {
                if (!v.is_number()) throw InvalidInput("sweep values must be numbers");
                SeriesSpec s;
                s.value = v.get<double>();
                s.label = fig.parameter.substr(fig.parameter.rfind('.') + 1) + "=" + format_value(s.value);
                s.scenario = figure_base;
                set_dotted(s.scenario, fig.parameter, v);
                fig.series.push_back(std::move(s));
            }
        } else if (f.contains("series")) {
            double index = 0.0;
            for (const json& entry : f.at("series")) {
                SeriesSpec s;
                s.label = text(entry, "label", "series " + format_value(index));
                s.value = index++;
                s.scenario = figure_base;
                if (entry.contains("patch")) s.scenario.merge_patch(entry.at("patch"));
                const json sets = entry.value("set", json::object());
                for (const auto& [path, value] : sets.items()) {
                    set_dotted(s.scenario, path, value);
                }
                fig.series.push_back(std::move(s));
            }
            if (fig.series.empty()) throw InvalidInput("figure '" + fig.name + "' has no series");
        } else {
            throw InvalidInput("figure '" + fig.name + "' needs \"sweep\" or \"series\"");
        }
        // Fail early on malformed scenarios rather than inside a worker.
        for (const auto& s : fig.series) scenario_from_json(s.scenario);
        suite.figures.push_back(std::move(fig));
    }
    return suite;
}

std::filesystem::path default_config_dir() {
#ifdef ADRC_CONFIG_DIR
    return ADRC_CONFIG_DIR;
#else
    return "configs";
#endif
}

std::vector<std::string> list_suite_ids(const std::filesystem::path& config_dir) {
    std::vector<std::string> ids;
    const auto dir = config_dir / "suites";
    if (!std::filesystem::is_directory(dir)) return ids;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") ids.push_back(entry.path().stem().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

SuiteSpec load_suite(const std::filesystem::path& config_dir, const std::string& id) {
    const auto path = config_dir / "suites" / (id + ".json");
    if (!std::filesystem::exists(path)) throw InvalidInput("unknown suite '" + id + "'");
    SuiteSpec s = suite_from_json(read_json_file(path));
    if (s.id != id) throw InvalidInput(path.string() + ": id '" + s.id + "' does not match file name");
    return s;
}

} // namespace adrc
