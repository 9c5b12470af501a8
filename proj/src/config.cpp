#include "reachgrid/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace reachgrid {

namespace {

nlohmann::json grid_to_json(const GridSpec& spec) {
    nlohmann::json axes = nlohmann::json::array();
    for (const auto& a : spec.axes)
        axes.push_back({{"name", a.name},
                        {"lo", a.lo},
                        {"hi", a.hi},
                        {"count", a.count},
                        {"periodic", a.periodic}});
    return {{"axes", axes}};
}

GridSpec grid_from_json(const nlohmann::json& j) {
    GridSpec spec;
    for (const auto& a : j.at("axes")) {
        AxisSpec ax;
        ax.name = a.at("name").get<std::string>();
        ax.lo = a.at("lo").get<double>();
        ax.hi = a.at("hi").get<double>();
        ax.count = a.at("count").get<int>();
        ax.periodic = a.value("periodic", false);
        spec.axes.push_back(std::move(ax));
    }
    return spec;
}

}  // namespace

GridSpec default_relative_grid() {
    GridSpec s;
    s.axes = {{"x_rel", -20.0, 20.0, 31, false},
              {"y_rel", -20.0, 20.0, 31, false},
              {"v_h", 0.0, 10.0, 11, false},
              {"v_r", 0.0, 5.0, 11, false},
              {"psi_rel", -M_PI, M_PI, 25, true}};
    return s;
}

GridSpec default_robot_grid() {
    GridSpec s;
    s.axes = {{"x_r", -20.0, 20.0, 31, false},
              {"y_r", -20.0, 20.0, 31, false},
              {"v_r", 0.0, 5.0, 11, false},
              {"psi_r", -M_PI, M_PI, 25, true}};
    return s;
}

void RunConfig::validate() const {
    if (!(vehicle.l_f > 0.0) || !(vehicle.l_r > 0.0))
        throw std::invalid_argument("config: axle distances must be positive");
    if (!(robot.a.lo < robot.a.hi) || !(robot.delta.lo < robot.delta.hi))
        throw std::invalid_argument("config: robot action bounds must be nonempty");
    rel_grid.validate();
    if (rel_grid.ndim() != 5)
        throw std::invalid_argument("config: relative grid must have 5 dimensions");
    robot_grid.validate();
    if (robot_grid.ndim() != 4)
        throw std::invalid_argument("config: robot grid must have 4 dimensions");
    if (!(solver.horizon > 0.0)) throw std::invalid_argument("config: horizon must be positive");
    if (!(solver.tolerance > 0.0)) throw std::invalid_argument("config: tolerance must be positive");
    if (!(solver.cfl_safety > 0.0) || solver.cfl_safety > 1.0)
        throw std::invalid_argument("config: cfl_safety must lie in (0, 1]");
    if (threads < 1) throw std::invalid_argument("config: thread count must be at least 1");
}

RunConfig load_run_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("config: cannot open " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("config: parse error in " + file.string() + ": " + e.what());
    }
    const auto resolve = [&](const std::string& p) -> std::filesystem::path {
        const std::filesystem::path path(p);
        return path.is_absolute() || p.empty() ? path : file.parent_path() / path;
    };
    RunConfig cfg;
    try {
        if (j.contains("vehicle")) {
            cfg.vehicle.l_f = j["vehicle"].value("l_f", cfg.vehicle.l_f);
            cfg.vehicle.l_r = j["vehicle"].value("l_r", cfg.vehicle.l_r);
        }
        if (j.contains("robot_bounds")) {
            const auto& r = j["robot_bounds"];
            if (r.contains("a")) cfg.robot.a = {r["a"][0].get<double>(), r["a"][1].get<double>()};
            if (r.contains("delta"))
                cfg.robot.delta = {r["delta"][0].get<double>(), r["delta"][1].get<double>()};
        }
        if (j.contains("relative_grid")) cfg.rel_grid = grid_from_json(j["relative_grid"]);
        if (j.contains("robot_grid")) cfg.robot_grid = grid_from_json(j["robot_grid"]);
        if (j.contains("solver")) {
            const auto& s = j["solver"];
            cfg.solver.horizon = s.value("horizon", cfg.solver.horizon);
            cfg.solver.tolerance = s.value("tolerance", cfg.solver.tolerance);
            cfg.solver.cfl_safety = s.value("cfl_safety", cfg.solver.cfl_safety);
        }
        cfg.modes_file = resolve(j.value("modes_file", ""));
        cfg.bundle_dir = resolve(j.value("bundle_dir", ""));
        cfg.scenario_file = resolve(j.value("scenario_file", ""));
        cfg.output_dir = resolve(j.value("output_dir", "."));
        cfg.seed = j.value("seed", cfg.seed);
        cfg.threads = j.value("threads", cfg.threads);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config: bad schema in " + file.string() + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

void save_run_config(const std::filesystem::path& file, const RunConfig& cfg) {
    nlohmann::json j;
    j["vehicle"] = {{"l_f", cfg.vehicle.l_f}, {"l_r", cfg.vehicle.l_r}};
    j["robot_bounds"] = {{"a", {cfg.robot.a.lo, cfg.robot.a.hi}},
                         {"delta", {cfg.robot.delta.lo, cfg.robot.delta.hi}}};
    j["relative_grid"] = grid_to_json(cfg.rel_grid);
    j["robot_grid"] = grid_to_json(cfg.robot_grid);
    j["solver"] = {{"horizon", cfg.solver.horizon},
                   {"tolerance", cfg.solver.tolerance},
                   {"cfl_safety", cfg.solver.cfl_safety}};
    j["modes_file"] = cfg.modes_file.string();
    j["bundle_dir"] = cfg.bundle_dir.string();
    j["scenario_file"] = cfg.scenario_file.string();
    j["output_dir"] = cfg.output_dir.string();
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    std::ofstream out(file);
    if (!out) throw std::runtime_error("config: cannot write " + file.string());
    out << j.dump(2) << "\n";
}

std::string grid_spec_to_json_string(const GridSpec& spec) { return grid_to_json(spec).dump(); }

GridSpec grid_spec_from_json_string(const std::string& text) {
    return grid_from_json(nlohmann::json::parse(text));
}

}  // namespace reachgrid
