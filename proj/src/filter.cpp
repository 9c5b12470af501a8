#include "reachgrid/filter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "reachgrid/rgvf.hpp"

namespace reachgrid {

namespace {

double table_at(const ValueField& f, std::span<const double> q) {
    return interpolate(f, q, OobPolicy::Clamp);
}

std::uint32_t file_crc32(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("bundle: cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return crc32_ieee(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
}

bool same_spec(const GridSpec& a, const GridSpec& b) {
    if (a.axes.size() != b.axes.size()) return false;
    for (std::size_t i = 0; i < a.axes.size(); ++i) {
        const auto& x = a.axes[i];
        const auto& y = b.axes[i];
        if (x.lo != y.lo || x.hi != y.hi || x.count != y.count || x.periodic != y.periodic)
            return false;
    }
    return true;
}

}  // namespace

FilterDecision hybrid_control(const SafetyBundle& bundle, int mode, const RelativeState& z_rel,
                              const RobotState& robot, const RobotAction& nominal, double margin) {
    const auto it = bundle.modes.find(mode);
    if (it == bundle.modes.end())
        throw std::runtime_error("filter: no tables for mode " + std::to_string(mode));
    const ModeTables& mt = it->second;

    FilterDecision d;
    d.active_mode = mode;
    const std::array<double, 5> q{z_rel.x, z_rel.y, z_rel.v_h, z_rel.v_r, z_rel.psi};
    d.v_car = table_at(mt.value, q);

    std::array<double, 4> qr{robot.x, robot.y, robot.v, robot.psi};
    d.v_curb = bundle.curb ? table_at(bundle.curb->value, qr) : kFarValue;

    if (std::min(d.v_car, d.v_curb) > margin) {
        d.action = nominal;
        d.branch = FilterBranch::nominal;
        return d;
    }
    if (d.v_car <= d.v_curb) {
        d.branch = FilterBranch::avoid_car;
        d.action.a = table_at(mt.controls.accel, q);
        d.action.delta = table_at(mt.controls.steer, q);
    } else {
        d.branch = FilterBranch::avoid_curb;
        d.action.a = table_at(bundle.curb->controls.accel, qr);
        d.action.delta = table_at(bundle.curb->controls.steer, qr);
    }
    d.action.a = bundle.robot.a.clamp(d.action.a);
    d.action.delta = bundle.robot.delta.clamp(d.action.delta);
    return d;
}

int switch_mode(const std::map<int, double>& probs) {
    if (probs.empty()) throw std::invalid_argument("switch_mode: empty distribution");
    int best = probs.begin()->first;
    double bp = probs.begin()->second;
    for (const auto& [id, p] : probs) {
        if (p > bp) {
            bp = p;
            best = id;
        }
    }
    return best;
}

double safety_probability(const std::vector<double>& probs) {
    double out = 1.0;
    for (const double p : probs) {
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("safety_probability: value outside [0, 1]");
        out *= p;
    }
    return out;
}

namespace {

const char* kManifestName = "manifest.json";

nlohmann::json tables_entry(const std::filesystem::path& dir, const std::string& stem,
                            const ModeTables& t) {
    nlohmann::json files, crcs;
    const std::array<std::pair<const char*, const ValueField*>, 3> parts = {{
        {"value", &t.value},
        {"accel", &t.controls.accel},
        {"steer", &t.controls.steer},
    }};
    for (const auto& [kind, field] : parts) {
        const std::string name = stem + "_" + kind + ".rgvf";
        write_rgvf(dir / name, *field);
        files[kind] = name;
        crcs[kind] = file_crc32(dir / name);
    }
    return nlohmann::json{{"files", files}, {"crcs", crcs}};
}

ModeTables load_tables(const std::filesystem::path& dir, const nlohmann::json& entry) {
    std::array<ValueField, 3> loaded;
    int i = 0;
    for (const char* kind : {"value", "accel", "steer"}) {
        const std::string name = entry.at("files").at(kind).get<std::string>();
        const auto path = dir / name;
        const auto want = entry.at("crcs").at(kind).get<std::uint32_t>();
        if (file_crc32(path) != want)
            throw std::runtime_error("bundle: checksum mismatch for " + name);
        loaded[i++] = read_rgvf(path);
    }
    ModeTables t{std::move(loaded[0]), {std::move(loaded[1]), std::move(loaded[2])}};
    if (!same_spec(t.value.grid->spec(), t.controls.accel.grid->spec()) ||
        !same_spec(t.value.grid->spec(), t.controls.steer.grid->spec()))
        throw std::runtime_error("bundle: control tables disagree with value grid");
    return t;
}

nlohmann::json bounds_json(const ActionBounds& b) {
    return {{"a_min", b.a.lo},
            {"a_max", b.a.hi},
            {"omega_min", b.omega.lo},
            {"omega_max", b.omega.hi}};
}

ActionBounds bounds_from_json(const nlohmann::json& j) {
    return {{j.at("a_min").get<double>(), j.at("a_max").get<double>()},
            {j.at("omega_min").get<double>(), j.at("omega_max").get<double>()}};
}

}  // namespace

void save_bundle(const std::filesystem::path& dir, const SafetyBundle& bundle) {
    if (!bundle.modes.count(-1)) throw std::runtime_error("bundle: mode -1 tables are required");
    std::filesystem::create_directories(dir);

    nlohmann::json j;
    j["modes"] = nlohmann::json::object();
    for (const auto& [id, tables] : bundle.modes) {
        auto entry = tables_entry(dir, "mode_" + std::to_string(id), tables);
        if (bundle.bounds_used.count(id)) entry["bounds"] = bounds_json(bundle.bounds_used.at(id));
        j["modes"][std::to_string(id)] = entry;
    }
    if (bundle.curb) j["curb"] = tables_entry(dir, "curb", *bundle.curb);
    j["robot_bounds"] = {{"a_min", bundle.robot.a.lo},
                         {"a_max", bundle.robot.a.hi},
                         {"delta_min", bundle.robot.delta.lo},
                         {"delta_max", bundle.robot.delta.hi}};
    j["vehicle"] = {{"l_f", bundle.vehicle.l_f}, {"l_r", bundle.vehicle.l_r}};
    j["solver"] = {{"horizon", bundle.solver.horizon},
                   {"tolerance", bundle.solver.tolerance},
                   {"cfl_safety", bundle.solver.cfl_safety}};

    std::ofstream out(dir / kManifestName);
    if (!out) throw std::runtime_error("bundle: cannot write manifest in " + dir.string());
    out << j.dump(2) << '\n';
}

void save_bundle_entry(const std::filesystem::path& dir, std::optional<int> mode,
                       const ModeTables& tables, const std::optional<ActionBounds>& bounds,
                       const RobotBounds& robot, const VehicleParams& vehicle,
                       const SolverConfig& solver) {
    std::filesystem::create_directories(dir);
    nlohmann::json j;
    {
        std::ifstream in(dir / kManifestName);
        if (in) {
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw std::runtime_error("bundle: bad manifest JSON: " + std::string(e.what()));
            }
        }
    }
    if (!j.contains("modes")) j["modes"] = nlohmann::json::object();

    if (mode.has_value()) {
        auto entry = tables_entry(dir, "mode_" + std::to_string(*mode), tables);
        if (bounds.has_value()) entry["bounds"] = bounds_json(*bounds);
        j["modes"][std::to_string(*mode)] = std::move(entry);
    } else {
        j["curb"] = tables_entry(dir, "curb", tables);
    }
    j["robot_bounds"] = {{"a_min", robot.a.lo},
                         {"a_max", robot.a.hi},
                         {"delta_min", robot.delta.lo},
                         {"delta_max", robot.delta.hi}};
    j["vehicle"] = {{"l_f", vehicle.l_f}, {"l_r", vehicle.l_r}};
    j["solver"] = {{"horizon", solver.horizon},
                   {"tolerance", solver.tolerance},
                   {"cfl_safety", solver.cfl_safety}};

    std::ofstream out(dir / kManifestName);
    if (!out) throw std::runtime_error("bundle: cannot write manifest in " + dir.string());
    out << j.dump(2) << '\n';
}

SafetyBundle load_bundle(const std::filesystem::path& dir) {
    std::ifstream in(dir / kManifestName);
    if (!in) throw std::runtime_error("bundle: missing manifest in " + dir.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bundle: bad manifest JSON: " + std::string(e.what()));
    }

    SafetyBundle b;
    try {
        for (const auto& [key, entry] : j.at("modes").items()) {
            const int id = std::stoi(key);
            b.modes.emplace(id, load_tables(dir, entry));
            if (entry.contains("bounds")) b.bounds_used[id] = bounds_from_json(entry.at("bounds"));
        }
        if (j.contains("curb")) b.curb = load_tables(dir, j.at("curb"));
        const auto& jr = j.at("robot_bounds");
        b.robot.a = {jr.at("a_min").get<double>(), jr.at("a_max").get<double>()};
        b.robot.delta = {jr.at("delta_min").get<double>(), jr.at("delta_max").get<double>()};
        b.vehicle.l_f = j.at("vehicle").at("l_f").get<double>();
        b.vehicle.l_r = j.at("vehicle").at("l_r").get<double>();
        b.solver.horizon = j.at("solver").at("horizon").get<double>();
        b.solver.tolerance = j.at("solver").at("tolerance").get<double>();
        b.solver.cfl_safety = j.at("solver").at("cfl_safety").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bundle: malformed manifest: " + std::string(e.what()));
    }

    if (!b.modes.count(-1)) throw std::runtime_error("bundle: mode -1 tables are required");
    const GridSpec& ref = b.modes.begin()->second.value.grid->spec();
    for (const auto& [id, t] : b.modes)
        if (!same_spec(ref, t.value.grid->spec()))
            throw std::runtime_error("bundle: mode grids disagree");
    return b;
}

}  // namespace reachgrid
