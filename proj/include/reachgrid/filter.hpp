#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "reachgrid/grid.hpp"
#include "reachgrid/hji.hpp"
#include "reachgrid/vehicle.hpp"

namespace reachgrid {

/// Safe robot action tabulated on the same grid as the value field it was
/// extracted from.
struct ControlTables {
    ValueField accel;
    ValueField steer;
};

/// Tabulate the robot's optimal action at every node from the value
/// gradient. Interior nodes use central differences; edges fall back to one
/// sided differences, which is what the solver's extrapolated ghost values
/// reduce to. Sampling the tables at a node returns the stored action
/// unchanged.
template <class Game>
ControlTables extract_controller(const ValueField& value, const Game& game) {
    const Grid& g = *value.grid;
    constexpr int nd = Game::kDim;
    if (g.ndim() != nd) throw std::invalid_argument("controller: grid dimension mismatch");

    ControlTables tables{make_field(value.grid, "accel"), make_field(value.grid, "steer")};
    const double* v = value.values.data();

    std::array<int, nd> idx{};
    std::array<double, nd> z{};
    for (int d = 0; d < nd; ++d) z[d] = g.nodes(d)[0];

    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        std::array<double, nd> p{};
        for (int d = 0; d < nd; ++d) {
            const auto& ax = g.axis(d);
            const std::ptrdiff_t s = g.stride(d);
            const double inv2h = 0.5 / g.spacing(d);
            const int i = idx[d];
            double vm, vp;
            if (ax.periodic) {
                vm = i == 0 ? v[flat + s * (ax.count - 1)] : v[flat - s];
                vp = i == ax.count - 1 ? v[flat - s * (ax.count - 1)] : v[flat + s];
                p[d] = (vp - vm) * inv2h;
            } else if (i == 0) {
                p[d] = (v[flat + s] - v[flat]) * 2.0 * inv2h;
            } else if (i == ax.count - 1) {
                p[d] = (v[flat] - v[flat - s]) * 2.0 * inv2h;
            } else {
                p[d] = (v[flat + s] - v[flat - s]) * inv2h;
            }
        }

        RobotAction u;
        if constexpr (std::is_same_v<decltype(game.optimal(z.data(), p.data())), RobotAction>) {
            u = game.optimal(z.data(), p.data());
        } else {
            u = game.optimal(z.data(), p.data()).u;
        }
        tables.accel.values[flat] = u.a;
        tables.steer.values[flat] = u.delta;

        for (int d = nd - 1; d >= 0; --d) {
            if (++idx[d] < g.axis(d).count) {
                z[d] = g.nodes(d)[idx[d]];
                break;
            }
            idx[d] = 0;
            z[d] = g.nodes(d)[0];
        }
    }
    return tables;
}

struct ModeTables {
    ValueField value;
    ControlTables controls;
};

/// Precomputed value fields and controllers for every driving mode, plus an
/// optional curb avoidance layer on the world-frame robot grid.
struct SafetyBundle {
    std::map<int, ModeTables> modes;  // mode -1 is mandatory
    std::optional<ModeTables> curb;
    std::map<int, ActionBounds> bounds_used;
    RobotBounds robot;
    VehicleParams vehicle;
    SolverConfig solver;
};

enum class FilterBranch { nominal, avoid_car, avoid_curb };

struct FilterDecision {
    RobotAction action;
    FilterBranch branch = FilterBranch::nominal;
    double v_car = 0.0;
    double v_curb = 0.0;
    int active_mode = -1;
};

/// Least restrictive supervisor: pass the nominal action through while both
/// value functions clear the margin, otherwise play the tabulated safe
/// action of whichever hazard is closer to violation. Ties go to the car.
FilterDecision hybrid_control(const SafetyBundle& bundle, int mode, const RelativeState& z_rel,
                              const RobotState& robot, const RobotAction& nominal,
                              double margin = 0.0);

/// Most likely mode, ties to the lower id. Any positive rescaling of the
/// weights picks the same mode.
int switch_mode(const std::map<int, double>& probs);

/// Product of per-interval safety probabilities, each validated to [0, 1].
double safety_probability(const std::vector<double>& probs);

void save_bundle(const std::filesystem::path& dir, const SafetyBundle& bundle);

/// Write one mode's tables (curb tables when mode is empty) and merge the
/// entry into the directory's manifest, so bundles can be assembled one
/// solve at a time. The shared globals are refreshed on every call.
void save_bundle_entry(const std::filesystem::path& dir, std::optional<int> mode,
                       const ModeTables& tables, const std::optional<ActionBounds>& bounds,
                       const RobotBounds& robot, const VehicleParams& vehicle,
                       const SolverConfig& solver);

SafetyBundle load_bundle(const std::filesystem::path& dir);

}  // namespace reachgrid
