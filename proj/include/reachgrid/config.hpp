#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "reachgrid/grid.hpp"
#include "reachgrid/hji.hpp"
#include "reachgrid/vehicle.hpp"

namespace reachgrid {

/// 31 x 31 x 11 x 11 x 25 relative grid, heading innermost and periodic.
/// Sized so a full mode solve finishes in minutes on one desktop core.
GridSpec default_relative_grid();

/// 4D world-frame grid for the curb problem, matching the positional
/// extents of the relative grid.
GridSpec default_robot_grid();

/// Everything a command run needs: models, grids, solver knobs, and the
/// file locations the subcommands read and write.
struct RunConfig {
    VehicleParams vehicle;
    // Steering limit chosen so the bicycle's peak heading rate at the 2 m/s
    // reference speed is about 0.5 rad/s, on par with the human car.
    RobotBounds robot{{-4.0, 3.0}, {-0.68, 0.68}};
    GridSpec rel_grid = default_relative_grid();
    GridSpec robot_grid = default_robot_grid();
    SolverConfig solver;
    std::filesystem::path modes_file;
    std::filesystem::path bundle_dir;
    std::filesystem::path scenario_file;
    std::filesystem::path output_dir = ".";
    std::uint64_t seed = 0;
    int threads = 1;

    void validate() const;
};

/// Missing fields keep their defaults; relative paths resolve against the
/// config file's directory.
RunConfig load_run_config(const std::filesystem::path& file);
void save_run_config(const std::filesystem::path& file, const RunConfig& cfg);

std::string grid_spec_to_json_string(const GridSpec& spec);
GridSpec grid_spec_from_json_string(const std::string& text);

}  // namespace reachgrid
