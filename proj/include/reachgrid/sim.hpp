#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "reachgrid/filter.hpp"
#include "reachgrid/modes.hpp"
#include "reachgrid/vehicle.hpp"

namespace reachgrid {

// ---------------------------------------------------------------------------
// Reference path

/// Piecewise-linear path the robot tracks, parameterized by arc length.
/// Needs at least two waypoints; consecutive waypoints must be distinct.
struct ReferencePath {
    std::vector<std::array<double, 2>> waypoints;
    double target_speed = 2.0;

    void validate() const;
    double length() const;

    /// Point on the path at arc length s (clamped to [0, length]).
    std::array<double, 2> point_at(double s) const;
    /// Tangent heading of the segment containing arc length s.
    double heading_at(double s) const;

    struct Projection {
        double distance = 0.0;  // geometric distance to the nearest path point
        double s = 0.0;         // arc length of the nearest point
        double heading = 0.0;   // tangent heading there
        double side = 0.0;      // +1 left of the path, -1 right, 0 on it
    };
    /// Nearest point on the polyline to (x, y).
    Projection project(double x, double y) const;
};

// ---------------------------------------------------------------------------
// Nominal controller

/// Steering toward the path: heading error plus a cross-track correction
/// soft-saturated by atan2 so low speeds do not overreact. A car left of
/// the path and aligned with it steers right, back toward the path.
double stanley_steering(const RobotState& s, const ReferencePath& path, double k,
                        const Interval& delta_bounds, double eps_v = 0.1);

struct PidGains {
    double kp = 1.0;
    double ki = 0.1;
    double kd = 0.0;
};

struct PidState {
    double integral = 0.0;
    double prev_error = 0.0;
    bool has_prev = false;
};

/// Speed tracking with the integral term clamped so its contribution alone
/// never exceeds the acceleration bounds, and frozen while the output is
/// saturated in the direction the error keeps pushing.
double pid_speed(double v, double v_target, const PidGains& g, PidState& st, double dt,
                 const Interval& a_bounds);

// ---------------------------------------------------------------------------
// Integrators

/// One RK4 step of the robot model under a constant action. Heading is
/// wrapped and speed floored at zero afterward.
RobotState rk4_robot_step(const RobotState& s, const RobotAction& u, double dt,
                          const VehicleParams& p);

/// One RK4 step of the human model, same conventions.
HumanState rk4_human_step(const HumanState& s, const HumanAction& u, double dt);

// ---------------------------------------------------------------------------
// Human sources

/// Recorded trajectory replayed with linear interpolation between samples;
/// headings come from the same stencil as action extraction. Queries past
/// the recorded span extrapolate at constant velocity and are counted.
class ReplaySource {
  public:
    explicit ReplaySource(Trajectory traj);

    HumanState state_at(double t) const;
    HumanAction action_at(double t) const;
    double span_end() const { return traj_.samples.back().t; }
    const Trajectory& trajectory() const { return traj_; }
    int extrapolations() const { return extrapolations_; }

  private:
    Trajectory traj_;
    std::vector<double> psi_;
    std::vector<ActionSample> actions_;
    mutable int extrapolations_ = 0;
};

/// Integrate the human model under piecewise-constant actions drawn
/// uniformly from a mode rectangle, each held for hold_s seconds. Speed is
/// floored at zero. Returns samples at the given step over [0, duration].
Trajectory sample_mode_trajectory(const HumanState& start, const ActionBounds& rect,
                                  std::uint64_t seed, double duration, double step,
                                  double hold_s = 0.5);

// ---------------------------------------------------------------------------
// Scenario

enum class Policy { nominal_only, reach_nopred, reach_pred };

Policy policy_from_string(const std::string& name);
std::string policy_to_string(Policy p);

struct HumanSource {
    enum class Kind { replay, sampled } kind = Kind::replay;
    // replay
    std::filesystem::path replay_file;
    Trajectory replay;
    // sampled
    int mode = -1;
    std::uint64_t seed = 0;
    HumanState start{};
};

struct Scenario {
    ReferencePath path;
    std::vector<double> start_offsets{0.0};  // robot start arc lengths
    HumanSource human;
    std::vector<CurbRect> curbs;
    std::filesystem::path curb_map;
    double duration = 20.0;
    double step = 0.1;
    double margin = 0.0;  // safety activation margin passed to the filter

    int step_count() const;  // duration / step, validated to divide evenly
    void validate() const;
};

Scenario load_scenario(const std::filesystem::path& file);
void save_scenario(const std::filesystem::path& file, const Scenario& sc);

std::vector<CurbRect> load_curb_map(const std::filesystem::path& file);
void save_curb_map(const std::filesystem::path& file, const std::vector<CurbRect>& rects);

// ---------------------------------------------------------------------------
// Encounter simulation

struct StepRecord {
    double t = 0.0;
    RobotState robot{};
    HumanState human{};
    FilterBranch branch = FilterBranch::nominal;
    int mode = -1;
    double v_car = 0.0;
    double v_curb = 0.0;
    double a_r = 0.0;
    double delta_f = 0.0;
    double deviation = 0.0;  // distance from robot to the reference path
    double distance = 0.0;   // center-to-center distance between the cars
};

struct SimMetrics {
    int steps = 0;
    int count_le_05 = 0;  // steps with inter-car distance <= 0.5 m
    int count_le_1 = 0;   // steps with inter-car distance <= 1 m
    double avg_deviation = 0.0;
    double max_deviation = 0.0;
    double min_distance = std::numeric_limits<double>::infinity();
    int count_car = 0;
    int count_curb = 0;
    int count_nominal = 0;
    double t_car = 0.0;
    double t_curb = 0.0;
    double t_nominal = 0.0;
    bool collided = false;  // cars entered the collision rectangle
    double duration = 0.0;
    int clamped_lookups = 0;     // value queries outside the solved grid boxes
    int extrapolated_human = 0;  // human queried past the recorded span
};

struct TrialResult {
    SimMetrics metrics;
    std::vector<StepRecord> log;
};

/// Simulate one encounter from the given robot start offset along the path.
/// nominal_only ignores the safety filter; reach_nopred supervises with the
/// mode -1 value; reach_pred reclassifies the human's upcoming window every
/// second (3 s lookahead) and supervises with the active mode. A bundle is
/// required for the two reach policies; modes are required for reach_pred.
TrialResult run_encounter(const Scenario& sc, double start_offset, Policy policy,
                          const SafetyBundle* bundle = nullptr,
                          const ModeSet* modes = nullptr);

void save_step_log(const std::filesystem::path& file, const std::vector<StepRecord>& log);

}  // namespace reachgrid
