#include "reachgrid/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace reachgrid {

namespace {

constexpr double kStanleyGain = 1.0;
constexpr double kPredictLookahead = 3.0;  // seconds of human future per window

std::array<double, 2> seg_dir(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    const double dx = b[0] - a[0];
    const double dy = b[1] - a[1];
    const double len = std::hypot(dx, dy);
    return {dx / len, dy / len};
}

}  // namespace

// ---------------------------------------------------------------------------
// ReferencePath

void ReferencePath::validate() const {
    if (waypoints.size() < 2)
        throw std::invalid_argument("reference path: need at least 2 waypoints");
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const double d =
            std::hypot(waypoints[i][0] - waypoints[i - 1][0], waypoints[i][1] - waypoints[i - 1][1]);
        if (d < 1e-12)
            throw std::invalid_argument("reference path: consecutive waypoints must be distinct");
    }
    if (!(target_speed > 0.0))
        throw std::invalid_argument("reference path: target speed must be positive");
}

double ReferencePath::length() const {
    double s = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i)
        s += std::hypot(waypoints[i][0] - waypoints[i - 1][0], waypoints[i][1] - waypoints[i - 1][1]);
    return s;
}

std::array<double, 2> ReferencePath::point_at(double s) const {
    validate();
    s = std::max(s, 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const double seg =
            std::hypot(waypoints[i][0] - waypoints[i - 1][0], waypoints[i][1] - waypoints[i - 1][1]);
        if (s <= acc + seg) {
            const double u = (s - acc) / seg;
            return {waypoints[i - 1][0] + u * (waypoints[i][0] - waypoints[i - 1][0]),
                    waypoints[i - 1][1] + u * (waypoints[i][1] - waypoints[i - 1][1])};
        }
        acc += seg;
    }
    return waypoints.back();
}

double ReferencePath::heading_at(double s) const {
    validate();
    s = std::max(s, 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const double seg =
            std::hypot(waypoints[i][0] - waypoints[i - 1][0], waypoints[i][1] - waypoints[i - 1][1]);
        if (s <= acc + seg || i + 1 == waypoints.size()) {
            const auto d = seg_dir(waypoints[i - 1], waypoints[i]);
            return std::atan2(d[1], d[0]);
        }
        acc += seg;
    }
    const auto d = seg_dir(waypoints[waypoints.size() - 2], waypoints.back());
    return std::atan2(d[1], d[0]);
}

ReferencePath::Projection ReferencePath::project(double x, double y) const {
    validate();
    Projection best;
    double best_d2 = std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const auto& a = waypoints[i - 1];
        const auto& b = waypoints[i];
        const double sx = b[0] - a[0];
        const double sy = b[1] - a[1];
        const double seg2 = sx * sx + sy * sy;
        const double seg = std::sqrt(seg2);
        double u = ((x - a[0]) * sx + (y - a[1]) * sy) / seg2;
        u = std::clamp(u, 0.0, 1.0);
        const double nx = a[0] + u * sx;
        const double ny = a[1] + u * sy;
        const double dx = x - nx;
        const double dy = y - ny;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best.distance = std::sqrt(d2);
            best.s = acc + u * seg;
            best.heading = std::atan2(sy, sx);
            // which side of the tangent the query falls on
            const double cross = sx * dy - sy * dx;
            best.side = cross > 0.0 ? 1.0 : (cross < 0.0 ? -1.0 : 0.0);
        }
        acc += seg;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Nominal controller

double stanley_steering(const RobotState& s, const ReferencePath& path, double k,
                        const Interval& delta_bounds, double eps_v) {
    const auto proj = path.project(s.x, s.y);
    const double heading_error = wrap_angle(proj.heading - s.psi);
    const double cross_left = proj.side * proj.distance;
    // positive cross-track (left of the path) must steer right, so the
    // correction enters with the opposite sign of the offset
    const double delta = heading_error - std::atan2(k * cross_left, s.v + eps_v);
    return delta_bounds.clamp(delta);
}

double pid_speed(double v, double v_target, const PidGains& g, PidState& st, double dt,
                 const Interval& a_bounds) {
    if (!(dt > 0.0)) throw std::invalid_argument("pid_speed: dt must be positive");
    const double e = v_target - v;
    const double de = st.has_prev ? (e - st.prev_error) / dt : 0.0;
    double cand = st.integral + e * dt;
    if (g.ki > 0.0) cand = std::clamp(cand, a_bounds.lo / g.ki, a_bounds.hi / g.ki);
    const double with_cand = g.kp * e + g.ki * cand + g.kd * de;
    // conditional integration: hold the integrator while the output sits on
    // a rail and the error keeps pushing into it
    const bool windup_hi = with_cand > a_bounds.hi && e > 0.0;
    const bool windup_lo = with_cand < a_bounds.lo && e < 0.0;
    if (!windup_hi && !windup_lo) st.integral = cand;
    st.prev_error = e;
    st.has_prev = true;
    return a_bounds.clamp(g.kp * e + g.ki * st.integral + g.kd * de);
}

// ---------------------------------------------------------------------------
// Integrators

HumanState rk4_human_step(const HumanState& s, const HumanAction& u, double dt) {
    const auto add = [](const HumanState& q, const std::array<double, 4>& d, double h) {
        return HumanState{q.x + h * d[0], q.y + h * d[1], q.v + h * d[2], q.psi + h * d[3]};
    };
    const auto k1 = human_derivative(s, u);
    const auto k2 = human_derivative(add(s, k1, dt / 2.0), u);
    const auto k3 = human_derivative(add(s, k2, dt / 2.0), u);
    const auto k4 = human_derivative(add(s, k3, dt), u);
    HumanState out;
    out.x = s.x + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    out.y = s.y + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    out.v = s.v + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
    out.psi = wrap_angle(s.psi + dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]));
    out.v = std::max(out.v, 0.0);
    return out;
}

RobotState rk4_robot_step(const RobotState& s, const RobotAction& u, double dt,
                          const VehicleParams& p) {
    const auto add = [](const RobotState& q, const std::array<double, 4>& d, double h) {
        return RobotState{q.x + h * d[0], q.y + h * d[1], q.v + h * d[2], q.psi + h * d[3]};
    };
    const auto k1 = robot_derivative(s, u, p);
    const auto k2 = robot_derivative(add(s, k1, dt / 2.0), u, p);
    const auto k3 = robot_derivative(add(s, k2, dt / 2.0), u, p);
    const auto k4 = robot_derivative(add(s, k3, dt), u, p);
    RobotState out;
    out.x = s.x + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    out.y = s.y + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    out.v = s.v + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
    out.psi = wrap_angle(s.psi + dt / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]));
    out.v = std::max(out.v, 0.0);
    return out;
}

// ---------------------------------------------------------------------------
// Human sources

ReplaySource::ReplaySource(Trajectory traj) : traj_(std::move(traj)) {
    traj_.validate();
    psi_ = trajectory_headings(traj_);
    actions_ = extract_actions(traj_);
}

HumanState ReplaySource::state_at(double t) const {
    const auto& s = traj_.samples;
    const int n = static_cast<int>(s.size());
    const double t0 = s.front().t;
    const double dt = traj_.dt();
    const double u = (t - t0) / dt;
    const long k = std::lround(u);
    if (k >= 0 && k < n && t == s[static_cast<std::size_t>(k)].t) {
        const auto& e = s[static_cast<std::size_t>(k)];
        return {e.x, e.y, e.v, psi_[static_cast<std::size_t>(k)]};
    }
    if (t >= s.back().t) {
        // past the recorded span: continue at the final speed and heading
        ++extrapolations_;
        const auto& e = s.back();
        const double ps = psi_.back();
        const double gap = t - e.t;
        return {e.x + e.v * std::cos(ps) * gap, e.y + e.v * std::sin(ps) * gap, e.v, ps};
    }
    if (t <= t0) return {s.front().x, s.front().y, s.front().v, psi_.front()};
    const int i = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
    const double f = u - i;
    const auto& a = s[static_cast<std::size_t>(i)];
    const auto& b = s[static_cast<std::size_t>(i) + 1];
    const double psi = wrap_angle(psi_[i] + f * wrap_angle(psi_[i + 1] - psi_[i]));
    return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y), a.v + f * (b.v - a.v), psi};
}

HumanAction ReplaySource::action_at(double t) const {
    const auto& s = traj_.samples;
    if (actions_.empty() || t >= s.back().t) return {0.0, 0.0};
    const double u = (t - s.front().t) / traj_.dt();
    const int n = static_cast<int>(s.size());
    const int step = std::clamp(static_cast<int>(std::floor(u)), 1, n - 2);
    const auto& a = actions_[static_cast<std::size_t>(step - 1)];
    return {a.a, a.omega};
}

Trajectory sample_mode_trajectory(const HumanState& start, const ActionBounds& rect,
                                  std::uint64_t seed, double duration, double step,
                                  double hold_s) {
    if (!(step > 0.0) || !(duration > 0.0) || !(hold_s > 0.0))
        throw std::invalid_argument("sample_mode_trajectory: nonpositive duration, step, or hold");
    const int n = static_cast<int>(std::ceil(duration / step - 1e-9));
    const int draws = static_cast<int>(std::ceil(duration / hold_s - 1e-9));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> da(rect.a.lo, rect.a.hi);
    std::uniform_real_distribution<double> dw(rect.omega.lo, rect.omega.hi);
    std::vector<HumanAction> acts(static_cast<std::size_t>(std::max(draws, 1)));
    for (auto& a : acts) {
        a.a = da(rng);
        a.omega = dw(rng);
    }
    HumanState h = start;
    Trajectory out;
    out.samples.reserve(static_cast<std::size_t>(n) + 1);
    out.samples.push_back({0.0, h.x, h.y, h.v});
    for (int k = 0; k < n; ++k) {
        const double t = k * step;
        const int idx =
            std::min(static_cast<int>(std::floor(t / hold_s + 1e-9)), static_cast<int>(acts.size()) - 1);
        h = rk4_human_step(h, acts[static_cast<std::size_t>(idx)], step);
        out.samples.push_back({(k + 1) * step, h.x, h.y, h.v});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scenario

Policy policy_from_string(const std::string& name) {
    if (name == "default") return Policy::nominal_only;
    if (name == "reach_nopred") return Policy::reach_nopred;
    if (name == "reach_pred") return Policy::reach_pred;
    throw std::invalid_argument("unknown policy '" + name +
                                "' (expected default, reach_nopred, or reach_pred)");
}

std::string policy_to_string(Policy p) {
    switch (p) {
        case Policy::nominal_only: return "default";
        case Policy::reach_nopred: return "reach_nopred";
        case Policy::reach_pred: return "reach_pred";
    }
    return "default";
}

int Scenario::step_count() const {
    const long long n = std::llround(duration / step);
    if (n < 1 || std::abs(static_cast<double>(n) * step - duration) > 1e-9 * std::max(1.0, duration))
        throw std::invalid_argument("scenario: step must divide duration evenly");
    return static_cast<int>(n);
}

void Scenario::validate() const {
    path.validate();
    if (!(step > 0.0)) throw std::invalid_argument("scenario: step must be positive");
    if (!(duration > 0.0)) throw std::invalid_argument("scenario: duration must be positive");
    (void)step_count();
    if (start_offsets.empty()) throw std::invalid_argument("scenario: need at least one start offset");
    if (margin < 0.0) throw std::invalid_argument("scenario: margin must be nonnegative");
    if (human.kind == HumanSource::Kind::replay) human.replay.validate();
}

std::vector<CurbRect> load_curb_map(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("curb map: cannot open " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("curb map: parse error in " + file.string() + ": " + e.what());
    }
    std::vector<CurbRect> rects;
    for (const auto& r : j.at("rects")) {
        if (!r.is_array() || r.size() != 4)
            throw std::runtime_error("curb map: each rect must be [x0, y0, x1, y1]");
        rects.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                         r[3].get<double>()});
    }
    return rects;
}

void save_curb_map(const std::filesystem::path& file, const std::vector<CurbRect>& rects) {
    nlohmann::json j;
    j["rects"] = nlohmann::json::array();
    for (const auto& r : rects) j["rects"].push_back({r.x0, r.y0, r.x1, r.y1});
    std::ofstream out(file);
    if (!out) throw std::runtime_error("curb map: cannot write " + file.string());
    out << j.dump(2) << "\n";
}

Scenario load_scenario(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("scenario: cannot open " + file.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error("scenario: parse error in " + file.string() + ": " + e.what());
    }
    const auto resolve = [&](const std::filesystem::path& p) {
        return p.is_absolute() ? p : file.parent_path() / p;
    };
    Scenario sc;
    try {
        for (const auto& w : j.at("robot_path")) {
            if (!w.is_array() || w.size() != 2)
                throw std::runtime_error("robot_path entries must be [x, y]");
            sc.path.waypoints.push_back({w[0].get<double>(), w[1].get<double>()});
        }
        sc.path.target_speed = j.value("target_speed", 2.0);
        if (j.contains("start_offsets"))
            sc.start_offsets = j.at("start_offsets").get<std::vector<double>>();
        const auto& h = j.at("human");
        if (h.contains("replay")) {
            sc.human.kind = HumanSource::Kind::replay;
            sc.human.replay_file = resolve(h.at("replay").get<std::string>());
            sc.human.replay = load_trajectory_csv(sc.human.replay_file);
        } else if (h.contains("sampled")) {
            const auto& sm = h.at("sampled");
            sc.human.kind = HumanSource::Kind::sampled;
            sc.human.mode = sm.at("mode").get<int>();
            sc.human.seed = sm.at("seed").get<std::uint64_t>();
            const auto& st = sm.at("start");
            if (!st.is_array() || st.size() != 4)
                throw std::runtime_error("sampled human start must be [x, y, v, psi]");
            sc.human.start = {st[0].get<double>(), st[1].get<double>(), st[2].get<double>(),
                              st[3].get<double>()};
        } else {
            throw std::runtime_error("human must declare either replay or sampled");
        }
        if (j.contains("curb_map")) {
            sc.curb_map = resolve(j.at("curb_map").get<std::string>());
            sc.curbs = load_curb_map(sc.curb_map);
        }
        sc.duration = j.value("duration", 20.0);
        sc.step = j.value("step", 0.1);
        sc.margin = j.value("margin", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("scenario: bad schema in " + file.string() + ": " + e.what());
    }
    sc.validate();
    return sc;
}

void save_scenario(const std::filesystem::path& file, const Scenario& sc) {
    nlohmann::json j;
    j["robot_path"] = nlohmann::json::array();
    for (const auto& w : sc.path.waypoints) j["robot_path"].push_back({w[0], w[1]});
    j["target_speed"] = sc.path.target_speed;
    j["start_offsets"] = sc.start_offsets;
    if (sc.human.kind == HumanSource::Kind::replay) {
        j["human"]["replay"] = sc.human.replay_file.string();
    } else {
        j["human"]["sampled"]["mode"] = sc.human.mode;
        j["human"]["sampled"]["seed"] = sc.human.seed;
        j["human"]["sampled"]["start"] = {sc.human.start.x, sc.human.start.y, sc.human.start.v,
                                          sc.human.start.psi};
    }
    if (!sc.curb_map.empty()) j["curb_map"] = sc.curb_map.string();
    j["duration"] = sc.duration;
    j["step"] = sc.step;
    j["margin"] = sc.margin;
    std::ofstream out(file);
    if (!out) throw std::runtime_error("scenario: cannot write " + file.string());
    out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Encounter simulation

namespace {

bool inside_box(const Grid& g, const double* q) {
    const auto& axes = g.spec().axes;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i].periodic) continue;
        if (q[i] < axes[i].lo || q[i] > axes[i].hi) return false;
    }
    return true;
}

Trajectory prediction_window(const ReplaySource& human, double t, double dt) {
    Trajectory w;
    const int n = static_cast<int>(std::llround(kPredictLookahead / dt));
    w.samples.reserve(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) {
        const double tj = t + j * dt;
        const HumanState s = human.state_at(tj);
        w.samples.push_back({tj, s.x, s.y, s.v});
    }
    return w;
}

const char* branch_name(FilterBranch b) {
    switch (b) {
        case FilterBranch::nominal: return "nominal";
        case FilterBranch::avoid_car: return "avoid_car";
        case FilterBranch::avoid_curb: return "avoid_curb";
    }
    return "nominal";
}

}  // namespace

TrialResult run_encounter(const Scenario& sc, double start_offset, Policy policy,
                          const SafetyBundle* bundle, const ModeSet* modes) {
    sc.validate();
    if (policy != Policy::nominal_only && bundle == nullptr)
        throw std::runtime_error("run_encounter: reachability policies need a safety bundle");
    if (policy == Policy::reach_pred && modes == nullptr)
        throw std::runtime_error("run_encounter: reach_pred needs a mode set");
    if (sc.human.kind == HumanSource::Kind::sampled && modes == nullptr)
        throw std::runtime_error("run_encounter: a sampled human needs a mode set");

    const double dt = sc.step;
    const int n_steps = sc.step_count();
    const int cadence = std::max(1, static_cast<int>(std::llround(1.0 / dt)));

    // Materialize the human's motion for the whole run plus the prediction
    // lookahead, so prediction windows read the same future the replay plays.
    Trajectory htraj;
    if (sc.human.kind == HumanSource::Kind::replay) {
        htraj = sc.human.replay;
    } else {
        ActionBounds rect;
        if (sc.human.mode < 0) {
            rect = modes->physical;
        } else {
            const DrivingMode* found = nullptr;
            for (const auto& dm : modes->modes)
                if (dm.id == sc.human.mode) found = &dm;
            if (found == nullptr)
                throw std::runtime_error("run_encounter: scenario names unknown mode " +
                                         std::to_string(sc.human.mode));
            rect = found->bounds;
        }
        htraj = sample_mode_trajectory(sc.human.start, rect, sc.human.seed,
                                       sc.duration + kPredictLookahead + 1.0, dt);
    }
    ReplaySource human(std::move(htraj));

    const VehicleParams veh = bundle != nullptr ? bundle->vehicle : VehicleParams{};
    const RobotBounds rb = bundle != nullptr ? bundle->robot : RobotBounds{};

    RobotState robot;
    {
        const auto p0 = sc.path.point_at(start_offset);
        robot = {p0[0], p0[1], sc.path.target_speed, sc.path.heading_at(start_offset)};
    }
    PidState pid;
    int active_mode = -1;

    TrialResult tr;
    tr.log.reserve(static_cast<std::size_t>(n_steps));
    SimMetrics& m = tr.metrics;
    double dev_sum = 0.0;
    const TargetRect target{};

    for (int k = 0; k < n_steps; ++k) {
        const double t = k * dt;
        const HumanState h = human.state_at(t);

        RobotAction nominal;
        nominal.delta = stanley_steering(robot, sc.path, kStanleyGain, rb.delta);
        nominal.a = pid_speed(robot.v, sc.path.target_speed, PidGains{}, pid, dt, rb.a);

        const RelativeState z = relative_state(robot, h);
        FilterDecision dec;
        dec.action = nominal;
        dec.v_car = kFarValue;
        dec.v_curb = kFarValue;
        if (policy != Policy::nominal_only) {
            if (policy == Policy::reach_pred && k % cadence == 0) {
                const Trajectory window = prediction_window(human, t, dt);
                if (window.samples.size() >= 3)
                    active_mode = switch_mode(classify_trajectory(window, modes->modes).probs);
            }
            const int mode = policy == Policy::reach_pred ? active_mode : -1;
            dec = hybrid_control(*bundle, mode, z, robot, nominal, sc.margin);
            const double q5[5] = {z.x, z.y, z.v_h, z.v_r, z.psi};
            if (!inside_box(*bundle->modes.at(mode).value.grid, q5)) ++m.clamped_lookups;
            if (bundle->curb.has_value()) {
                const double q4[4] = {robot.x, robot.y, robot.v, robot.psi};
                if (!inside_box(*bundle->curb->value.grid, q4)) ++m.clamped_lookups;
            }
        }

        StepRecord r;
        r.t = t;
        r.robot = robot;
        r.human = h;
        r.branch = dec.branch;
        r.mode = policy == Policy::nominal_only ? -1 : dec.active_mode;
        r.v_car = dec.v_car;
        r.v_curb = dec.v_curb;
        r.a_r = dec.action.a;
        r.delta_f = dec.action.delta;
        r.deviation = sc.path.project(robot.x, robot.y).distance;
        r.distance = std::hypot(robot.x - h.x, robot.y - h.y);
        tr.log.push_back(r);

        dev_sum += r.deviation;
        m.max_deviation = std::max(m.max_deviation, r.deviation);
        m.min_distance = std::min(m.min_distance, r.distance);
        if (r.distance <= 1.0) ++m.count_le_1;
        if (r.distance <= 0.5) ++m.count_le_05;
        switch (dec.branch) {
            case FilterBranch::nominal: ++m.count_nominal; break;
            case FilterBranch::avoid_car: ++m.count_car; break;
            case FilterBranch::avoid_curb: ++m.count_curb; break;
        }
        if (std::max(std::abs(z.x) - target.c1, std::abs(z.y) - target.c2) < 0.0)
            m.collided = true;

        robot = rk4_robot_step(robot, dec.action, dt, veh);
    }

    m.steps = n_steps;
    m.duration = sc.duration;
    m.avg_deviation = n_steps > 0 ? dev_sum / n_steps : 0.0;
    m.t_car = m.count_car * dt;
    m.t_curb = m.count_curb * dt;
    m.t_nominal = sc.duration - m.t_car - m.t_curb;
    m.extrapolated_human = human.extrapolations();
    return tr;
}

void save_step_log(const std::filesystem::path& file, const std::vector<StepRecord>& log) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("step log: cannot write " + file.string());
    out << "t,x_r,y_r,v_r,psi_r,x_h,y_h,v_h,psi_h,branch,mode,v_car,v_curb,a_r,delta_f,"
           "deviation,distance\n";
    out.precision(17);
    for (const auto& r : log) {
        out << r.t << ',' << r.robot.x << ',' << r.robot.y << ',' << r.robot.v << ','
            << r.robot.psi << ',' << r.human.x << ',' << r.human.y << ',' << r.human.v << ','
            << r.human.psi << ',' << branch_name(r.branch) << ',' << r.mode << ',' << r.v_car
            << ',' << r.v_curb << ',' << r.a_r << ',' << r.delta_f << ',' << r.deviation << ','
            << r.distance << '\n';
    }
}

}  // namespace reachgrid
