#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "reachgrid/grid.hpp"
#include "reachgrid/vehicle.hpp"

namespace reachgrid {

// Dynamics adapters consumed by the reachability solver. Each one exposes,
// for states and gradients in the storage order of its grid:
//   static constexpr int kDim
//   void bind(const Grid&)                      once per solve, may cache
//   double hamiltonian(idx, z, p) const         max over robot, min over human
//   std::array<double, kDim> alphas(const Grid&) per axis bound on |f_i|
// The car games also expose optimal(z, p) for controller extraction.

namespace detail {

inline double max_abs(const Interval& iv) { return std::max(std::abs(iv.lo), std::abs(iv.hi)); }

inline double axis_max_abs(const Grid& g, int d) {
    const auto& ax = g.axis(d);
    return std::max(std::abs(ax.lo), std::abs(ax.hi));
}

// Steering candidates split into parallel arrays so the per node max over
// candidates vectorizes.
struct SteeringSoA {
    std::vector<double> sbl, cb, sb;  // sin(beta)/l_r, cos(beta), sin(beta)
    std::vector<SteeringCandidate> set;

    void build(const Interval& delta, const VehicleParams& p, int count) {
        set = make_steering_set(delta, p, count);
        sbl.clear();
        cb.clear();
        sb.clear();
        for (const auto& c : set) {
            sbl.push_back(c.sin_beta_over_lr);
            cb.push_back(c.cos_beta);
            sb.push_back(c.sin_beta);
        }
    }

    double max_sin_beta() const {
        double m = 0.0;
        for (double v : sb) m = std::max(m, std::abs(v));
        return m;
    }

    // Largest of grad . f_beta over the candidate set, for unit v_r.
    double best_gain(double rot, double px, double py) const {
        const std::size_t n = sbl.size();
        double best = sbl[0] * rot - px * cb[0] - py * sb[0];
        for (std::size_t j = 1; j < n; ++j) {
            const double g = sbl[j] * rot - px * cb[j] - py * sb[j];
            best = g > best ? g : best;
        }
        return best;
    }
};

inline void check_axes(const Grid& g, std::initializer_list<const char*> names) {
    if (g.ndim() != static_cast<int>(names.size()))
        throw std::invalid_argument("grid dimension does not match dynamics");
    int d = 0;
    for (const char* n : names) {
        if (g.axis(d).name != n)
            throw std::invalid_argument(std::string("expected axis '") + n + "' at position " +
                                        std::to_string(d) + ", found '" + g.axis(d).name + "'");
        ++d;
    }
}

}  // namespace detail

/// Two car pursuit in the robot body frame. Grid axes, in storage order:
/// (x_rel, y_rel, v_h, v_r, psi_rel), psi_rel periodic and innermost.
class RelativeCarGame {
public:
    static constexpr int kDim = 5;

    RelativeCarGame(VehicleParams params, RobotBounds robot, ActionBounds human,
                    int steering_count = 21)
        : params_(params), robot_(robot), human_(human) {
        steer_.build(robot.delta, params, steering_count);
    }

    void bind(const Grid& g) {
        detail::check_axes(g, {"x_rel", "y_rel", "v_h", "v_r", "psi_rel"});
        if (g.axis(3).lo < 0.0)
            throw std::invalid_argument("robot speed axis must be nonnegative");
        const auto& psi = g.nodes(4);
        cpsi_.resize(psi.size());
        spsi_.resize(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) {
            cpsi_[i] = std::cos(psi[i]);
            spsi_[i] = std::sin(psi[i]);
        }
    }

    double hamiltonian(const int* idx, const double* z, const double* p) const {
        const double px = p[0], py = p[1], pvh = p[2], pvr = p[3], ppsi = p[4];
        const double vh = z[2], vr = z[3];
        const double c = cpsi_[static_cast<std::size_t>(idx[4])];
        const double s = spsi_[static_cast<std::size_t>(idx[4])];
        const double rot = px * z[1] - py * z[0] - ppsi;
        double h = vr * steer_.best_gain(rot, px, py);
        h += vh * (px * c + py * s);
        h += ppsi > 0.0 ? ppsi * human_.omega.lo : ppsi * human_.omega.hi;
        h += pvh > 0.0 ? pvh * human_.a.lo : pvh * human_.a.hi;
        h += pvr > 0.0 ? pvr * robot_.a.hi : pvr * robot_.a.lo;
        return h;
    }

    OptimalInputs optimal(const double* z, const double* p) const {
        const RelativeState rel{z[0], z[1], z[4], z[2], z[3]};
        const std::array<double, 5> grad{p[0], p[1], p[4], p[2], p[3]};
        return optimal_inputs(rel, grad, robot_, human_, params_, steer_.set);
    }

    std::array<double, 5> alphas(const Grid& g) const {
        const double vh_max = detail::axis_max_abs(g, 2);
        const double vr_max = detail::axis_max_abs(g, 3);
        const double yaw_max = vr_max / params_.l_r * steer_.max_sin_beta();
        return {yaw_max * detail::axis_max_abs(g, 1) + vh_max + vr_max,
                yaw_max * detail::axis_max_abs(g, 0) + vh_max + vr_max * steer_.max_sin_beta(),
                detail::max_abs(human_.a),
                detail::max_abs(robot_.a),
                detail::max_abs(human_.omega) + yaw_max};
    }

    const VehicleParams& params() const { return params_; }
    const RobotBounds& robot_bounds() const { return robot_; }
    const ActionBounds& human_bounds() const { return human_; }

private:
    VehicleParams params_;
    RobotBounds robot_;
    ActionBounds human_;
    detail::SteeringSoA steer_;
    std::vector<double> cpsi_, spsi_;
};

/// Positional slice of the relative game with both speeds frozen. Axes:
/// (x_rel, y_rel, psi_rel).
class ReducedCarGame {
public:
    static constexpr int kDim = 3;

    ReducedCarGame(VehicleParams params, RobotBounds robot, ActionBounds human, double v_h,
                   double v_r, int steering_count = 21)
        : params_(params), robot_(robot), human_(human), v_h_(v_h), v_r_(v_r) {
        if (v_r < 0.0) throw std::invalid_argument("robot speed must be nonnegative");
        steer_.build(robot.delta, params, steering_count);
    }

    void bind(const Grid& g) {
        detail::check_axes(g, {"x_rel", "y_rel", "psi_rel"});
        const auto& psi = g.nodes(2);
        cpsi_.resize(psi.size());
        spsi_.resize(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) {
            cpsi_[i] = std::cos(psi[i]);
            spsi_[i] = std::sin(psi[i]);
        }
    }

    double hamiltonian(const int* idx, const double* z, const double* p) const {
        const double px = p[0], py = p[1], ppsi = p[2];
        const double c = cpsi_[static_cast<std::size_t>(idx[2])];
        const double s = spsi_[static_cast<std::size_t>(idx[2])];
        const double rot = px * z[1] - py * z[0] - ppsi;
        double h = v_r_ * steer_.best_gain(rot, px, py);
        h += v_h_ * (px * c + py * s);
        h += ppsi > 0.0 ? ppsi * human_.omega.lo : ppsi * human_.omega.hi;
        return h;
    }

    std::array<double, 3> alphas(const Grid& g) const {
        const double yaw_max = v_r_ / params_.l_r * steer_.max_sin_beta();
        return {yaw_max * detail::axis_max_abs(g, 1) + v_h_ + v_r_,
                yaw_max * detail::axis_max_abs(g, 0) + v_h_ + v_r_ * steer_.max_sin_beta(),
                detail::max_abs(human_.omega) + yaw_max};
    }

private:
    VehicleParams params_;
    RobotBounds robot_;
    ActionBounds human_;
    double v_h_, v_r_;
    detail::SteeringSoA steer_;
    std::vector<double> cpsi_, spsi_;
};

/// Robot alone against static obstacles, world frame. Axes:
/// (x_r, y_r, v_r, psi_r), psi_r periodic and innermost.
class CurbGame {
public:
    static constexpr int kDim = 4;

    CurbGame(VehicleParams params, RobotBounds robot, int steering_count = 21)
        : params_(params), robot_(robot) {
        steer_.build(robot.delta, params, steering_count);
    }

    void bind(const Grid& g) {
        detail::check_axes(g, {"x_r", "y_r", "v_r", "psi_r"});
        if (g.axis(2).lo < 0.0)
            throw std::invalid_argument("robot speed axis must be nonnegative");
        const auto& psi = g.nodes(3);
        cpsi_.resize(psi.size());
        spsi_.resize(psi.size());
        for (std::size_t i = 0; i < psi.size(); ++i) {
            cpsi_[i] = std::cos(psi[i]);
            spsi_[i] = std::sin(psi[i]);
        }
    }

    double hamiltonian(const int* idx, const double* z, const double* p) const {
        const double px = p[0], py = p[1], pv = p[2], ppsi = p[3];
        const double v = z[2];
        const double c = cpsi_[static_cast<std::size_t>(idx[3])];
        const double s = spsi_[static_cast<std::size_t>(idx[3])];
        // Rotate the positional gradient into the heading frame once, then
        // the candidate scan only touches the beta trig arrays.
        const double ca = px * c + py * s;
        const double sa = py * c - px * s + ppsi / params_.l_r;
        const std::size_t n = steer_.cb.size();
        double best = ca * steer_.cb[0] + sa * steer_.sb[0];
        for (std::size_t j = 1; j < n; ++j) {
            const double g = ca * steer_.cb[j] + sa * steer_.sb[j];
            best = g > best ? g : best;
        }
        double h = v * best;
        h += pv > 0.0 ? pv * robot_.a.hi : pv * robot_.a.lo;
        return h;
    }

    RobotAction optimal(const double* z, const double* p) const {
        const double px = p[0], py = p[1], pv = p[2], ppsi = p[3];
        const double c = std::cos(z[3]), s = std::sin(z[3]);
        const double ca = px * c + py * s;
        const double sa = py * c - px * s + ppsi / params_.l_r;
        RobotAction u;
        u.a = pv == 0.0 ? robot_.a.clamp(0.0) : (pv > 0.0 ? robot_.a.hi : robot_.a.lo);
        double best = -1.0 / 0.0;
        for (const auto& cand : steer_.set) {
            const double g = z[2] * (ca * cand.cos_beta + sa * cand.sin_beta);
            if (g > best) {
                best = g;
                u.delta = cand.delta;
            }
        }
        return u;
    }

    std::array<double, 4> alphas(const Grid& g) const {
        const double v_max = detail::axis_max_abs(g, 2);
        return {v_max, v_max, detail::max_abs(robot_.a),
                v_max / params_.l_r * steer_.max_sin_beta()};
    }

private:
    VehicleParams params_;
    RobotBounds robot_;
    detail::SteeringSoA steer_;
    std::vector<double> cpsi_, spsi_;
};

/// One dimensional integrator x_dot = u + d, u maximizing, d minimizing.
/// Small enough to check against pencil and paper.
class Interval1DGame {
public:
    static constexpr int kDim = 1;

    Interval1DGame(Interval u, Interval d) : u_(u), d_(d) {}

    void bind(const Grid&) {}

    double hamiltonian(const int*, const double*, const double* p) const {
        const double g = p[0];
        double h = g > 0.0 ? g * u_.hi : g * u_.lo;
        h += g > 0.0 ? g * d_.lo : g * d_.hi;
        return h;
    }

    std::array<double, 1> alphas(const Grid&) const {
        return {detail::max_abs(u_) + detail::max_abs(d_)};
    }

private:
    Interval u_, d_;
};

}  // namespace reachgrid
