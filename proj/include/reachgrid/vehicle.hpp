#pragma once

#include <array>
#include <vector>

namespace reachgrid {

/// Wrap to [-pi, pi). Idempotent for values already in range.
double wrap_angle(double a);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return v >= lo && v <= hi; }
    double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
    double width() const { return hi - lo; }
};

/// Human car, unicycle model. Heading psi in radians, speed v in m/s.
struct HumanState {
    double x = 0.0, y = 0.0, v = 0.0, psi = 0.0;
};

/// Acceleration and turn rate.
struct HumanAction {
    double a = 0.0, omega = 0.0;
};

/// Robot car, kinematic bicycle referenced to the rear axle offset point.
struct RobotState {
    double x = 0.0, y = 0.0, v = 0.0, psi = 0.0;
};

/// Acceleration and front wheel steering angle.
struct RobotAction {
    double a = 0.0, delta = 0.0;
};

/// Human state expressed in the robot body frame. Field order matches the
/// derivative arrays used throughout: (x, y, psi, v_h, v_r).
struct RelativeState {
    double x = 0.0, y = 0.0, psi = 0.0, v_h = 0.0, v_r = 0.0;
};

struct ActionBounds {
    Interval a;
    Interval omega;
};

struct RobotBounds {
    Interval a;
    Interval delta;
};

struct VehicleParams {
    double l_f = 1.5;  // front axle to reference point, m
    double l_r = 1.5;  // rear axle to reference point, m
};

std::array<double, 4> human_derivative(const HumanState& s, const HumanAction& u);

/// Slip angle of the velocity vector at the reference point.
/// Requires |delta| < pi/2.
double beta_from_delta(double delta, const VehicleParams& p);

std::array<double, 4> robot_derivative(const RobotState& s, const RobotAction& u,
                                       const VehicleParams& p);

RelativeState relative_state(const RobotState& robot, const HumanState& human);

/// Relative dynamics d/dt (x, y, psi, v_h, v_r) under robot action u and
/// human action d. The positional coordinates rotate with the robot body
/// frame, which couples them to the steering choice.
std::array<double, 5> relative_derivative(const RelativeState& z, const RobotAction& u,
                                          const HumanAction& d, const VehicleParams& p);

/// Steering angle giving |psi_dot| = omega_limit at speed v_ref. The asin
/// argument is clamped just inside [-1, 1] so aggressive limits degrade to
/// the maximum kinematically meaningful angle instead of NaN.
double steering_limit_for_omega(double omega_limit, double v_ref, const VehicleParams& p);

/// Uniformly spaced steering candidates over the interval, endpoints
/// included. The candidate nearest zero is snapped to exactly 0 when the
/// interval contains it, and candidates are ordered by (|delta|, delta) so
/// ties during maximization resolve toward straight steering.
std::vector<double> steering_candidates(const Interval& delta, int count = 21);

/// Candidate with trig terms precomputed for Hamiltonian evaluation.
struct SteeringCandidate {
    double delta = 0.0;
    double sin_beta_over_lr = 0.0;
    double cos_beta = 1.0;
    double sin_beta = 0.0;
};

std::vector<SteeringCandidate> make_steering_set(const Interval& delta, const VehicleParams& p,
                                                 int count = 21);

struct OptimalInputs {
    RobotAction u;
    HumanAction d;
    double hamiltonian = 0.0;
};

/// Closed form argmax/argmin of grad . f(z, u, d) for the relative dynamics:
/// the robot maximizes, the human minimizes. Gradient order matches
/// RelativeState fields. Affine channels are bang-bang; steering is an
/// exhaustive scan over the candidate set. A channel whose gradient
/// coefficient is exactly zero takes the feasible action closest to zero.
OptimalInputs optimal_inputs(const RelativeState& z, const std::array<double, 5>& grad,
                             const RobotBounds& robot, const ActionBounds& human,
                             const VehicleParams& p,
                             const std::vector<SteeringCandidate>& steering);

}  // namespace reachgrid
