#include "reachgrid/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace reachgrid {

double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(a + std::numbers::pi, two_pi);
    if (w < 0.0) w += two_pi;
    return w - std::numbers::pi;
}

std::array<double, 4> human_derivative(const HumanState& s, const HumanAction& u) {
    return {s.v * std::cos(s.psi), s.v * std::sin(s.psi), u.a, u.omega};
}

double beta_from_delta(double delta, const VehicleParams& p) {
    if (std::abs(delta) >= std::numbers::pi / 2.0)
        throw std::invalid_argument("steering angle must satisfy |delta| < pi/2");
    return std::atan(p.l_r / (p.l_f + p.l_r) * std::tan(delta));
}

std::array<double, 4> robot_derivative(const RobotState& s, const RobotAction& u,
                                       const VehicleParams& p) {
    const double beta = beta_from_delta(u.delta, p);
    return {s.v * std::cos(s.psi + beta), s.v * std::sin(s.psi + beta), u.a,
            s.v / p.l_r * std::sin(beta)};
}

RelativeState relative_state(const RobotState& robot, const HumanState& human) {
    const double c = std::cos(robot.psi), s = std::sin(robot.psi);
    const double ex = human.x - robot.x, ey = human.y - robot.y;
    RelativeState z;
    z.x = c * ex + s * ey;
    z.y = -s * ex + c * ey;
    z.psi = wrap_angle(human.psi - robot.psi);
    z.v_h = human.v;
    z.v_r = robot.v;
    return z;
}

std::array<double, 5> relative_derivative(const RelativeState& z, const RobotAction& u,
                                          const HumanAction& d, const VehicleParams& p) {
    const double beta = beta_from_delta(u.delta, p);
    const double sb = std::sin(beta), cb = std::cos(beta);
    const double yaw = z.v_r / p.l_r * sb;
    return {yaw * z.y + z.v_h * std::cos(z.psi) - z.v_r * cb,
            -yaw * z.x + z.v_h * std::sin(z.psi) - z.v_r * sb,
            d.omega - yaw,
            d.a,
            u.a};
}

double steering_limit_for_omega(double omega_limit, double v_ref, const VehicleParams& p) {
    if (!(v_ref > 0.0)) throw std::invalid_argument("reference speed must be positive");
    double s = std::abs(omega_limit) * p.l_r / v_ref;
    s = std::min(s, 1.0 - 1e-12);
    const double beta = std::asin(s);
    return std::atan((p.l_f + p.l_r) / p.l_r * std::tan(beta));
}

std::vector<double> steering_candidates(const Interval& delta, int count) {
    if (count < 2) throw std::invalid_argument("need at least 2 steering candidates");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double step = delta.width() / (count - 1);
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = (i == count - 1) ? delta.hi : delta.lo + step * i;
    if (delta.contains(0.0)) {
        auto nearest = std::min_element(out.begin(), out.end(), [](double a, double b) {
            return std::abs(a) < std::abs(b);
        });
        *nearest = 0.0;
    }
    std::sort(out.begin(), out.end(), [](double a, double b) {
        const double aa = std::abs(a), ab = std::abs(b);
        return aa != ab ? aa < ab : a < b;
    });
    return out;
}

std::vector<SteeringCandidate> make_steering_set(const Interval& delta, const VehicleParams& p,
                                                 int count) {
    std::vector<SteeringCandidate> set;
    for (double d : steering_candidates(delta, count)) {
        const double beta = beta_from_delta(d, p);
        set.push_back({d, std::sin(beta) / p.l_r, std::cos(beta), std::sin(beta)});
    }
    return set;
}

namespace {

// Bang-bang extremum of c * a over an interval; at c == 0 take the feasible
// action nearest zero so ties produce gentle inputs.
double affine_pick(double coeff, const Interval& iv, bool maximize) {
    if (coeff == 0.0) return iv.clamp(0.0);
    const bool take_hi = maximize ? coeff > 0.0 : coeff < 0.0;
    return take_hi ? iv.hi : iv.lo;
}

}  // namespace

OptimalInputs optimal_inputs(const RelativeState& z, const std::array<double, 5>& grad,
                             const RobotBounds& robot, const ActionBounds& human,
                             const VehicleParams& p,
                             const std::vector<SteeringCandidate>& steering) {
    const double px = grad[0], py = grad[1], ppsi = grad[2], pvh = grad[3], pvr = grad[4];

    OptimalInputs out;
    out.u.a = affine_pick(pvr, robot.a, true);
    out.d.a = affine_pick(pvh, human.a, false);
    out.d.omega = affine_pick(ppsi, human.omega, false);

    // Steering enters every rotating coordinate, so scan the candidate set.
    // g(delta) collects all the beta dependent terms of grad . f.
    const double rot = px * z.y - py * z.x - ppsi;
    double best_g = -std::numeric_limits<double>::infinity();
    const SteeringCandidate* best = nullptr;
    for (const auto& c : steering) {
        const double g = z.v_r * (c.sin_beta_over_lr * rot - px * c.cos_beta - py * c.sin_beta);
        if (g > best_g) {
            best_g = g;
            best = &c;
        }
    }
    if (!best) throw std::invalid_argument("empty steering candidate set");
    out.u.delta = best->delta;

    out.hamiltonian = best_g + z.v_h * (px * std::cos(z.psi) + py * std::sin(z.psi)) +
                      ppsi * out.d.omega + pvh * out.d.a + pvr * out.u.a;
    return out;
}

}  // namespace reachgrid
