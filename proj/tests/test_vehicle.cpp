#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "reachgrid/vehicle.hpp"

using namespace reachgrid;

namespace {

constexpr double kPi = std::numbers::pi;

VehicleParams default_params() { return {1.5, 1.5}; }

RobotBounds default_robot() { return {{-4.0, 3.0}, {-0.6, 0.6}}; }

ActionBounds default_human() { return {{-4.0, 3.0}, {-0.5, 0.5}}; }

}  // namespace

TEST_CASE("wrap angle lands in the half open interval") {
    CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
    CHECK(wrap_angle(kPi) == doctest::Approx(-kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(-kPi));
    CHECK(wrap_angle(3 * kPi / 2) == doctest::Approx(-kPi / 2));
    CHECK(wrap_angle(-5 * kPi / 2) == doctest::Approx(-kPi / 2));
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 1000; ++i) {
        const double w = wrap_angle(u(rng));
        CHECK(w >= -kPi);
        CHECK(w < kPi);
        CHECK(wrap_angle(w) == w);
    }
}

TEST_CASE("human unicycle derivative") {
    auto d = human_derivative({0, 0, 2, 0}, {0, 0});
    CHECK(d[0] == doctest::Approx(2.0));
    CHECK(d[1] == doctest::Approx(0.0));
    CHECK(d[2] == doctest::Approx(0.0));
    CHECK(d[3] == doctest::Approx(0.0));

    d = human_derivative({0, 0, 2, kPi / 2}, {0, 0});
    CHECK(d[0] == doctest::Approx(0.0));
    CHECK(d[1] == doctest::Approx(2.0));

    d = human_derivative({0, 0, 2, 0}, {0.0, 0.2});
    CHECK(d[3] == doctest::Approx(0.2));
}

TEST_CASE("robot bicycle derivative") {
    const auto p = default_params();
    SUBCASE("straight steering moves along the heading") {
        auto d = robot_derivative({0, 0, 2, 0.3}, {1.5, 0.0}, p);
        CHECK(d[0] == doctest::Approx(2 * std::cos(0.3)));
        CHECK(d[1] == doctest::Approx(2 * std::sin(0.3)));
        CHECK(d[2] == doctest::Approx(1.5));  // acceleration, third slot
        CHECK(d[3] == doctest::Approx(0.0));  // yaw rate
    }
    SUBCASE("slip angle for equal axle split") {
        CHECK(beta_from_delta(0.4, p) == doctest::Approx(std::atan(0.5 * std::tan(0.4))));
        CHECK(beta_from_delta(-0.4, p) == doctest::Approx(-std::atan(0.5 * std::tan(0.4))));
    }
    SUBCASE("steering singularity rejected") {
        CHECK_THROWS(beta_from_delta(kPi / 2, p));
        CHECK_THROWS(robot_derivative({0, 0, 1, 0}, {0.0, 1.6}, p));
    }
    SUBCASE("direct numbers") {
        auto d = robot_derivative({5, -2, 2, 0}, {1.5, 0.0}, p);
        CHECK(d[0] == doctest::Approx(2.0));
        CHECK(d[1] == doctest::Approx(0.0));
        CHECK(d[2] == doctest::Approx(1.5));
        CHECK(d[3] == doctest::Approx(0.0));
    }
}

TEST_CASE("relative state transform") {
    SUBCASE("identical poses collapse to the origin") {
        auto z = relative_state({1, 2, 1.5, 0.7}, {1, 2, 3.0, 0.7});
        CHECK(z.x == doctest::Approx(0.0));
        CHECK(z.y == doctest::Approx(0.0));
        CHECK(z.psi == doctest::Approx(0.0));
        CHECK(z.v_h == doctest::Approx(3.0));
        CHECK(z.v_r == doctest::Approx(1.5));
    }
    SUBCASE("zero heading is pure translation") {
        auto z = relative_state({1, 2, 1, 0.0}, {4, 6, 2, 0.3});
        CHECK(z.x == doctest::Approx(3.0));
        CHECK(z.y == doctest::Approx(4.0));
        CHECK(z.psi == doctest::Approx(0.3));
    }
    SUBCASE("quarter turn maps left offset to forward") {
        auto z = relative_state({0, 0, 1, kPi / 2}, {0, 1, 2, kPi / 2});
        CHECK(z.x == doctest::Approx(1.0));
        CHECK(z.y == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("relative derivative basics") {
    const auto p = default_params();
    SUBCASE("rest is a fixed point") {
        auto d = relative_derivative({0.5, -1.0, 0.2, 0.0, 0.0}, {0, 0}, {0, 0}, p);
        for (double v : d) CHECK(v == doctest::Approx(0.0));
    }
    SUBCASE("turn rate enters the heading row directly") {
        auto d = relative_derivative({0, 0, 0, 1, 1}, {0.0, 0.0}, {0.0, 0.2}, p);
        CHECK(d[2] == doctest::Approx(0.2));
    }
}

// Integrate both cars over a short step, recompose the relative state, and
// compare the finite difference rate against the closed form. Halving the
// step should shrink the error at first order or better.
TEST_CASE("relative derivative matches the forward integration oracle") {
    const auto p = default_params();
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> upos(-10.0, 10.0);
    std::uniform_real_distribution<double> uang(-3.0, 3.0);
    std::uniform_real_distribution<double> uv(0.2, 8.0);
    std::uniform_real_distribution<double> ua(-3.0, 3.0);
    std::uniform_real_distribution<double> uo(-0.5, 0.5);
    std::uniform_real_distribution<double> ud(-0.6, 0.6);

    auto step_pair = [&](RobotState r, HumanState h, RobotAction ur, HumanAction uh, double dt) {
        auto dr = robot_derivative(r, ur, p);
        auto dh = human_derivative(h, uh);
        r.x += dt * dr[0];
        r.y += dt * dr[1];
        r.v += dt * dr[2];
        r.psi = wrap_angle(r.psi + dt * dr[3]);
        h.x += dt * dh[0];
        h.y += dt * dh[1];
        h.v += dt * dh[2];
        h.psi = wrap_angle(h.psi + dt * dh[3]);
        return relative_state(r, h);
    };

    for (int trial = 0; trial < 200; ++trial) {
        const RobotState r{upos(rng), upos(rng), uv(rng), uang(rng)};
        const HumanState h{upos(rng), upos(rng), uv(rng), uang(rng)};
        const RobotAction ur{ua(rng), ud(rng)};
        const HumanAction uh{ua(rng), uo(rng)};
        const RelativeState z0 = relative_state(r, h);
        const auto closed = relative_derivative(z0, ur, uh, p);

        auto fd_error = [&](double dt) {
            const RelativeState z1 = step_pair(r, h, ur, uh, dt);
            const double fd[5] = {(z1.x - z0.x) / dt, (z1.y - z0.y) / dt,
                                  wrap_angle(z1.psi - z0.psi) / dt, (z1.v_h - z0.v_h) / dt,
                                  (z1.v_r - z0.v_r) / dt};
            double err = 0.0;
            for (int i = 0; i < 5; ++i) err = std::max(err, std::abs(fd[i] - closed[i]));
            return err;
        };

        const double e1 = fd_error(1e-4);
        const double e2 = fd_error(5e-5);
        CHECK(e1 < 5e-3);
        if (e1 > 1e-9) CHECK(e2 < e1 * 0.75);
    }
}

TEST_CASE("steering limit matches the turn rate target") {
    const auto p = default_params();
    const double dmax = steering_limit_for_omega(0.5, 2.0, p);
    CHECK(dmax == doctest::Approx(std::atan(2.0 * std::tan(std::asin(0.375)))));
    // At the reference speed the resulting yaw rate reproduces the limit.
    const double beta = beta_from_delta(dmax, p);
    CHECK(2.0 / p.l_r * std::sin(beta) == doctest::Approx(0.5));
    // Absurd limits stay finite instead of NaN.
    const double big = steering_limit_for_omega(100.0, 0.5, p);
    CHECK(std::isfinite(big));
    CHECK_THROWS(steering_limit_for_omega(0.5, 0.0, p));
}

TEST_CASE("steering candidates include endpoints and exact zero") {
    auto c = steering_candidates({-0.6, 0.6}, 21);
    REQUIRE(c.size() == 21);
    bool has_lo = false, has_hi = false, has_zero = false;
    for (double d : c) {
        has_lo |= d == -0.6;
        has_hi |= d == 0.6;
        has_zero |= d == 0.0;
    }
    CHECK(has_lo);
    CHECK(has_hi);
    CHECK(has_zero);
    for (std::size_t i = 1; i < c.size(); ++i)
        CHECK(std::abs(c[i - 1]) <= std::abs(c[i]));  // tie break order

    auto off = steering_candidates({0.2, 0.8}, 5);
    for (double d : off) CHECK(d >= 0.2);
}

TEST_CASE("optimal inputs pick bang bang extremes by gradient sign") {
    const auto p = default_params();
    const auto rb = default_robot();
    const auto hb = default_human();
    const auto steer = make_steering_set(rb.delta, p);
    const RelativeState z{3.0, -2.0, 0.4, 5.0, 2.0};

    auto with_grad = [&](std::array<double, 5> g) {
        return optimal_inputs(z, g, rb, hb, p, steer);
    };

    CHECK(with_grad({0, 0, 0, 0, 1}).u.a == doctest::Approx(3.0));
    CHECK(with_grad({0, 0, 0, 0, -1}).u.a == doctest::Approx(-4.0));
    CHECK(with_grad({0, 0, 0, 1, 0}).d.a == doctest::Approx(-4.0));
    CHECK(with_grad({0, 0, 0, -1, 0}).d.a == doctest::Approx(3.0));
    CHECK(with_grad({0, 0, 1, 0, 0}).d.omega == doctest::Approx(-0.5));
    CHECK(with_grad({0, 0, -1, 0, 0}).d.omega == doctest::Approx(0.5));
}

TEST_CASE("zero gradient ties break to gentle inputs") {
    const auto p = default_params();
    const auto rb = default_robot();
    const auto hb = default_human();
    const auto steer = make_steering_set(rb.delta, p);
    const auto out = optimal_inputs({1, 1, 1, 3, 2}, {0, 0, 0, 0, 0}, rb, hb, p, steer);
    CHECK(out.hamiltonian == doctest::Approx(0.0));
    CHECK(out.u.a == doctest::Approx(0.0));
    CHECK(out.u.delta == doctest::Approx(0.0));
    CHECK(out.d.a == doctest::Approx(0.0));
    CHECK(out.d.omega == doctest::Approx(0.0));

    // Bounds that exclude zero clamp the tie toward it.
    const RobotBounds rb2{{1.0, 2.0}, {0.1, 0.5}};
    const ActionBounds hb2{{-3.0, -0.5}, {0.2, 0.4}};
    const auto steer2 = make_steering_set(rb2.delta, p);
    const auto out2 = optimal_inputs({1, 1, 1, 3, 0}, {0, 0, 0, 0, 0}, rb2, hb2, p, steer2);
    CHECK(out2.u.a == doctest::Approx(1.0));
    CHECK(out2.u.delta == doctest::Approx(0.1));
    CHECK(out2.d.a == doctest::Approx(-0.5));
    CHECK(out2.d.omega == doctest::Approx(0.2));
}

TEST_CASE("singleton input sets reduce to a plain directional derivative") {
    const auto p = default_params();
    const RobotBounds rb{{1.2, 1.2}, {0.3, 0.3}};
    const ActionBounds hb{{-0.7, -0.7}, {0.25, 0.25}};
    const auto steer = make_steering_set(rb.delta, p, 21);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 100; ++t) {
        const RelativeState z{u(rng) * 5, u(rng) * 5, u(rng), std::abs(u(rng)) * 3,
                              std::abs(u(rng)) * 2};
        const std::array<double, 5> g{u(rng), u(rng), u(rng), u(rng), u(rng)};
        const auto out = optimal_inputs(z, g, rb, hb, p, steer);
        const auto f = relative_derivative(z, {1.2, 0.3}, {-0.7, 0.25}, p);
        double dot = 0.0;
        dot += g[0] * f[0] + g[1] * f[1] + g[2] * f[2] + g[3] * f[3] + g[4] * f[4];
        CHECK(out.hamiltonian == doctest::Approx(dot).epsilon(1e-10));
    }
}

TEST_CASE("hamiltonian value is monotone in the input sets") {
    const auto p = default_params();
    const auto rb = default_robot();
    const auto hb = default_human();
    // 41 candidates over the doubled interval visit every candidate of the
    // base set plus extras, so the discrete max can only grow.
    const RobotBounds rb_big{{-6.0, 5.0}, {-1.2, 1.2}};
    const ActionBounds hb_big{{-6.0, 5.0}, {-1.0, 1.0}};
    const auto steer = make_steering_set(rb.delta, p);
    const auto steer_big = make_steering_set(rb_big.delta, p, 41);

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        const RelativeState z{10 * u(rng), 10 * u(rng), 3 * u(rng), 5 * std::abs(u(rng)),
                              3 * std::abs(u(rng))};
        const std::array<double, 5> g{u(rng), u(rng), u(rng), u(rng), u(rng)};
        const double base = optimal_inputs(z, g, rb, hb, p, steer).hamiltonian;
        const double more_control = optimal_inputs(z, g, rb_big, hb, p, steer_big).hamiltonian;
        const double more_disturb = optimal_inputs(z, g, rb, hb_big, p, steer).hamiltonian;
        CHECK(more_control >= base - 1e-9);
        CHECK(more_disturb <= base + 1e-12);
    }
}

TEST_CASE("chosen inputs achieve the reported hamiltonian") {
    const auto p = default_params();
    const auto rb = default_robot();
    const auto hb = default_human();
    const auto steer = make_steering_set(rb.delta, p);
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 300; ++t) {
        const RelativeState z{10 * u(rng), 10 * u(rng), 3 * u(rng), 5 * std::abs(u(rng)),
                              3 * std::abs(u(rng))};
        const std::array<double, 5> g{u(rng), u(rng), u(rng), u(rng), u(rng)};
        const auto out = optimal_inputs(z, g, rb, hb, p, steer);
        const auto f = relative_derivative(z, out.u, out.d, p);
        const double dot =
            g[0] * f[0] + g[1] * f[1] + g[2] * f[2] + g[3] * f[3] + g[4] * f[4];
        CHECK(out.hamiltonian == doctest::Approx(dot).epsilon(1e-9));
    }
}
