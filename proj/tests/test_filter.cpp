#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "reachgrid/filter.hpp"
#include "reachgrid/game.hpp"
#include "reachgrid/rgvf.hpp"

using namespace reachgrid;

namespace {

// The human top speed sits below the robot's so the capture tube is finite
// and the solve converges honestly; a faster pursuer can always close from
// afar eventually, which would leave no truly safe far field to start from.
GridPtr small_rel_grid() {
    GridSpec s;
    s.axes = {{"x_rel", -12.0, 12.0, 21, false},
              {"y_rel", -12.0, 12.0, 21, false},
              {"v_h", 0.0, 3.0, 5, false},
              {"v_r", 0.0, 4.0, 5, false},
              {"psi_rel", -M_PI, M_PI, 12, true}};
    return make_grid(s);
}

RobotBounds test_robot() { return {{-4.0, 3.0}, {-0.68, 0.68}}; }
ActionBounds test_human() { return {{-4.0, 3.0}, {-0.5, 0.5}}; }

ModeTables synthetic_tables(GridPtr g, double value, double a, double delta) {
    return {make_field(g, "value", value),
            {make_field(g, "accel", a), make_field(g, "steer", delta)}};
}

SafetyBundle synthetic_bundle(double mode_value) {
    SafetyBundle b;
    b.modes.emplace(-1, synthetic_tables(small_rel_grid(), mode_value, -4.0, 0.25));
    b.robot = test_robot();
    return b;
}

double cell_diagonal(const Grid& g) {
    double s = 0.0;
    for (int d = 0; d < g.ndim(); ++d) s += g.spacing(d) * g.spacing(d);
    return std::sqrt(s);
}

struct SolvedCar {
    GridPtr grid;
    BrtResult res;
    ControlTables tables;
    RelativeCarGame game;
};

const SolvedCar& solved_car() {
    static const SolvedCar s = [] {
        auto g = small_rel_grid();
        RelativeCarGame game({}, test_robot(), test_human());
        SolverConfig cfg;
        cfg.horizon = 10.0;
        auto res = solve_brt(signed_distance_rect(g, {}), game, cfg);
        auto tables = extract_controller(res.value, game);
        return SolvedCar{g, std::move(res), std::move(tables), std::move(game)};
    }();
    return s;
}

struct SolvedCurb {
    GridPtr grid;
    BrtResult res;
    ControlTables tables;
    CurbGame game;
};

const SolvedCurb& solved_curb() {
    static const SolvedCurb s = [] {
        GridSpec spec;
        spec.axes = {{"x_r", -10.0, 10.0, 21, false},
                     {"y_r", -5.0, 5.0, 11, false},
                     {"v_r", 0.0, 5.0, 6, false},
                     {"psi_r", -M_PI, M_PI, 12, true}};
        auto g = make_grid(spec);
        CurbGame game({}, test_robot());
        const auto occ = rasterize_rects(*g, {{6.0, -5.0, 10.0, 5.0}});
        SolverConfig cfg;
        cfg.horizon = 10.0;
        auto res = solve_curb_brt(g, occ, game, cfg);
        auto tables = extract_controller(res.value, game);
        return SolvedCurb{g, std::move(res), std::move(tables), std::move(game)};
    }();
    return s;
}

// Worst-case human pursuit from the interpolated value gradient.
HumanAction adversarial_human(const SolvedCar& s, const RelativeState& z) {
    const std::array<double, 5> q{z.x, z.y, z.v_h, z.v_r, z.psi};
    std::array<double, 5> p{};
    for (int d = 0; d < 5; ++d) {
        const double h = 0.5 * s.grid->spacing(d);
        auto qp = q, qm = q;
        qp[d] += h;
        qm[d] -= h;
        p[d] = (interpolate(s.res.value, qp) - interpolate(s.res.value, qm)) / (2.0 * h);
    }
    return s.game.optimal(q.data(), p.data()).d;
}

}  // namespace

TEST_CASE("controller tables match per-node optimal actions and read back losslessly") {
    const auto& s = solved_car();
    const Grid& g = *s.grid;
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);

    std::array<int, 5> idx{};
    std::array<double, 5> z{}, p{}, q{};
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t flat = pick(rng);
        g.unflatten(flat, idx);
        for (int d = 0; d < 5; ++d) z[d] = g.nodes(d)[idx[d]];

        // Independent gradient: explicit neighbor indexing instead of the
        // extractor's stride walk.
        for (int d = 0; d < 5; ++d) {
            auto up = idx, dn = idx;
            const auto& ax = g.axis(d);
            double scale = 0.5;
            if (ax.periodic) {
                up[d] = (idx[d] + 1) % ax.count;
                dn[d] = (idx[d] + ax.count - 1) % ax.count;
            } else if (idx[d] == 0) {
                up[d] = 1;
                dn[d] = 0;
                scale = 1.0;
            } else if (idx[d] == ax.count - 1) {
                up[d] = idx[d];
                dn[d] = idx[d] - 1;
                scale = 1.0;
            } else {
                up[d] = idx[d] + 1;
                dn[d] = idx[d] - 1;
            }
            p[d] = scale *
                   (s.res.value.values[g.flat_index(up)] - s.res.value.values[g.flat_index(dn)]) /
                   g.spacing(d);
        }

        const RobotAction want = s.game.optimal(z.data(), p.data()).u;
        CHECK(s.tables.accel.values[flat] == want.a);
        CHECK(s.tables.steer.values[flat] == want.delta);

        for (int d = 0; d < 5; ++d) q[d] = z[d];
        CHECK(interpolate(s.tables.accel, q) == s.tables.accel.values[flat]);
        CHECK(interpolate(s.tables.steer, q) == s.tables.steer.values[flat]);
    }

    const auto rb = test_robot();
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(s.tables.accel.values[i] >= rb.a.lo);
        CHECK(s.tables.accel.values[i] <= rb.a.hi);
        CHECK(s.tables.steer.values[i] >= rb.delta.lo);
        CHECK(s.tables.steer.values[i] <= rb.delta.hi);
    }
}

TEST_CASE("controller extraction rejects a grid of the wrong dimension") {
    GridSpec spec;
    spec.axes = {{"x", 0.0, 1.0, 5, false}};
    auto f = make_field(make_grid(spec), "v");
    RelativeCarGame game({}, test_robot(), test_human());
    CHECK_THROWS(extract_controller(f, game));
}

TEST_CASE("safe states pass the nominal action through unchanged") {
    const auto b = synthetic_bundle(5.0);
    const RobotAction nominal{1.2345678912345, -0.3210987654321};
    const auto d = hybrid_control(b, -1, {1.0, 2.0, 0.3, 3.0, 2.0}, {0, 0, 0, 0}, nominal);
    CHECK(d.branch == FilterBranch::nominal);
    CHECK(d.action.a == nominal.a);
    CHECK(d.action.delta == nominal.delta);
    CHECK(d.v_car == 5.0);
    CHECK(d.v_curb == kFarValue);
    CHECK(d.active_mode == -1);
}

TEST_CASE("unsafe car value swaps in the tabulated avoidance action") {
    const auto b = synthetic_bundle(-1.0);
    const auto d = hybrid_control(b, -1, {0.5, 0.5, 0.0, 2.0, 1.0}, {0, 0, 0, 0}, {0.0, 0.0});
    CHECK(d.branch == FilterBranch::avoid_car);
    CHECK(d.action.a == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK(d.action.delta == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("avoidance actions are clamped into the robot's admissible set") {
    SafetyBundle b;
    b.modes.emplace(-1, synthetic_tables(small_rel_grid(), -1.0, -10.0, 2.0));
    b.robot = test_robot();
    const auto d = hybrid_control(b, -1, {0, 0, 0, 1, 1}, {0, 0, 0, 0}, {0.0, 0.0});
    CHECK(d.action.a == -4.0);
    CHECK(d.action.delta == 0.68);
}

TEST_CASE("the more urgent hazard wins and ties go to the car") {
    auto b = synthetic_bundle(2.0);
    GridSpec spec;
    spec.axes = {{"x_r", -10.0, 10.0, 5, false},
                 {"y_r", -5.0, 5.0, 5, false},
                 {"v_r", 0.0, 5.0, 4, false},
                 {"psi_r", -M_PI, M_PI, 8, true}};
    b.curb = synthetic_tables(make_grid(spec), -0.5, -2.0, -0.1);

    const auto d = hybrid_control(b, -1, {0, 0, 0, 1, 1}, {1, 1, 2, 0}, {0.5, 0.0});
    CHECK(d.branch == FilterBranch::avoid_curb);
    CHECK(d.action.a == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(d.action.delta == doctest::Approx(-0.1).epsilon(1e-14));
    CHECK(d.v_curb == -0.5);

    auto& mode = b.modes.at(-1);
    for (auto& v : mode.value.values) v = -0.5;  // equal urgency
    const auto tie = hybrid_control(b, -1, {0, 0, 0, 1, 1}, {1, 1, 2, 0}, {0.5, 0.0});
    CHECK(tie.branch == FilterBranch::avoid_car);
}

TEST_CASE("zero value sits on the override side of the default margin") {
    const auto b = synthetic_bundle(0.0);
    const auto d = hybrid_control(b, -1, {0, 0, 0, 1, 1}, {0, 0, 0, 0}, {0.7, 0.1});
    CHECK(d.branch == FilterBranch::avoid_car);
}

TEST_CASE("a positive margin widens the activation region") {
    const auto b = synthetic_bundle(0.3);
    const RobotAction nominal{0.7, 0.1};
    CHECK(hybrid_control(b, -1, {0, 0, 0, 1, 1}, {0, 0, 0, 0}, nominal).branch ==
          FilterBranch::nominal);
    CHECK(hybrid_control(b, -1, {0, 0, 0, 1, 1}, {0, 0, 0, 0}, nominal, 0.5).branch ==
          FilterBranch::avoid_car);
}

TEST_CASE("requesting a mode without tables is an error") {
    const auto b = synthetic_bundle(5.0);
    CHECK_THROWS(hybrid_control(b, 3, {0, 0, 0, 1, 1}, {0, 0, 0, 0}, {0.0, 0.0}));
}

TEST_CASE("mode switching takes the argmax with ties to the lower id") {
    CHECK(switch_mode({{0, 0.2}, {1, 0.5}, {2, 0.3}}) == 1);
    CHECK(switch_mode({{-1, 0.4}, {2, 0.4}, {4, 0.2}}) == -1);
    CHECK(switch_mode({{3, 1.0}}) == 3);
    CHECK_THROWS(switch_mode({}));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::map<int, double> probs;
        for (int id = -1; id < 5; ++id) probs[id] = u(rng);
        const double scale = u(rng) * 10.0;
        auto scaled = probs;
        for (auto& [id, p] : scaled) p *= scale;
        CHECK(switch_mode(probs) == switch_mode(scaled));
    }
}

TEST_CASE("safety probability multiplies validated per-interval terms") {
    CHECK(safety_probability({0.9, 0.8}) == doctest::Approx(0.72).epsilon(1e-15));
    CHECK(safety_probability({}) == 1.0);
    CHECK(safety_probability({1.0, 1.0, 1.0}) == 1.0);
    CHECK(safety_probability({0.0, 0.9}) == 0.0);
    CHECK_THROWS(safety_probability({1.1}));
    CHECK_THROWS(safety_probability({-0.01}));
    CHECK_THROWS(safety_probability({std::nan("")}));
}

TEST_CASE("bundle directory roundtrips every table bitwise") {
    const auto& car = solved_car();
    const auto& curb = solved_curb();

    SafetyBundle b;
    b.modes.emplace(-1, ModeTables{car.res.value, car.tables});
    b.modes.emplace(1, synthetic_tables(car.grid, 3.5, -1.0, 0.1));
    b.curb = ModeTables{curb.res.value, curb.tables};
    b.bounds_used[-1] = test_human();
    b.bounds_used[1] = {{-0.5, 0.5}, {-0.05, 0.05}};
    b.robot = test_robot();
    b.solver.horizon = 10.0;

    const auto dir = std::filesystem::temp_directory_path() / "bundle_roundtrip";
    std::filesystem::remove_all(dir);
    save_bundle(dir, b);
    const auto back = load_bundle(dir);

    REQUIRE(back.modes.size() == 2);
    REQUIRE(back.curb.has_value());
    for (const auto& [id, t] : b.modes) {
        const auto& bt = back.modes.at(id);
        CHECK(bt.value.values == t.value.values);
        CHECK(bt.controls.accel.values == t.controls.accel.values);
        CHECK(bt.controls.steer.values == t.controls.steer.values);
    }
    CHECK(back.curb->value.values == b.curb->value.values);
    CHECK(back.bounds_used.at(1).a.lo == -0.5);
    CHECK(back.bounds_used.at(-1).omega.hi == 0.5);
    CHECK(back.robot.a.lo == -4.0);
    CHECK(back.robot.delta.hi == 0.68);
    CHECK(back.solver.horizon == 10.0);

    // Same relative queries answer identically through the reloaded bundle.
    const RelativeState z{3.0, 1.0, 2.5, 2.0, 1.2};
    const auto d1 = hybrid_control(b, -1, z, {0, 0, 1, 0}, {0.3, 0.0});
    const auto d2 = hybrid_control(back, -1, z, {0, 0, 1, 0}, {0.3, 0.0});
    CHECK(d1.v_car == d2.v_car);
    CHECK(d1.v_curb == d2.v_curb);
    CHECK(d1.action.a == d2.action.a);
    std::filesystem::remove_all(dir);
}

TEST_CASE("bundle loading rejects corruption and incompleteness") {
    const auto& car = solved_car();
    SafetyBundle b;
    b.modes.emplace(-1, ModeTables{car.res.value, car.tables});
    b.robot = test_robot();

    const auto dir = std::filesystem::temp_directory_path() / "bundle_reject";
    std::filesystem::remove_all(dir);
    save_bundle(dir, b);

    // Flip one payload byte: the manifest checksum catches the edit.
    {
        std::fstream f(dir / "mode_-1_value.rgvf",
                       std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(200);
        char c;
        f.seekg(200);
        f.get(c);
        f.seekp(200);
        f.put(static_cast<char>(c ^ 0x40));
    }
    CHECK_THROWS(load_bundle(dir));
    std::filesystem::remove_all(dir);

    CHECK_THROWS(load_bundle(std::filesystem::temp_directory_path() / "no_such_bundle"));

    SafetyBundle no_fallback;
    no_fallback.modes.emplace(2, synthetic_tables(small_rel_grid(), 1.0, 0.0, 0.0));
    CHECK_THROWS(save_bundle(dir, no_fallback));
}

TEST_CASE("filtered rollouts from safe states never reach the collision set") {
    const auto& s = solved_car();
    SafetyBundle b;
    b.modes.emplace(-1, ModeTables{s.res.value, s.tables});
    b.robot = test_robot();

    // Interpolating a bang-bang steering table across cells this coarse can
    // cancel to nearly straight, so the activation margin has to buy back
    // what the tabulated controller loses to resolution.
    const double diag = cell_diagonal(*s.grid);
    const double start_clearance = 2.0 * diag;
    const double margin = 2.0 * diag;
    const TargetRect target{};

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ux(-12.0, 12.0), upsi(-M_PI, M_PI), uvh(0.0, 3.0),
        uvr(0.0, 4.0);

    int overrides = 0;
    int done = 0;
    while (done < 1000) {
        RelativeState z{ux(rng), ux(rng), upsi(rng), uvh(rng), uvr(rng)};
        const std::array<double, 5> q{z.x, z.y, z.v_h, z.v_r, z.psi};
        if (interpolate(s.res.value, q) <= start_clearance) continue;
        ++done;

        for (int step = 0; step < 200; ++step) {
            const auto dec = hybrid_control(b, -1, z, {0, 0, 0, 0}, {0.0, 0.0}, margin);
            if (dec.branch != FilterBranch::nominal) ++overrides;
            const HumanAction dh = adversarial_human(s, z);

            const double dt = 0.05;
            const auto f = [&](const RelativeState& y) {
                return relative_derivative(y, dec.action, dh, {});
            };
            const auto add = [](const RelativeState& y, const std::array<double, 5>& k,
                                double h) {
                return RelativeState{y.x + h * k[0], y.y + h * k[1], y.psi + h * k[2],
                                     y.v_h + h * k[3], y.v_r + h * k[4]};
            };
            const auto k1 = f(z);
            const auto k2 = f(add(z, k1, dt / 2));
            const auto k3 = f(add(z, k2, dt / 2));
            const auto k4 = f(add(z, k3, dt));
            z.x += dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
            z.y += dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
            z.psi = wrap_angle(z.psi + dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]));
            z.v_h = std::clamp(z.v_h + dt / 6 * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3]), 0.0, 3.0);
            z.v_r = std::clamp(z.v_r + dt / 6 * (k1[4] + 2 * k2[4] + 2 * k3[4] + k4[4]), 0.0, 4.0);

            const double sd = std::max(std::abs(z.x) - target.c1, std::abs(z.y) - target.c2);
            REQUIRE(sd >= 0.0);
        }
    }
    CHECK(overrides > 0);
}

TEST_CASE("curb field orders states by braking and steering feasibility") {
    const auto& s = solved_curb();

    // Heading straight at the wall: more clearance is never worse.
    double prev = -1e300;
    for (double x = 4.0; x >= -8.0; x -= 2.0) {
        const double v = interpolate(s.res.value, std::array<double, 4>{x, 0.0, 4.0, 0.0});
        CHECK(v >= prev - 1e-9);
        prev = v;
    }

    // More speed toward the wall is never better.
    const double slow = interpolate(s.res.value, std::array<double, 4>{2.0, 0.0, 1.0, 0.0});
    const double fast = interpolate(s.res.value, std::array<double, 4>{2.0, 0.0, 5.0, 0.0});
    CHECK(slow >= fast);

    // One meter of clearance at full speed is beyond both braking and the
    // minimum turn; eleven meters is plenty.
    CHECK(interpolate(s.res.value, std::array<double, 4>{5.0, 0.0, 5.0, 0.0}) < 0.0);
    CHECK(interpolate(s.res.value, std::array<double, 4>{-5.0, 0.0, 5.0, 0.0}) > 0.0);

    // Driving away from the wall with the whole domain ahead is safe.
    CHECK(interpolate(s.res.value, std::array<double, 4>{-8.0, 0.0, 3.0, M_PI}) > 0.0);
}

TEST_CASE("curb avoidance rollouts stop or steer clear of the occupied strip") {
    const auto& s = solved_curb();
    const double diag = cell_diagonal(*s.grid);
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ux(-10.0, 10.0), uy(-5.0, 5.0), uv(0.0, 5.0),
        upsi(-M_PI, M_PI);

    int overrides = 0;
    int done = 0;
    while (done < 200) {
        RobotState r{ux(rng), uy(rng), uv(rng), upsi(rng)};
        const std::array<double, 4> q{r.x, r.y, r.v, r.psi};
        if (interpolate(s.res.value, q) <= 2.0 * diag) continue;
        ++done;

        for (int step = 0; step < 100; ++step) {
            const std::array<double, 4> qq{r.x, r.y, r.v, r.psi};
            RobotAction u{0.0, 0.0};  // hold course, possibly straight at the wall
            if (interpolate(s.res.value, qq) <= diag) {
                u.a = interpolate(s.tables.accel, qq);
                u.delta = interpolate(s.tables.steer, qq);
                ++overrides;
            }
            const double dt = 0.1;
            const auto f = [&](const RobotState& y) { return robot_derivative(y, u, {}); };
            const auto add = [](const RobotState& y, const std::array<double, 4>& k, double h) {
                return RobotState{y.x + h * k[0], y.y + h * k[1], y.v + h * k[2],
                                  y.psi + h * k[3]};
            };
            const auto k1 = f(r);
            const auto k2 = f(add(r, k1, dt / 2));
            const auto k3 = f(add(r, k2, dt / 2));
            const auto k4 = f(add(r, k3, dt));
            r.x += dt / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
            r.y += dt / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
            r.v = std::clamp(r.v + dt / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]), 0.0, 5.0);
            r.psi = wrap_angle(r.psi + dt / 6 * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3]));

            REQUIRE(r.x < 6.0);
        }
    }
    CHECK(overrides > 0);
}
