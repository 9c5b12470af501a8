// Python surface for the toolkit: the mode pipeline, the vehicle math, and
// a one-dimensional solver entry point small enough for interactive use.
// Heavy solves and simulation batches stay on the CLI.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>

#include "reachgrid/game.hpp"
#include "reachgrid/grid.hpp"
#include "reachgrid/hji.hpp"
#include "reachgrid/modes.hpp"
#include "reachgrid/sim.hpp"
#include "reachgrid/vehicle.hpp"

namespace py = pybind11;
using namespace reachgrid;

namespace {

py::dict solve_interval_brt(double u_max, double d_max, double target_half, int nodes,
                            double extent, double horizon, double tolerance) {
    if (u_max <= 0.0 || d_max < 0.0 || target_half <= 0.0 || nodes < 3 || extent <= target_half)
        throw std::invalid_argument("solve_interval_brt: bad parameters");
    auto g = make_grid({{{"x", -extent, extent, nodes, false}}});
    ValueField terminal = make_field(g, "target");
    for (std::size_t i = 0; i < g->size(); ++i)
        terminal.values[i] = std::abs(g->nodes(0)[i]) - target_half;
    Interval1DGame game({-u_max, u_max}, {-d_max, d_max});
    SolverConfig cfg;
    cfg.horizon = horizon;
    cfg.tolerance = tolerance;
    cfg.threads = 1;
    const BrtResult res = solve_brt(terminal, game, cfg);

    const auto& xs = g->nodes(0);
    double zero = xs.back();
    for (std::size_t i = xs.size() / 2; i + 1 < xs.size(); ++i) {
        const double a = res.value.values[i], b = res.value.values[i + 1];
        if (a <= 0.0 && b > 0.0) {
            zero = xs[i] + (0.0 - a) / (b - a) * (xs[i + 1] - xs[i]);
            break;
        }
    }
    py::dict out;
    out["xs"] = std::vector<double>(xs.begin(), xs.end());
    out["values"] = res.value.values;
    out["converged"] = res.converged;
    out["iterations"] = res.iterations;
    out["final_change"] = res.final_change;
    out["dt"] = res.dt;
    out["zero_level"] = zero;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Reachability safety toolkit core";

    py::class_<Interval>(m, "Interval")
        .def(py::init<>())
        .def(py::init([](double lo, double hi) { return Interval{lo, hi}; }), py::arg("lo"),
             py::arg("hi"))
        .def_readwrite("lo", &Interval::lo)
        .def_readwrite("hi", &Interval::hi)
        .def("contains", &Interval::contains)
        .def("clamp", &Interval::clamp)
        .def("width", &Interval::width)
        .def("__repr__", [](const Interval& iv) {
            return "Interval(" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) + ")";
        });

    py::class_<ActionBounds>(m, "ActionBounds")
        .def(py::init<>())
        .def(py::init([](Interval a, Interval omega) { return ActionBounds{a, omega}; }),
             py::arg("a"), py::arg("omega"))
        .def_readwrite("a", &ActionBounds::a)
        .def_readwrite("omega", &ActionBounds::omega);

    py::class_<RobotBounds>(m, "RobotBounds")
        .def(py::init<>())
        .def(py::init([](Interval a, Interval delta) { return RobotBounds{a, delta}; }),
             py::arg("a"), py::arg("delta"))
        .def_readwrite("a", &RobotBounds::a)
        .def_readwrite("delta", &RobotBounds::delta);

    py::class_<VehicleParams>(m, "VehicleParams")
        .def(py::init<>())
        .def(py::init([](double l_f, double l_r) { return VehicleParams{l_f, l_r}; }),
             py::arg("l_f"), py::arg("l_r"))
        .def_readwrite("l_f", &VehicleParams::l_f)
        .def_readwrite("l_r", &VehicleParams::l_r);

    py::class_<HumanState>(m, "HumanState")
        .def(py::init<>())
        .def(py::init([](double x, double y, double v, double psi) {
                 return HumanState{x, y, v, psi};
             }),
             py::arg("x"), py::arg("y"), py::arg("v"), py::arg("psi"))
        .def_readwrite("x", &HumanState::x)
        .def_readwrite("y", &HumanState::y)
        .def_readwrite("v", &HumanState::v)
        .def_readwrite("psi", &HumanState::psi);

    py::class_<HumanAction>(m, "HumanAction")
        .def(py::init<>())
        .def(py::init([](double a, double omega) { return HumanAction{a, omega}; }),
             py::arg("a"), py::arg("omega"))
        .def_readwrite("a", &HumanAction::a)
        .def_readwrite("omega", &HumanAction::omega);

    py::class_<RobotState>(m, "RobotState")
        .def(py::init<>())
        .def(py::init([](double x, double y, double v, double psi) {
                 return RobotState{x, y, v, psi};
             }),
             py::arg("x"), py::arg("y"), py::arg("v"), py::arg("psi"))
        .def_readwrite("x", &RobotState::x)
        .def_readwrite("y", &RobotState::y)
        .def_readwrite("v", &RobotState::v)
        .def_readwrite("psi", &RobotState::psi);

    py::class_<RobotAction>(m, "RobotAction")
        .def(py::init<>())
        .def(py::init([](double a, double delta) { return RobotAction{a, delta}; }),
             py::arg("a"), py::arg("delta"))
        .def_readwrite("a", &RobotAction::a)
        .def_readwrite("delta", &RobotAction::delta);

    py::class_<RelativeState>(m, "RelativeState")
        .def(py::init<>())
        .def(py::init([](double x, double y, double psi, double v_h, double v_r) {
                 return RelativeState{x, y, psi, v_h, v_r};
             }),
             py::arg("x"), py::arg("y"), py::arg("psi"), py::arg("v_h"), py::arg("v_r"))
        .def_readwrite("x", &RelativeState::x)
        .def_readwrite("y", &RelativeState::y)
        .def_readwrite("psi", &RelativeState::psi)
        .def_readwrite("v_h", &RelativeState::v_h)
        .def_readwrite("v_r", &RelativeState::v_r);

    py::class_<TrajectorySample>(m, "TrajectorySample")
        .def(py::init<>())
        .def(py::init([](double t, double x, double y, double v) {
                 return TrajectorySample{t, x, y, v};
             }),
             py::arg("t"), py::arg("x"), py::arg("y"), py::arg("v"))
        .def_readwrite("t", &TrajectorySample::t)
        .def_readwrite("x", &TrajectorySample::x)
        .def_readwrite("y", &TrajectorySample::y)
        .def_readwrite("v", &TrajectorySample::v);

    py::class_<Trajectory>(m, "Trajectory")
        .def(py::init<>())
        .def_readwrite("samples", &Trajectory::samples)
        .def("dt", &Trajectory::dt)
        .def("validate", &Trajectory::validate);

    py::class_<ActionSample>(m, "ActionSample")
        .def(py::init<>())
        .def_readwrite("a", &ActionSample::a)
        .def_readwrite("omega", &ActionSample::omega)
        .def_readwrite("trajectory", &ActionSample::trajectory)
        .def_readwrite("step", &ActionSample::step);

    py::class_<NormalizationParams>(m, "NormalizationParams")
        .def(py::init<>())
        .def_readwrite("a_scale", &NormalizationParams::a_scale)
        .def_readwrite("omega_scale", &NormalizationParams::omega_scale);

    py::class_<DrivingMode>(m, "DrivingMode")
        .def(py::init<>())
        .def_readwrite("id", &DrivingMode::id)
        .def_readwrite("label", &DrivingMode::label)
        .def_readwrite("nominal", &DrivingMode::nominal)
        .def_readwrite("bounds", &DrivingMode::bounds);

    py::class_<ModeProbabilities>(m, "ModeProbabilities")
        .def(py::init<>())
        .def_readonly("probs", &ModeProbabilities::probs)
        .def_readonly("mode", &ModeProbabilities::mode)
        .def_readonly("p_mode", &ModeProbabilities::p_mode);

    py::class_<ModeSet>(m, "ModeSet")
        .def(py::init<>())
        .def_readwrite("modes", &ModeSet::modes)
        .def_readwrite("norm", &ModeSet::norm)
        .def_readwrite("physical", &ModeSet::physical);

    m.def("load_trajectory", [](const std::filesystem::path& p) { return load_trajectory_csv(p); },
          py::arg("path"), "Read a t,x,y,v trajectory; unparseable rows are skipped");
    m.def("save_trajectory", &save_trajectory_csv, py::arg("path"), py::arg("trajectory"));
    m.def("extract_actions", &extract_actions, py::arg("trajectory"), py::arg("trajectory_id") = 0,
          "Recover per-step (a, omega) from a position trace");
    m.def("default_mode_nominals",
          [] {
              const auto& n = default_mode_nominals();
              return std::vector<DrivingMode>(n.begin(), n.end());
          },
          "The six built-in behavior nominals");
    m.def("build_mode_set",
          [](const std::vector<ActionSample>& data, unsigned long long seed) {
              return build_mode_set(data, nullptr, seed);
          },
          py::arg("actions"), py::arg("seed") = 0,
          "Cluster the action dataset into the six modes plus physical limits");
    m.def("classify_action", &classify_action, py::arg("action"), py::arg("modes"));
    m.def("classify_trajectory", &classify_trajectory, py::arg("trajectory"), py::arg("modes"));
    m.def("load_modes", &load_modes_json, py::arg("path"));
    m.def("save_modes", &save_modes_json, py::arg("path"), py::arg("mode_set"));

    m.def("relative_state", &relative_state, py::arg("robot"), py::arg("human"),
          "Human pose expressed in the robot body frame");
    m.def("relative_derivative",
          [](const RelativeState& z, const RobotAction& u, const HumanAction& d,
             const VehicleParams& p) {
              const auto f = relative_derivative(z, u, d, p);
              return std::vector<double>(f.begin(), f.end());
          },
          py::arg("z"), py::arg("u"), py::arg("d"), py::arg("params"),
          "Time derivative of (x, y, psi, v_h, v_r)");
    m.def("rk4_robot_step", &rk4_robot_step, py::arg("state"), py::arg("action"), py::arg("h"),
          py::arg("params"));
    m.def("rk4_human_step", &rk4_human_step, py::arg("state"), py::arg("action"), py::arg("h"));
    m.def("steering_limit_for_omega", &steering_limit_for_omega, py::arg("omega_limit"),
          py::arg("v_ref"), py::arg("params"),
          "Front steering angle whose heading rate at v_ref matches omega_limit");

    m.def("solve_interval_brt", &solve_interval_brt, py::arg("u_max"), py::arg("d_max"),
          py::arg("target_half"), py::arg("nodes") = 401, py::arg("extent") = 4.0,
          py::arg("horizon") = 10.0, py::arg("tolerance") = 1e-3,
          "Backward reachable tube for dx/dt = u + d on an interval target");
}
