#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "reachgrid/config.hpp"
#include "reachgrid/filter.hpp"
#include "reachgrid/game.hpp"
#include "reachgrid/hji.hpp"
#include "reachgrid/modes.hpp"
#include "reachgrid/rgvf.hpp"
#include "reachgrid/sim.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace reachgrid;

namespace {

int fail_usage(const std::string& msg) {
    std::cerr << "usage error: " << msg << "\n";
    return 1;
}

int fail_data(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 2;
}

std::string timestamp_utc() {
    const std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_json_file(const fs::path& p, const json& j) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << j.dump(2) << "\n";
}

void save_action_csv(const fs::path& p, const std::vector<ActionSample>& rows) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << "a,omega,trajectory,step\n";
    out.precision(17);
    for (const auto& r : rows)
        out << r.a << ',' << r.omega << ',' << r.trajectory << ',' << r.step << '\n';
}

std::vector<ActionSample> load_action_csv(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::string line;
    if (!std::getline(in, line) || line != "a,omega,trajectory,step")
        throw std::runtime_error("bad action CSV header in " + p.string());
    std::vector<ActionSample> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ActionSample s;
        char comma;
        std::istringstream ss(line);
        if (!(ss >> s.a >> comma >> s.omega >> comma >> s.trajectory >> comma >> s.step))
            throw std::runtime_error("bad action CSV row in " + p.string() + ": " + line);
        rows.push_back(s);
    }
    return rows;
}

// Positive-side zero crossing of a 1D field by linear interpolation.
double zero_level_1d(const ValueField& f) {
    const auto& xs = f.grid->nodes(0);
    for (std::size_t i = xs.size() / 2; i + 1 < xs.size(); ++i) {
        const double a = f.values[i];
        const double b = f.values[i + 1];
        if (a <= 0.0 && b > 0.0) return xs[i] + (0.0 - a) / (b - a) * (xs[i + 1] - xs[i]);
    }
    return xs.back();
}

json solve_report_json(const std::string& target, const BrtResult& res, const Grid& g) {
    json alphas = json::array();
    for (const double a : res.alphas) alphas.push_back(a);
    json report;
    report["target"] = target;
    report["converged"] = res.converged;
    report["iterations"] = res.iterations;
    report["final_change"] = res.final_change;
    report["max_increase"] = res.max_increase;
    report["dt"] = res.dt;
    report["alphas"] = alphas;
    report["elapsed_seconds"] = res.elapsed_seconds;
    report["grid"] = json::parse(grid_spec_to_json_string(g.spec()));
    return report;
}

void emit_report(const RunConfig& cfg, const std::string& name, json report) {
    std::cout << report.dump(2) << "\n";
    report["metadata"] = {{"generated_at", timestamp_utc()}};
    write_json_file(cfg.output_dir / name, report);
}

json metrics_json(const SimMetrics& m, double offset, const std::string& log_name) {
    json j;
    j["start_offset"] = offset;
    j["log"] = log_name;
    j["steps"] = m.steps;
    j["count_le_05"] = m.count_le_05;
    j["count_le_1"] = m.count_le_1;
    j["avg_deviation"] = m.avg_deviation;
    j["max_deviation"] = m.max_deviation;
    j["min_distance"] = m.min_distance;
    j["t_car"] = m.t_car;
    j["t_curb"] = m.t_curb;
    j["t_nominal"] = m.t_nominal;
    j["collided"] = m.collided;
    j["duration"] = m.duration;
    j["clamped_lookups"] = m.clamped_lookups;
    j["extrapolated_human"] = m.extrapolated_human;
    return j;
}

// ---------------------------------------------------------------------------

int cmd_extract(const std::string& dir, const std::string& out_csv) {
    if (!fs::is_directory(dir)) return fail_data("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) return fail_data("no trajectory CSV files in " + dir);

    std::vector<ActionSample> all;
    int warnings = 0;
    int used = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        int skipped = 0;
        try {
            const Trajectory t = load_trajectory_csv(files[i], &skipped);
            if (skipped > 0) {
                std::cerr << "warning: " << files[i].string() << ": skipped " << skipped
                          << " malformed rows\n";
                warnings += skipped;
            }
            const auto rows = extract_actions(t, static_cast<int>(i));
            all.insert(all.end(), rows.begin(), rows.end());
            std::cout << "trajectory " << i << ": " << files[i].string() << " (" << rows.size()
                      << " rows)\n";
            ++used;
        } catch (const std::exception& e) {
            std::cerr << "warning: " << files[i].string() << ": " << e.what() << " (file skipped)\n";
            ++warnings;
        }
    }
    if (all.empty()) return fail_data("no usable action rows extracted");
    save_action_csv(out_csv, all);
    std::cout << "files: " << files.size() << "  used: " << used << "  rows: " << all.size()
              << "  warnings: " << warnings << "\n";
    return 0;
}

int cmd_cluster(const RunConfig& cfg, const std::string& csv, const std::string& out_json) {
    const auto rows = load_action_csv(csv);
    if (rows.size() < 6)
        return fail_data("need at least 6 action rows to form modes, got " +
                         std::to_string(rows.size()));
    ClusterResult cr;
    const ModeSet set = build_mode_set(rows, &cr, cfg.seed);
    save_modes_json(out_json, set);

    std::vector<int> sizes(set.modes.size(), 0);
    for (const int c : cr.assignment) {
        const int id = cr.cluster_mode[static_cast<std::size_t>(c)];
        for (std::size_t m = 0; m < set.modes.size(); ++m)
            if (set.modes[m].id == id) ++sizes[m];
    }
    std::cout << "mode  label         size  a_bounds              omega_bounds\n";
    for (std::size_t m = 0; m < set.modes.size(); ++m) {
        const auto& dm = set.modes[m];
        char line[160];
        std::snprintf(line, sizeof line, "%4d  %-12s %5d  [%+.4f, %+.4f]  [%+.4f, %+.4f]\n",
                      dm.id, dm.label.c_str(), sizes[m], dm.bounds.a.lo, dm.bounds.a.hi,
                      dm.bounds.omega.lo, dm.bounds.omega.hi);
        std::cout << line;
    }
    std::cout << "iterations: " << cr.iterations << "  empty-cluster repairs: " << cr.reseeds
              << "  inertia: " << cr.inertia << "\n";
    return 0;
}

struct ToyOpts {
    double u_max = 1.0;
    double d_max = 0.25;
    double target_half = 1.5;
    int nodes = 401;
    double extent = 4.0;
};

int solve_toy(const RunConfig& cfg, const ToyOpts& t) {
    if (t.nodes < 3 || !(t.extent > 0.0) || !(t.target_half > 0.0) ||
        t.target_half >= t.extent)
        return fail_usage("toy: need nodes >= 3 and 0 < target-half < extent");
    auto g = make_grid({{{"x", -t.extent, t.extent, t.nodes, false}}});
    ValueField terminal = make_field(g, "toy");
    for (std::size_t i = 0; i < g->size(); ++i)
        terminal.values[i] = std::abs(g->nodes(0)[i]) - t.target_half;
    Interval1DGame game({-t.u_max, t.u_max}, {-t.d_max, t.d_max});
    const BrtResult res = solve_brt(terminal, game, cfg.solver);

    json report = solve_report_json("toy", res, *g);
    report["tolerance"] = cfg.solver.tolerance;
    report["zero_level"] = zero_level_1d(res.value);
    const char* name = res.converged ? "toy_value.rgvf" : "toy_value.rgvf.unconverged";
    fs::create_directories(cfg.output_dir);
    write_rgvf(cfg.output_dir / name, res.value);
    report["field"] = name;
    emit_report(cfg, "solve_toy.json", report);
    if (!res.converged) {
        std::cerr << "solve did not converge within the horizon; partial field saved\n";
        return 3;
    }
    return 0;
}

int solve_mode(const RunConfig& cfg, int id) {
    if (cfg.modes_file.empty()) return fail_usage("mode solves need a modes_file in the config");
    if (cfg.bundle_dir.empty()) return fail_usage("mode solves need a bundle_dir in the config");
    const ModeSet set = load_modes_json(cfg.modes_file);
    ActionBounds hb;
    if (id < 0) {
        hb = set.physical;
    } else {
        const DrivingMode* found = nullptr;
        for (const auto& m : set.modes)
            if (m.id == id) found = &m;
        if (found == nullptr) {
            std::string known;
            for (const auto& m : set.modes) known += " " + std::to_string(m.id);
            return fail_data("mode " + std::to_string(id) + " not in " +
                             cfg.modes_file.string() + "; available:" + known);
        }
        hb = found->bounds;
    }

    auto g = make_grid(cfg.rel_grid);
    const ValueField terminal = signed_distance_rect(g, TargetRect{});
    RelativeCarGame game(cfg.vehicle, cfg.robot, hb);
    SolverConfig scfg = cfg.solver;
    scfg.threads = cfg.threads;
    BrtResult res = solve_brt(terminal, game, scfg);

    const std::string stem = "mode_" + std::to_string(id);
    json report = solve_report_json(stem, res, *g);
    report["tolerance"] = scfg.tolerance;
    fs::create_directories(cfg.bundle_dir);
    if (!res.converged) {
        write_rgvf(cfg.bundle_dir / (stem + "_value.rgvf.unconverged"), res.value);
        emit_report(cfg, "solve_" + stem + ".json", report);
        std::cerr << "solve did not converge within the horizon; partial field saved\n";
        return 3;
    }
    ControlTables tables = extract_controller(res.value, game);
    save_bundle_entry(cfg.bundle_dir, id, ModeTables{std::move(res.value), std::move(tables)}, hb,
                      cfg.robot, cfg.vehicle, scfg);
    fs::remove(cfg.bundle_dir / (stem + "_value.rgvf.unconverged"));
    emit_report(cfg, "solve_" + stem + ".json", report);
    return 0;
}

int solve_curbs(const RunConfig& cfg, const std::string& curb_map) {
    if (curb_map.empty()) return fail_usage("curb solves need --curb-map");
    if (cfg.bundle_dir.empty()) return fail_usage("curb solves need a bundle_dir in the config");
    const auto rects = load_curb_map(curb_map);
    auto g = make_grid(cfg.robot_grid);
    const auto occupied = rasterize_rects(*g, rects);
    CurbGame game(cfg.vehicle, cfg.robot);
    SolverConfig scfg = cfg.solver;
    scfg.threads = cfg.threads;
    BrtResult res = solve_curb_brt(g, occupied, game, scfg);

    json report = solve_report_json("curb", res, *g);
    report["tolerance"] = scfg.tolerance;
    fs::create_directories(cfg.bundle_dir);
    if (!res.converged) {
        write_rgvf(cfg.bundle_dir / "curb_value.rgvf.unconverged", res.value);
        emit_report(cfg, "solve_curb.json", report);
        std::cerr << "solve did not converge within the horizon; partial field saved\n";
        return 3;
    }
    ControlTables tables = extract_controller(res.value, game);
    save_bundle_entry(cfg.bundle_dir, std::nullopt,
                      ModeTables{std::move(res.value), std::move(tables)}, std::nullopt,
                      cfg.robot, cfg.vehicle, scfg);
    fs::remove(cfg.bundle_dir / "curb_value.rgvf.unconverged");
    emit_report(cfg, "solve_curb.json", report);
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& scenario_arg,
                 const std::string& policy_str, std::optional<std::uint64_t> seed_override) {
    Policy pol;
    try {
        pol = policy_from_string(policy_str);
    } catch (const std::invalid_argument& e) {
        return fail_usage(e.what());
    }
    const fs::path sp = scenario_arg.empty() ? cfg.scenario_file : fs::path(scenario_arg);
    if (sp.empty()) return fail_usage("no scenario file given (flag or config scenario_file)");
    Scenario sc = load_scenario(sp);
    if (seed_override) sc.human.seed = *seed_override;

    std::optional<SafetyBundle> bundle;
    std::optional<ModeSet> modes;
    if (pol != Policy::nominal_only) {
        if (cfg.bundle_dir.empty()) return fail_usage("policy needs a bundle_dir in the config");
        bundle = load_bundle(cfg.bundle_dir);
    }
    if (pol == Policy::reach_pred || sc.human.kind == HumanSource::Kind::sampled) {
        if (cfg.modes_file.empty()) return fail_usage("policy or scenario needs a modes_file");
        modes = load_modes_json(cfg.modes_file);
    }

    fs::create_directories(cfg.output_dir);
    json trials = json::array();
    int collisions = 0;
    double sum_le_05 = 0.0, sum_le_1 = 0.0, sum_dev = 0.0, sum_t_car = 0.0, sum_t_curb = 0.0;
    double worst_dev = 0.0, closest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sc.start_offsets.size(); ++i) {
        TrialResult tr;
        try {
            tr = run_encounter(sc, sc.start_offsets[i], pol, bundle ? &*bundle : nullptr,
                               modes ? &*modes : nullptr);
        } catch (const std::runtime_error& e) {
            std::string msg = e.what();
            if (bundle && msg.find("no tables for mode") != std::string::npos) {
                msg += "; bundle contains modes:";
                for (const auto& [mid, t] : bundle->modes) msg += " " + std::to_string(mid);
            }
            return fail_data(msg);
        }
        char name[64];
        std::snprintf(name, sizeof name, "trial_%03zu_%s.csv", i, policy_str.c_str());
        save_step_log(cfg.output_dir / name, tr.log);
        trials.push_back(metrics_json(tr.metrics, sc.start_offsets[i], name));
        collisions += tr.metrics.collided ? 1 : 0;
        sum_le_05 += tr.metrics.count_le_05;
        sum_le_1 += tr.metrics.count_le_1;
        sum_dev += tr.metrics.avg_deviation;
        sum_t_car += tr.metrics.t_car;
        sum_t_curb += tr.metrics.t_curb;
        worst_dev = std::max(worst_dev, tr.metrics.max_deviation);
        closest = std::min(closest, tr.metrics.min_distance);
    }
    const double n = static_cast<double>(sc.start_offsets.size());
    json agg;
    agg["trials"] = sc.start_offsets.size();
    agg["collisions"] = collisions;
    agg["collision_rate"] = collisions / n;
    agg["mean_count_le_05"] = sum_le_05 / n;
    agg["mean_count_le_1"] = sum_le_1 / n;
    agg["mean_avg_deviation"] = sum_dev / n;
    agg["max_deviation"] = worst_dev;
    agg["mean_t_car"] = sum_t_car / n;
    agg["mean_t_curb"] = sum_t_curb / n;
    agg["min_distance"] = closest;

    json doc;
    doc["policy"] = policy_str;
    doc["scenario"] = sp.string();
    doc["trials"] = trials;
    doc["aggregate"] = agg;
    std::cout << json{{"policy", policy_str}, {"aggregate", agg}}.dump(2) << "\n";
    doc["metadata"] = {{"generated_at", timestamp_utc()}};
    write_json_file(cfg.output_dir / ("simulate_" + policy_str + ".json"), doc);
    return 0;
}

int cmd_slice(const RunConfig& cfg, const std::string& file_override, int mode, double psi,
              double v_h, double v_r, const std::string& out_csv) {
    fs::path src;
    if (!file_override.empty()) {
        src = file_override;
    } else {
        if (cfg.bundle_dir.empty()) return fail_usage("slice needs --file or a config bundle_dir");
        src = cfg.bundle_dir / ("mode_" + std::to_string(mode) + "_value.rgvf");
    }
    const ValueField f = read_rgvf(src);
    const Grid& g = *f.grid;
    if (g.ndim() != 5) return fail_data("slice expects a 5D field, got " + std::to_string(g.ndim()));

    const auto axis_or = [&](const char* name, int fallback) {
        const int i = g.axis_index(name);
        return i >= 0 ? i : fallback;
    };
    const int ix = axis_or("x_rel", 0);
    const int iy = axis_or("y_rel", 1);
    const int ivh = axis_or("v_h", 2);
    const int ivr = axis_or("v_r", 3);
    const int ipsi = axis_or("psi_rel", 4);

    if (v_h < g.axis(ivh).lo || v_h > g.axis(ivh).hi)
        return fail_usage("v_h outside the grid range");
    if (v_r < g.axis(ivr).lo || v_r > g.axis(ivr).hi)
        return fail_usage("v_r outside the grid range");
    if (!g.axis(ipsi).periodic && (psi < g.axis(ipsi).lo || psi > g.axis(ipsi).hi))
        return fail_usage("psi outside the grid range");

    if (fs::path(out_csv).has_parent_path()) fs::create_directories(fs::path(out_csv).parent_path());
    std::ofstream out(out_csv);
    if (!out) return fail_data("cannot write " + out_csv);
    out << "x_rel,y_rel,V\n";
    out.precision(17);
    int sub_zero = 0;
    std::array<double, 5> q{};
    q[static_cast<std::size_t>(ivh)] = v_h;
    q[static_cast<std::size_t>(ivr)] = v_r;
    q[static_cast<std::size_t>(ipsi)] = psi;
    for (const double x : g.nodes(ix)) {
        for (const double y : g.nodes(iy)) {
            q[static_cast<std::size_t>(ix)] = x;
            q[static_cast<std::size_t>(iy)] = y;
            const double v = interpolate(f, q);
            sub_zero += v <= 0.0 ? 1 : 0;
            out << x << ',' << y << ',' << v << '\n';
        }
    }
    std::cout << "rows: " << g.nodes(ix).size() * g.nodes(iy).size() << "  sub_zero: " << sub_zero
              << "\n";
    return 0;
}

int cmd_classify(const RunConfig& cfg, const std::string& modes_arg,
                 const std::vector<double>& action, const std::string& traj) {
    const fs::path mf = modes_arg.empty() ? cfg.modes_file : fs::path(modes_arg);
    if (mf.empty()) return fail_usage("classify needs --modes or a config modes_file");
    if (action.empty() == traj.empty())
        return fail_usage("classify needs exactly one of --action A OMEGA or --traj FILE");
    const ModeSet set = load_modes_json(mf);

    ModeProbabilities mp;
    if (!action.empty()) {
        mp = classify_action({action[0], action[1]}, set.modes);
    } else {
        mp = classify_trajectory(load_trajectory_csv(traj), set.modes);
    }
    json probs;
    for (const auto& [id, p] : mp.probs) probs[std::to_string(id)] = p;
    std::cout << json{{"probs", probs}, {"mode", mp.mode}, {"p_mode", mp.p_mode}}.dump(2) << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
    json merged = json::array();
    std::cout << "policy         trials  collisions  mean<=0.5  mean<=1  mean_dev  max_dev  "
                 "t_car   t_curb\n";
    for (const auto& p : inputs) {
        std::ifstream in(p);
        if (!in) return fail_data("cannot open " + p);
        json doc;
        try {
            in >> doc;
        } catch (const std::exception& e) {
            return fail_data("bad report JSON in " + p + ": " + e.what());
        }
        if (!doc.contains("policy") || !doc.contains("aggregate"))
            return fail_data(p + " is not a simulation report");
        const auto& a = doc["aggregate"];
        char line[200];
        std::snprintf(line, sizeof line,
                      "%-14s %6d  %10d  %9.2f  %7.2f  %8.3f  %7.3f  %6.2f  %6.2f\n",
                      doc["policy"].get<std::string>().c_str(), a["trials"].get<int>(),
                      a["collisions"].get<int>(), a["mean_count_le_05"].get<double>(),
                      a["mean_count_le_1"].get<double>(), a["mean_avg_deviation"].get<double>(),
                      a["max_deviation"].get<double>(), a["mean_t_car"].get<double>(),
                      a["mean_t_curb"].get<double>());
        std::cout << line;
        merged.push_back({{"policy", doc["policy"]}, {"aggregate", a}});
    }
    if (!out.empty()) write_json_file(out, json{{"reports", merged}});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"car-vs-car reachability safety toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
    app.add_option("--config", config_path, "run configuration JSON");
    app.add_option("--seed", seed, "override the configured random seed");
    app.add_option("--threads", threads, "override the configured thread count");
    app.add_option("--out", out_dir, "override the configured output directory");

    auto* extract = app.add_subcommand("extract", "recover (a, omega) samples from trajectory CSVs");
    std::string ex_dir, ex_out = "actions.csv";
    extract->add_option("dir", ex_dir, "directory of trajectory CSVs")->required();
    extract->add_option("out", ex_out, "output action dataset CSV");

    auto* cluster = app.add_subcommand("cluster", "fit driving modes to an action dataset");
    std::string cl_csv, cl_out = "modes.json";
    cluster->add_option("actions", cl_csv, "action dataset CSV")->required();
    cluster->add_option("out", cl_out, "output modes JSON");

    auto* solve = app.add_subcommand("solve", "solve a reachability problem into the bundle");
    std::string sv_target, sv_curb_map;
    ToyOpts toy;
    solve->add_option("target", sv_target, "mode id, 'curbs', or 'toy'")->required();
    solve->add_option("--curb-map", sv_curb_map, "curb rectangles JSON (curbs target)");
    solve->add_option("--u-max", toy.u_max, "toy: control range half width");
    solve->add_option("--d-max", toy.d_max, "toy: disturbance range half width");
    solve->add_option("--target-half", toy.target_half, "toy: target interval half width");
    solve->add_option("--nodes", toy.nodes, "toy: node count");
    solve->add_option("--extent", toy.extent, "toy: domain half extent");

    auto* simulate = app.add_subcommand("simulate", "run the scenario's encounters under a policy");
    std::string sm_scenario, sm_policy;
    simulate->add_option("--scenario", sm_scenario, "scenario JSON (default: config scenario_file)");
    simulate->add_option("--policy", sm_policy, "default, reach_nopred, or reach_pred")->required();

    auto* slice = app.add_subcommand("slice", "export a positional slice of a value table");
    std::string sl_file, sl_out;
    int sl_mode = -1;
    double sl_psi = M_PI / 4, sl_vh = 6.0, sl_vr = 1.0;
    slice->add_option("out", sl_out, "output CSV")->required();
    slice->add_option("--mode", sl_mode, "bundle mode id");
    slice->add_option("--file", sl_file, "slice this RGVF file instead of a bundle mode");
    slice->add_option("--psi", sl_psi, "fixed relative heading");
    slice->add_option("--v-h", sl_vh, "fixed human speed");
    slice->add_option("--v-r", sl_vr, "fixed robot speed");

    auto* classify = app.add_subcommand("classify", "mode probabilities for an action or trajectory");
    std::string cf_modes, cf_traj;
    std::vector<double> cf_action;
    classify->add_option("--modes", cf_modes, "modes JSON (default: config modes_file)");
    classify->add_option("--action", cf_action, "acceleration and turn rate")->expected(2);
    classify->add_option("--traj", cf_traj, "trajectory CSV to classify");

    auto* report = app.add_subcommand("report", "tabulate one or more simulation reports");
    std::vector<std::string> rp_inputs;
    std::string rp_out;
    report->add_option("inputs", rp_inputs, "simulation report JSON files")->required();
    report->add_option("--merged", rp_out, "write the combined aggregates here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        RunConfig cfg =
            config_path.empty() ? RunConfig{} : load_run_config(config_path);
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        if (out_dir) cfg.output_dir = *out_dir;
        cfg.validate();

        if (app.got_subcommand(extract)) return cmd_extract(ex_dir, ex_out);
        if (app.got_subcommand(cluster)) return cmd_cluster(cfg, cl_csv, cl_out);
        if (app.got_subcommand(solve)) {
            if (sv_target == "toy") return solve_toy(cfg, toy);
            if (sv_target == "curbs") return solve_curbs(cfg, sv_curb_map);
            try {
                std::size_t pos = 0;
                const int id = std::stoi(sv_target, &pos);
                if (pos != sv_target.size()) throw std::invalid_argument(sv_target);
                return solve_mode(cfg, id);
            } catch (const std::invalid_argument&) {
                return fail_usage("solve target must be a mode id, 'curbs', or 'toy'");
            }
        }
        if (app.got_subcommand(simulate)) return cmd_simulate(cfg, sm_scenario, sm_policy, seed);
        if (app.got_subcommand(slice))
            return cmd_slice(cfg, sl_file, sl_mode, sl_psi, sl_vh, sl_vr, sl_out);
        if (app.got_subcommand(classify)) return cmd_classify(cfg, cf_modes, cf_action, cf_traj);
        if (app.got_subcommand(report)) return cmd_report(rp_inputs, rp_out);
        return fail_usage("no subcommand selected");
    } catch (const std::exception& e) {
        return fail_data(e.what());
    }
}
