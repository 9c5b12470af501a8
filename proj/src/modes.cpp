#include "reachgrid/modes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"

namespace reachgrid {

double Trajectory::dt() const {
    if (samples.size() < 2) throw std::runtime_error("trajectory: need at least 2 samples for dt");
    return samples[1].t - samples[0].t;
}

void Trajectory::validate() const {
    if (samples.size() < 3) throw std::runtime_error("trajectory: need at least 3 samples");
    const double step = samples[1].t - samples[0].t;
    if (!(step > 0.0)) throw std::runtime_error("trajectory: timestamps must increase");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double d = samples[i].t - samples[i - 1].t;
        if (std::abs(d - step) > 1e-6 * std::max(1.0, std::abs(step)))
            throw std::runtime_error("trajectory: non-uniform time spacing");
    }
}

const std::array<DrivingMode, 6>& default_mode_nominals() {
    static const std::array<DrivingMode, 6> modes = {{
        {0, "Deceleration", {-1.5, 0.0}, {}},
        {1, "Stable", {0.0, 0.0}, {}},
        {2, "Acceleration", {1.5, 0.0}, {}},
        {3, "Left turn", {0.0, 0.2}, {}},
        {4, "Right turn", {0.0, -0.25}, {}},
        {5, "Roundabout", {0.0, 0.4}, {}},
    }};
    return modes;
}

std::vector<double> trajectory_headings(const Trajectory& traj) {
    const auto& s = traj.samples;
    const int n = static_cast<int>(s.size());
    std::vector<double> psi(n, 0.0);
    double last = 0.0;
    for (int t = 0; t < n; ++t) {
        const int lo = std::max(t - 1, 0);
        const int hi = std::min(t + 1, n - 1);
        const double dx = s[hi].x - s[lo].x;
        const double dy = s[hi].y - s[lo].y;
        if (std::hypot(dx, dy) < 1e-3) {
            psi[t] = last;  // standstill has no heading of its own
        } else {
            psi[t] = std::atan2(dy, dx);
            last = psi[t];
        }
    }
    return psi;
}

std::vector<ActionSample> extract_actions(const Trajectory& traj, int trajectory_id) {
    traj.validate();
    const auto& s = traj.samples;
    const int n = static_cast<int>(s.size());
    const double dt = traj.dt();
    const std::vector<double> psi = trajectory_headings(traj);

    std::vector<ActionSample> out;
    out.reserve(n - 2);
    for (int t = 1; t + 1 < n; ++t) {
        ActionSample a;
        a.a = (s[t + 1].v - s[t - 1].v) / (2.0 * dt);
        a.omega = wrap_angle(psi[t + 1] - psi[t - 1]) / (2.0 * dt);
        a.trajectory = trajectory_id;
        a.step = t;
        out.push_back(a);
    }
    return out;
}

NormalizationParams normalization_params(const std::vector<ActionSample>& dataset) {
    NormalizationParams p;
    double ma = 0.0, mo = 0.0;
    for (const auto& s : dataset) {
        ma = std::max(ma, std::abs(s.a));
        mo = std::max(mo, std::abs(s.omega));
    }
    p.a_scale = ma == 0.0 ? 1.0 : ma;
    p.omega_scale = mo == 0.0 ? 1.0 : mo;
    return p;
}

HumanAction normalize_action(const HumanAction& a, const NormalizationParams& p) {
    return {a.a / p.a_scale, a.omega / p.omega_scale};
}

ModeFeature mode_features(const HumanAction& normalized,
                          const std::array<HumanAction, 6>& normalized_nominals) {
    ModeFeature f{};
    for (int i = 0; i < 6; ++i)
        f[i] = std::hypot(normalized.a - normalized_nominals[i].a,
                          normalized.omega - normalized_nominals[i].omega);
    return f;
}

namespace {

double feature_dist2(const ModeFeature& a, const ModeFeature& b) {
    double s = 0.0;
    for (int i = 0; i < 6; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::array<ModeFeature, 6> nominal_features(const NormalizationParams& norm) {
    std::array<HumanAction, 6> nn;
    const auto& defs = default_mode_nominals();
    for (int i = 0; i < 6; ++i) nn[i] = normalize_action(defs[i].nominal, norm);
    std::array<ModeFeature, 6> out;
    for (int i = 0; i < 6; ++i) out[i] = mode_features(nn[i], nn);
    return out;
}

}  // namespace

ClusterResult kmeans_cluster(const std::vector<ModeFeature>& features, int k,
                             unsigned long long /*seed*/, int max_iters,
                             const NormalizationParams& norm) {
    if (k < 1) throw std::runtime_error("kmeans: k must be positive");
    const int m = static_cast<int>(features.size());
    if (m < k) throw std::runtime_error("kmeans: fewer samples than clusters");

    const auto nomf = nominal_features(norm);
    ClusterResult r;
    r.centroids.resize(k);
    for (int c = 0; c < k; ++c) r.centroids[c] = nomf[std::min(c, 5)];
    r.assignment.assign(m, -1);

    for (int it = 0; it < max_iters; ++it) {
        // Assign, ties to the lower cluster index.
        bool changed = false;
        for (int i = 0; i < m; ++i) {
            int best = 0;
            double bd = feature_dist2(features[i], r.centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = feature_dist2(features[i], r.centroids[c]);
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (r.assignment[i] != best) {
                r.assignment[i] = best;
                changed = true;
            }
        }
        r.iterations = it + 1;
        if (!changed && it > 0) break;

        // Update means; an emptied cluster restarts at the point farthest
        // from where that centroid used to sit.
        std::vector<std::array<double, 6>> sum(k, std::array<double, 6>{});
        std::vector<int> count(k, 0);
        for (int i = 0; i < m; ++i) {
            for (int d = 0; d < 6; ++d) sum[r.assignment[i]][d] += features[i][d];
            ++count[r.assignment[i]];
        }
        std::vector<char> claimed(m, 0);
        for (int c = 0; c < k; ++c) {
            if (count[c] > 0) {
                for (int d = 0; d < 6; ++d) r.centroids[c][d] = sum[c][d] / count[c];
            } else {
                int far = -1;
                double fd = -1.0;
                for (int i = 0; i < m; ++i) {
                    if (claimed[i]) continue;
                    const double d = feature_dist2(features[i], r.centroids[c]);
                    if (d > fd) {
                        fd = d;
                        far = i;
                    }
                }
                r.centroids[c] = features[far];
                claimed[far] = 1;
                ++r.reseeds;
            }
        }
    }

    r.inertia = 0.0;
    for (int i = 0; i < m; ++i) r.inertia += feature_dist2(features[i], r.centroids[r.assignment[i]]);

    // Label clusters by the nearest nominal feature vector; a greedy pass on
    // sorted distances keeps the labels unique when two clusters would claim
    // the same mode.
    r.cluster_mode.assign(k, -1);
    std::vector<std::tuple<double, int, int>> pairs;
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < 6; ++i) pairs.emplace_back(feature_dist2(r.centroids[c], nomf[i]), c, i);
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> mode_used(6, 0);
    for (const auto& [d, c, i] : pairs) {
        (void)d;
        if (r.cluster_mode[c] != -1 || mode_used[i]) continue;
        r.cluster_mode[c] = i;
        mode_used[i] = 1;
    }
    return r;
}

ActionBounds action_bounds(const std::vector<ActionSample>& cluster) {
    if (cluster.empty()) throw std::runtime_error("action_bounds: empty cluster");
    ActionBounds b{{cluster[0].a, cluster[0].a}, {cluster[0].omega, cluster[0].omega}};
    for (const auto& s : cluster) {
        b.a.lo = std::min(b.a.lo, s.a);
        b.a.hi = std::max(b.a.hi, s.a);
        b.omega.lo = std::min(b.omega.lo, s.omega);
        b.omega.hi = std::max(b.omega.hi, s.omega);
    }
    return b;
}

ModeSet build_mode_set(const std::vector<ActionSample>& dataset, ClusterResult* cluster_out,
                       unsigned long long seed, int max_iters) {
    if (dataset.size() < 6) throw std::runtime_error("build_mode_set: need at least 6 actions");
    const NormalizationParams norm = normalization_params(dataset);

    std::array<HumanAction, 6> nn;
    const auto& defs = default_mode_nominals();
    for (int i = 0; i < 6; ++i) nn[i] = normalize_action(defs[i].nominal, norm);

    std::vector<ModeFeature> features;
    features.reserve(dataset.size());
    for (const auto& s : dataset)
        features.push_back(mode_features(normalize_action({s.a, s.omega}, norm), nn));

    ClusterResult cr = kmeans_cluster(features, 6, seed, max_iters, norm);

    ModeSet set;
    set.norm = norm;
    for (int mode = 0; mode < 6; ++mode) {
        int cluster = -1;
        for (int c = 0; c < 6; ++c)
            if (cr.cluster_mode[c] == mode) cluster = c;
        DrivingMode m = defs[mode];
        std::vector<ActionSample> members;
        if (cluster >= 0)
            for (std::size_t i = 0; i < dataset.size(); ++i)
                if (cr.assignment[i] == cluster) members.push_back(dataset[i]);
        if (members.empty()) {
            m.bounds = {{m.nominal.a, m.nominal.a}, {m.nominal.omega, m.nominal.omega}};
        } else {
            m.bounds = action_bounds(members);
        }
        set.modes.push_back(m);
    }

    ActionBounds phys = action_bounds(dataset);
    const double wa = phys.a.width(), wo = phys.omega.width();
    phys.a.lo -= 0.05 * wa;
    phys.a.hi += 0.05 * wa;
    phys.omega.lo -= 0.05 * wo;
    phys.omega.hi += 0.05 * wo;
    set.physical = phys;

    if (cluster_out) *cluster_out = std::move(cr);
    return set;
}

ModeProbabilities classify_action(const HumanAction& action,
                                  const std::vector<DrivingMode>& modes) {
    ModeProbabilities out;
    // Inverse distance to the nearest rectangle edge, over the modes whose
    // rectangle contains the action (boundary counts as inside).
    std::vector<std::pair<int, double>> inside;
    for (const auto& m : modes) {
        if (m.id < 0) continue;
        if (!m.bounds.a.contains(action.a) || !m.bounds.omega.contains(action.omega)) continue;
        const double d = std::min(std::min(action.a - m.bounds.a.lo, m.bounds.a.hi - action.a),
                                  std::min(action.omega - m.bounds.omega.lo,
                                           m.bounds.omega.hi - action.omega));
        inside.emplace_back(m.id, std::max(d, 1e-9));
    }
    if (inside.empty()) {
        out.probs[-1] = 1.0;
    } else if (inside.size() == 1) {
        out.probs[inside[0].first] = 1.0;
    } else {
        double total = 0.0;
        for (const auto& [id, d] : inside) total += 1.0 / d;
        for (const auto& [id, d] : inside) out.probs[id] = (1.0 / d) / total;
    }
    out.mode = out.probs.begin()->first;
    out.p_mode = out.probs.begin()->second;
    for (const auto& [id, p] : out.probs) {
        if (p > out.p_mode) {
            out.mode = id;
            out.p_mode = p;
        }
    }
    return out;
}

ModeProbabilities classify_trajectory(const Trajectory& predicted,
                                      const std::vector<DrivingMode>& modes) {
    const auto actions = extract_actions(predicted);
    if (actions.empty()) throw std::runtime_error("classify_trajectory: no extractable actions");
    std::map<int, double> acc;
    for (const auto& a : actions) {
        const auto step = classify_action({a.a, a.omega}, modes);
        for (const auto& [id, p] : step.probs) acc[id] += p;
    }
    double total = 0.0;
    for (const auto& [id, p] : acc) total += p;
    ModeProbabilities out;
    for (const auto& [id, p] : acc) out.probs[id] = p / total;
    out.mode = out.probs.begin()->first;
    out.p_mode = out.probs.begin()->second;
    for (const auto& [id, p] : out.probs) {
        if (p > out.p_mode) {
            out.mode = id;
            out.p_mode = p;
        }
    }
    return out;
}

Trajectory load_trajectory_csv(const std::filesystem::path& path, int* skipped_rows) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("trajectory: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trajectory: empty file " + path.string());
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line != "t,x,y,v")
        throw std::runtime_error("trajectory: expected header t,x,y,v in " + path.string());

    Trajectory traj;
    int skipped = 0;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        TrajectorySample s;
        char c1, c2, c3;
        if ((ss >> s.t >> c1 >> s.x >> c2 >> s.y >> c3 >> s.v) && c1 == ',' && c2 == ',' &&
            c3 == ',' && (ss >> std::ws).eof()) {
            traj.samples.push_back(s);
        } else {
            ++skipped;
        }
    }
    if (skipped_rows) *skipped_rows = skipped;
    return traj;
}

void save_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("trajectory: cannot write " + path.string());
    out << "t,x,y,v\n";
    out.precision(17);
    for (const auto& s : traj.samples) out << s.t << ',' << s.x << ',' << s.y << ',' << s.v << '\n';
}

ModeSet load_modes_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("modes: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("modes: bad JSON in " + path.string() + ": " + e.what());
    }
    ModeSet set;
    try {
        for (const auto& jm : j.at("modes")) {
            DrivingMode m;
            m.id = jm.at("id").get<int>();
            m.label = jm.at("label").get<std::string>();
            m.nominal.a = jm.at("nominal").at("a").get<double>();
            m.nominal.omega = jm.at("nominal").at("omega").get<double>();
            const auto& jb = jm.at("bounds");
            m.bounds.a = {jb.at("a_min").get<double>(), jb.at("a_max").get<double>()};
            m.bounds.omega = {jb.at("omega_min").get<double>(), jb.at("omega_max").get<double>()};
            set.modes.push_back(m);
        }
        set.norm.a_scale = j.at("normalization").at("a_scale").get<double>();
        set.norm.omega_scale = j.at("normalization").at("omega_scale").get<double>();
        const auto& jp = j.at("physical_limits");
        set.physical.a = {jp.at("a_min").get<double>(), jp.at("a_max").get<double>()};
        set.physical.omega = {jp.at("omega_min").get<double>(), jp.at("omega_max").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("modes: missing field in " + path.string() + ": " + e.what());
    }
    return set;
}

void save_modes_json(const std::filesystem::path& path, const ModeSet& set) {
    nlohmann::json j;
    j["modes"] = nlohmann::json::array();
    for (const auto& m : set.modes) {
        nlohmann::json jm;
        jm["id"] = m.id;
        jm["label"] = m.label;
        jm["nominal"] = {{"a", m.nominal.a}, {"omega", m.nominal.omega}};
        jm["bounds"] = {{"a_min", m.bounds.a.lo},
                        {"a_max", m.bounds.a.hi},
                        {"omega_min", m.bounds.omega.lo},
                        {"omega_max", m.bounds.omega.hi}};
        j["modes"].push_back(jm);
    }
    j["normalization"] = {{"a_scale", set.norm.a_scale}, {"omega_scale", set.norm.omega_scale}};
    j["physical_limits"] = {{"a_min", set.physical.a.lo},
                            {"a_max", set.physical.a.hi},
                            {"omega_min", set.physical.omega.lo},
                            {"omega_max", set.physical.omega.hi}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("modes: cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace reachgrid
