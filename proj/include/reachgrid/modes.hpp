#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "reachgrid/vehicle.hpp"

namespace reachgrid {

struct TrajectorySample {
    double t = 0.0, x = 0.0, y = 0.0, v = 0.0;
};

/// Position and speed samples at a fixed 0.1 s cadence.
struct Trajectory {
    std::vector<TrajectorySample> samples;

    double dt() const;
    /// Throws on fewer than 3 samples or non-uniform time spacing.
    void validate() const;
};

struct ActionSample {
    double a = 0.0;
    double omega = 0.0;
    int trajectory = 0;  // provenance
    int step = 0;
};

using ModeFeature = std::array<double, 6>;

struct NormalizationParams {
    double a_scale = 1.0;
    double omega_scale = 1.0;
};

struct DrivingMode {
    int id = 0;
    std::string label;
    HumanAction nominal;
    ActionBounds bounds;
};

struct ModeProbabilities {
    std::map<int, double> probs;
    int mode = -1;        // argmax, ties to the lower id
    double p_mode = 0.0;  // probability of the argmax mode
};

/// The six behavior nominals, in (a, omega), indexed by mode id.
const std::array<DrivingMode, 6>& default_mode_nominals();

/// Per-sample headings from position differences: central in the interior,
/// one sided at the two ends. A stencil whose displacement is under 1 mm
/// keeps the previous heading, since a standstill has none.
std::vector<double> trajectory_headings(const Trajectory& traj);

/// Differential flatness: recover (a, omega) from positions and speeds by
/// central differences over samples and headings; the first and last
/// samples are dropped from the output.
std::vector<ActionSample> extract_actions(const Trajectory& traj, int trajectory_id = 0);

/// Symmetric max-abs scaling into [-1, 1] per axis. Zero-spread axes keep
/// scale 1 so the transform stays defined.
NormalizationParams normalization_params(const std::vector<ActionSample>& dataset);

HumanAction normalize_action(const HumanAction& a, const NormalizationParams& p);

/// Distances from a normalized action to the six normalized nominals.
ModeFeature mode_features(const HumanAction& normalized,
                          const std::array<HumanAction, 6>& normalized_nominals);

struct ClusterResult {
    std::vector<int> assignment;                // per sample: cluster index 0..k-1
    std::vector<std::array<double, 6>> centroids;
    std::vector<int> cluster_mode;              // cluster index -> mode id label
    int iterations = 0;
    int reseeds = 0;
    double inertia = 0.0;
};

/// Lloyd's algorithm over the 6D features, deterministically initialized at
/// the feature vectors of the six nominals. The seed only matters if an
/// empty-cluster repair needs a tie broken, so identical inputs always give
/// identical output. Clusters are labeled by the nearest nominal feature
/// vector, with a greedy uniqueness fallback when two clusters claim the
/// same mode.
ClusterResult kmeans_cluster(const std::vector<ModeFeature>& features, int k = 6,
                             unsigned long long seed = 0, int max_iters = 100,
                             const NormalizationParams& norm = {});

ActionBounds action_bounds(const std::vector<ActionSample>& cluster);

/// Everything the classifier and the solvers need to know about modes.
struct ModeSet {
    std::vector<DrivingMode> modes;  // ids 0..5
    NormalizationParams norm;
    ActionBounds physical;  // mode -1 bounds: dataset extent widened by 10%
};

/// Full pipeline: normalize, cluster, bound each cluster, derive physical
/// limits from the dataset extent.
ModeSet build_mode_set(const std::vector<ActionSample>& dataset, ClusterResult* cluster_out,
                       unsigned long long seed = 0, int max_iters = 100);

/// Rectangle membership with inverse edge distance weighting; actions
/// outside every rectangle belong to mode -1 with certainty.
ModeProbabilities classify_action(const HumanAction& action, const std::vector<DrivingMode>& modes);

/// Per step classification averaged uniformly over the trajectory.
ModeProbabilities classify_trajectory(const Trajectory& predicted,
                                      const std::vector<DrivingMode>& modes);

/// Rows that fail to parse are skipped and counted, not fatal.
Trajectory load_trajectory_csv(const std::filesystem::path& path, int* skipped_rows = nullptr);
void save_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

ModeSet load_modes_json(const std::filesystem::path& path);
void save_modes_json(const std::filesystem::path& path, const ModeSet& set);

}  // namespace reachgrid
