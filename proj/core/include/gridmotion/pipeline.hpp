#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridmotion/clustering.hpp"
#include "gridmotion/pose.hpp"
#include "gridmotion/simulator.hpp"
#include "gridmotion/stats.hpp"

namespace gmc {

struct PipelineConfig {
    GridConfig grid;
    StatModel stat;
    /// When true, stat.m_over_M is replaced by the uniform region prior
    /// 1 / (gx * gy).
    bool stat_m_auto = true;
    RansacConfig ransac;
    int min_cluster_features = 10;

    StatModel effective_stat() const;
    void validate() const;
};

struct StageTiming {
    std::string stage;
    double ms = 0.0;
};

struct ClusterSummary {
    int id = 0;       // global id used in the label map
    int pass_id = 0;
    int local_id = 0; // cluster id within its pass
    MotionBin bin;
    int n_cells = 0;
    int n_members = 0; // members claimed within the pass
    int support = 0;
    int n_labeled = 0; // matches that carry this cluster after fusion
};

struct PassSummary {
    int pass_id = 0;
    int n_cells = 0;
    int n_leaves = 0;
    int n_static = 0;
    int n_dynamic = 0;
    int n_unknown = 0;
    int n_fused = 0; // matches whose final verdict came from this pass
};

/// Deterministic filtering summary. Timings live only here (and on stdout in
/// the CLI); the written report file carries the deterministic fields so
/// that fixed inputs reproduce it byte for byte.
struct FilterReport {
    long n_matches = 0;
    long n_static = 0;
    long n_dynamic = 0;
    long n_unknown = 0;
    long n_rejected = 0;
    bool pose_estimated = false;
    std::vector<ClusterSummary> clusters;
    std::vector<PassSummary> passes;
    std::vector<StageTiming> timings;
    double total_ms = 0.0;
};

struct FilterResult {
    LabelMap labels;
    SE3 initial_pose;
    SE3 refined_pose;
    FilterReport report;
};

/// The full filter: consensus pose (unless pose0 is given), four shifted
/// grid passes with quadtree refinement, per-pass clustering, cross-pass
/// fusion, and pose refinement on the Static set. Component failures
/// propagate with stage attribution.
FilterResult run_filter_pipeline(std::span<const Correspondence> matches,
                                 std::optional<SE3> pose0,
                                 const PipelineConfig& cfg);

struct BenchRecord {
    int size = 0;
    double ms = 0.0;
};

/// Times the filter on synthetic scenes of the given match counts (fixed
/// grid, fixed object fraction); reports the best of `reps` runs per size.
std::vector<BenchRecord> bench_pipeline(std::span<const int> sizes,
                                        std::uint64_t seed, int reps = 5);

} // namespace gmc
