#include "gridmotion/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace gmc {

StatModel PipelineConfig::effective_stat() const {
    StatModel m = stat;
    if (stat_m_auto)
        m.m_over_M = 1.0 / (static_cast<double>(grid.gx) * grid.gy);
    return m;
}

void PipelineConfig::validate() const {
    grid.validate();
    effective_stat().validate();
    if (ransac.iterations < 1)
        throw Error("PipelineConfig: ransac.iterations must be >= 1");
    if (ransac.inlier_threshold <= 0.0)
        throw Error("PipelineConfig: ransac.inlier_threshold must be positive");
    if (min_cluster_features < 0)
        throw Error("PipelineConfig: min_cluster_features must be >= 0");
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct PassPipeline {
    PassResult pass;
    ClusterMap clusters;
    LabelMap labels;
};

// Fusion key per the shifted-pass design: informed decisions beat Unknown,
// then the higher winning-support ratio wins, ties prefer Static, then the
// lower pass id.
struct FusionChoice {
    bool informed = false;
    double ratio = -1.0;
    int pass = 0;
};

bool choice_better(const FusionChoice& a, Label label_a, const FusionChoice& b,
                   Label label_b) {
    if (a.informed != b.informed) return a.informed;
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
    const bool a_static = label_a != Label::Dynamic;
    const bool b_static = label_b != Label::Dynamic;
    if (a_static != b_static) return a_static;
    return a.pass < b.pass;
}

} // namespace

FilterResult run_filter_pipeline(std::span<const Correspondence> matches,
                                 std::optional<SE3> pose0,
                                 const PipelineConfig& cfg) {
    cfg.validate();
    if (matches.empty())
        throw Error("pipeline: empty match list");

    FilterResult result;
    FilterReport& report = result.report;
    report.n_matches = static_cast<long>(matches.size());
    const auto t_total = Clock::now();

    // Stage: initial pose ("motion estimation as normal").
    {
        const auto t0 = Clock::now();
        if (pose0) {
            if (!pose0->is_valid())
                throw Error("pipeline/estimate: supplied pose is not a valid SE3");
            result.initial_pose = *pose0;
        } else {
            try {
                result.initial_pose = estimate_pose(matches, cfg.ransac).pose;
            } catch (const Error& e) {
                throw Error(std::string("pipeline/estimate: ") + e.what());
            }
            report.pose_estimated = true;
        }
        report.timings.push_back({"estimate", ms_since(t0)});
    }

    const StatModel model = cfg.effective_stat();

    // Stage: grid passes with quadtree refinement.
    std::vector<PassPipeline> passes(4);
    {
        const auto t0 = Clock::now();
        std::vector<PassResult> pr;
        try {
            pr = run_passes(matches, result.initial_pose, cfg.grid, model);
        } catch (const Error& e) {
            throw Error(std::string("pipeline/grid: ") + e.what());
        }
        for (int p = 0; p < 4; ++p) passes[p].pass = std::move(pr[p]);
        report.timings.push_back({"grid", ms_since(t0)});
    }

    // Stage: per-pass clustering and labeling.
    {
        const auto t0 = Clock::now();
        try {
            for (auto& pp : passes) {
                pp.clusters = suppress_duplicates(eliminate_small(
                    merge_clusters(pp.pass.decisions, pp.pass.grid, cfg.grid),
                    cfg.min_cluster_features));
                pp.labels = label_matches(pp.clusters, pp.pass.decisions, matches);
            }
        } catch (const Error& e) {
            throw Error(std::string("pipeline/cluster: ") + e.what());
        }
        report.timings.push_back({"cluster", ms_since(t0)});
    }

    // Stage: cross-pass fusion.
    {
        const auto t0 = Clock::now();

        // Global ids for surviving clusters, ordered (pass, local id).
        std::map<std::pair<int, int>, int> global_id;
        for (int p = 0; p < 4; ++p) {
            for (const auto& cl : passes[p].clusters.clusters) {
                const int gid = static_cast<int>(report.clusters.size());
                global_id[{p, cl.id}] = gid;
                ClusterSummary cs;
                cs.id = gid;
                cs.pass_id = p;
                cs.local_id = cl.id;
                cs.bin = cl.bin;
                cs.n_cells = static_cast<int>(cl.claims.size());
                cs.n_members = static_cast<int>(cl.member_count());
                cs.support = cl.support();
                report.clusters.push_back(cs);
            }
        }

        result.labels.ids.reserve(matches.size());
        result.labels.entries.reserve(matches.size());
        for (const auto& m : matches) {
            FusionChoice best;
            const LabelEntry* best_entry = nullptr;
            int best_pass = 0;
            for (int p = 0; p < 4; ++p) {
                const LabelEntry& e = passes[p].labels.at(m.id);
                FusionChoice cand;
                cand.pass = p;
                cand.informed = e.label != Label::Unknown;
                cand.ratio = (cand.informed && e.n > 0)
                                 ? static_cast<double>(e.support) / e.n
                                 : -1.0;
                if (!best_entry ||
                    choice_better(cand, e.label, best, best_entry->label)) {
                    best = cand;
                    best_entry = &e;
                    best_pass = p;
                }
            }
            LabelEntry chosen = *best_entry;
            if (chosen.label == Label::Dynamic)
                chosen.cluster_id = global_id.at({best_pass, chosen.cluster_id});
            result.labels.ids.push_back(m.id);
            result.labels.entries.emplace(m.id, chosen);
        }

        // Pass and label bookkeeping.
        for (int p = 0; p < 4; ++p) {
            PassSummary ps;
            ps.pass_id = p;
            ps.n_cells = passes[p].pass.grid.n_cells();
            ps.n_leaves = static_cast<int>(passes[p].pass.decisions.size());
            for (const auto& d : passes[p].pass.decisions) {
                switch (d.verdict) {
                    case Verdict::Static: ++ps.n_static; break;
                    case Verdict::Dynamic: ++ps.n_dynamic; break;
                    case Verdict::Unknown: ++ps.n_unknown; break;
                }
            }
            report.passes.push_back(ps);
        }
        for (const auto& m : matches) {
            const LabelEntry& e = result.labels.at(m.id);
            switch (e.label) {
                case Label::Static: ++report.n_static; break;
                case Label::Dynamic: ++report.n_dynamic; break;
                case Label::Unknown: ++report.n_unknown; break;
            }
            if (e.label == Label::Dynamic)
                ++report.clusters[e.cluster_id].n_labeled;
            if (e.n > 0 || e.label != Label::Unknown)
                ++report.passes[e.provenance.pass_id].n_fused;
        }
        report.n_rejected = static_cast<long>(passes[0].pass.rejected.size());
        report.timings.push_back({"fuse", ms_since(t0)});
    }

    // Stage: pose refinement on the Static set.
    {
        const auto t0 = Clock::now();
        try {
            result.refined_pose = refine_pose(matches, result.labels);
        } catch (const Error& e) {
            throw Error(std::string("pipeline/refine: ") + e.what());
        }
        report.timings.push_back({"refine", ms_since(t0)});
    }

    report.total_ms = ms_since(t_total);
    return result;
}

std::vector<BenchRecord> bench_pipeline(std::span<const int> sizes,
                                        std::uint64_t seed, int reps) {
    if (reps < 1)
        throw Error("bench_pipeline: reps must be >= 1");
    std::vector<BenchRecord> records;
    records.reserve(sizes.size());
    PipelineConfig cfg;

    for (int size : sizes) {
        if (size < 100)
            throw Error("bench_pipeline: sizes must be >= 100");
        SceneConfig scene_cfg = default_scene();
        scene_cfg.seed = seed;
        scene_cfg.objects[0].n_points = size * 15 / 100;
        scene_cfg.n_static = size - scene_cfg.objects[0].n_points;
        const Scene scene = generate(scene_cfg);

        double best_ms = 0.0;
        for (int r = 0; r <= reps; ++r) { // first run is warm-up
            const auto t0 = std::chrono::steady_clock::now();
            (void)run_filter_pipeline(scene.matches, scene.truth.pose, cfg);
            const double ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
            if (r == 0) continue;
            if (r == 1 || ms < best_ms) best_ms = ms;
        }
        records.push_back({size, best_ms});
    }
    return records;
}

} // namespace gmc
