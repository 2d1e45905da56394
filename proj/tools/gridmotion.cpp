// Command-line front end: filter / simulate / evaluate / stats / bench.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridmotion/io.hpp"
#include "gridmotion/pipeline.hpp"
#include "gridmotion/trajectory.hpp"

namespace {

int run_filter(const std::string& matches_path, const std::string& pose_path,
               const std::string& config_path, const std::string& out_path,
               const std::string& refined_pose_out, const std::string& report_out) {
    const auto matches = gmc::read_matches(matches_path);
    gmc::PipelineConfig cfg;
    if (!config_path.empty()) cfg = gmc::read_pipeline_config(config_path);
    std::optional<gmc::SE3> pose0;
    if (!pose_path.empty()) pose0 = gmc::read_pose(pose_path);

    const auto result = gmc::run_filter_pipeline(matches, pose0, cfg);
    gmc::write_labels(out_path, result.labels);
    if (!refined_pose_out.empty()) gmc::write_pose(refined_pose_out, result.refined_pose);
    if (!report_out.empty()) gmc::write_report(report_out, result.report);

    const auto& r = result.report;
    std::printf("matches %ld  static %ld  dynamic %ld  unknown %ld  rejected %ld\n",
                r.n_matches, r.n_static, r.n_dynamic, r.n_unknown, r.n_rejected);
    std::printf("clusters %zu\n", r.clusters.size());
    for (const auto& c : r.clusters) {
        std::printf("  cluster %d: pass %d bin (%d,%d) cells %d members %d labeled %d\n",
                    c.id, c.pass_id, c.bin.iz, c.bin.ix, c.n_cells, c.n_members,
                    c.n_labeled);
    }
    for (const auto& t : r.timings)
        std::printf("time %-8s %8.3f ms\n", t.stage.c_str(), t.ms);
    std::printf("time %-8s %8.3f ms\n", "total", r.total_ms);
    return 0;
}

int run_simulate(const std::string& scene_path, const std::string& out_matches,
                 const std::string& out_gt) {
    const auto cfg = gmc::read_scene_config(scene_path);
    const auto scene = gmc::generate(cfg);
    if (!out_matches.empty()) gmc::write_matches(out_matches, scene.matches);
    if (!out_gt.empty()) gmc::write_ground_truth(out_gt, scene.truth);
    std::printf("generated %zu matches (%zu dynamic, %zu false)\n",
                scene.matches.size(), scene.truth.dynamic_ids.size(),
                scene.truth.false_match_ids.size());
    return 0;
}

int run_evaluate(const std::string& est_path, const std::string& gt_path,
                 const std::string& mode, int delta) {
    const auto est = gmc::read_trajectory(est_path);
    const auto gt = gmc::read_trajectory(gt_path);
    gmc::TrajectoryMetrics m;
    if (mode == "ate") {
        m = gmc::ate(est, gt);
    } else if (mode == "rpe-trans") {
        m = gmc::rpe(est, gt, delta).translation;
    } else if (mode == "rpe-rot") {
        m = gmc::rpe(est, gt, delta).rotation;
    } else {
        std::cerr << "unknown mode: " << mode << "\n";
        return 2;
    }
    std::printf("rmse %.6f\nmae %.6f\n", m.rmse, m.mae);
    return 0;
}

int run_stats(double t, double beta, double m_ratio, int n, double k,
              long monte_carlo_trials, std::uint64_t seed) {
    gmc::StatModel model{t, beta, m_ratio};
    model.validate();
    const auto rep = gmc::separability(model, n, k);
    std::printf("p_true %.6f\np_false %.6f\n", rep.p_true, rep.p_false);
    std::printf("mean_true %.4f stddev_true %.4f\n", rep.mean_true, rep.stddev_true);
    std::printf("mean_false %.4f stddev_false %.4f\n", rep.mean_false, rep.stddev_false);
    std::printf("threshold %.4f\nseparable %s\n", rep.threshold,
                rep.separable ? "yes" : "no");
    if (monte_carlo_trials > 0) {
        const auto mc = gmc::monte_carlo_check(model, n, monte_carlo_trials, seed);
        std::printf("empirical_p_true %.6f\nempirical_p_false %.6f\n",
                    mc.empirical_p_true, mc.empirical_p_false);
    }
    return 0;
}

int run_bench(const std::string& sizes_csv, std::uint64_t seed) {
    std::vector<int> sizes;
    for (const auto& tok : gmc::io_detail::split(sizes_csv, ','))
        sizes.push_back(std::stoi(tok));
    const auto records = gmc::bench_pipeline(sizes, seed);
    std::printf("n,ms\n");
    for (const auto& r : records)
        std::printf("%d,%.3f\n", r.size, r.ms);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid-based motion clustering: dynamic-point filtering for "
                 "visual odometry front ends"};
    app.require_subcommand(1);

    // filter
    std::string matches_path, pose_path, config_path, out_path, refined_out, report_out;
    auto* filter = app.add_subcommand("filter", "Label correspondences static/dynamic");
    filter->add_option("--matches", matches_path, "matches CSV")->required();
    filter->add_option("--pose", pose_path, "initial pose file (estimated when absent)");
    filter->add_option("--config", config_path, "filter configuration file");
    filter->add_option("--out", out_path, "output labels CSV")->required();
    filter->add_option("--refined-pose-out", refined_out, "refined pose output");
    filter->add_option("--report-out", report_out, "filter report output");

    // simulate
    std::string scene_path, out_matches, out_gt;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scene");
    simulate->add_option("--scene", scene_path, "scene configuration file")->required();
    simulate->add_option("--out-matches", out_matches, "matches CSV output");
    simulate->add_option("--out-gt", out_gt, "ground-truth output");

    // evaluate
    std::string est_path, gt_path, mode = "ate";
    int delta = 1;
    auto* evaluate = app.add_subcommand("evaluate", "Trajectory error metrics");
    evaluate->add_option("--est", est_path, "estimated trajectory")->required();
    evaluate->add_option("--gt", gt_path, "ground-truth trajectory")->required();
    evaluate->add_option("--mode", mode, "ate | rpe-trans | rpe-rot");
    evaluate->add_option("--delta", delta, "RPE frame stride");

    // stats
    double t = 0.6, beta = 1.0, m_ratio = 0.04, k = 3.0;
    int n = 50;
    long mc_trials = 0;
    std::uint64_t stats_seed = 0;
    auto* stats = app.add_subcommand("stats", "Motion-coherence model diagnostics");
    stats->add_option("--t", t, "motion consistency probability");
    stats->add_option("--beta", beta, "assumption violation factor");
    stats->add_option("--m-ratio", m_ratio, "region feature fraction m/M");
    stats->add_option("--n", n, "neighborhood size");
    stats->add_option("--k", k, "threshold sigmas");
    stats->add_option("--monte-carlo", mc_trials, "Monte Carlo trials");
    stats->add_option("--seed", stats_seed, "Monte Carlo seed");

    // bench
    std::string sizes_csv = "1000,2000,4000,8000";
    std::uint64_t bench_seed = 1;
    auto* bench = app.add_subcommand("bench", "Filter runtime vs match count");
    bench->add_option("--sizes", sizes_csv, "comma-separated match counts");
    bench->add_option("--seed", bench_seed, "scene seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (filter->parsed())
            return run_filter(matches_path, pose_path, config_path, out_path,
                              refined_out, report_out);
        if (simulate->parsed())
            return run_simulate(scene_path, out_matches, out_gt);
        if (evaluate->parsed())
            return run_evaluate(est_path, gt_path, mode, delta);
        if (stats->parsed())
            return run_stats(t, beta, m_ratio, n, k, mc_trials, stats_seed);
        if (bench->parsed())
            return run_bench(sizes_csv, bench_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
