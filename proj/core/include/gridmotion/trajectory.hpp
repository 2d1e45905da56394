#pragma once

#include <filesystem>
#include <span>
#include <unordered_set>
#include <vector>

#include "gridmotion/clustering.hpp"
#include "gridmotion/geometry.hpp"

namespace gmc {

struct TimedPose {
    double timestamp = 0.0; // seconds
    SE3 pose;
};

/// Timestamped pose sequence; timestamps strictly increasing.
struct Trajectory {
    std::vector<TimedPose> poses;

    std::size_t size() const { return poses.size(); }
    void append(double timestamp, const SE3& pose); // enforces monotonicity
};

/// rmse plus mae, where mae is the MEDIAN absolute error (not the mean).
/// Units follow the residuals fed in: meters for translation, degrees for
/// rotation.
struct TrajectoryMetrics {
    double rmse = 0.0;
    double mae = 0.0;
};

TrajectoryMetrics metrics_from_residuals(std::span<const double> residuals);

struct RpeMetrics {
    TrajectoryMetrics translation; // meters
    TrajectoryMetrics rotation;    // degrees
};

/// Absolute trajectory error: associates poses by timestamp (within max_dt),
/// rigidly aligns the estimated positions onto ground truth, then reports
/// translational residual statistics. Throws with fewer than 2 associated
/// pairs.
TrajectoryMetrics ate(const Trajectory& est, const Trajectory& gt,
                      double max_dt = 0.02);

/// Relative pose error over stride delta on the associated pose sequence.
RpeMetrics rpe(const Trajectory& est, const Trajectory& gt, int delta,
               double max_dt = 0.02);

struct ClassificationMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Dynamic is the positive class; Unknown counts as negative. Precision and
/// recall are 0 when their denominators vanish.
ClassificationMetrics classification_metrics(const LabelMap& labels,
                                             const std::unordered_set<int>& gt_dynamic);

/// TUM text format: "timestamp tx ty tz qx qy qz qw" per line, '#' comments
/// ignored.
Trajectory read_trajectory(const std::filesystem::path& path);
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);

} // namespace gmc
