#include "gridmotion/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "gridmotion/io.hpp"
#include "gridmotion/pose.hpp"

namespace gmc {

void Trajectory::append(double timestamp, const SE3& pose) {
    if (!poses.empty() && timestamp <= poses.back().timestamp)
        throw Error("Trajectory: timestamps must be strictly increasing");
    poses.push_back({timestamp, pose});
}

TrajectoryMetrics metrics_from_residuals(std::span<const double> residuals) {
    if (residuals.empty())
        throw Error("metrics_from_residuals: empty residual set");
    double sq = 0.0;
    std::vector<double> abs_sorted(residuals.begin(), residuals.end());
    for (double& r : abs_sorted) {
        sq += r * r;
        r = std::abs(r);
    }
    std::sort(abs_sorted.begin(), abs_sorted.end());
    TrajectoryMetrics m;
    m.rmse = std::sqrt(sq / static_cast<double>(residuals.size()));
    const std::size_t n = abs_sorted.size();
    m.mae = (n % 2 == 1) ? abs_sorted[n / 2]
                         : 0.5 * (abs_sorted[n / 2 - 1] + abs_sorted[n / 2]);
    return m;
}

namespace {

// Greedy in-order timestamp association; each ground-truth pose is used at
// most once.
std::vector<std::pair<std::size_t, std::size_t>> associate(const Trajectory& est,
                                                           const Trajectory& gt,
                                                           double max_dt) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t j = 0;
    for (std::size_t i = 0; i < est.poses.size(); ++i) {
        const double t = est.poses[i].timestamp;
        while (j + 1 < gt.poses.size() &&
               std::abs(gt.poses[j + 1].timestamp - t) <=
                   std::abs(gt.poses[j].timestamp - t)) {
            ++j;
        }
        if (j < gt.poses.size() && std::abs(gt.poses[j].timestamp - t) <= max_dt) {
            pairs.emplace_back(i, j);
            ++j;
            if (j >= gt.poses.size()) break;
        }
    }
    return pairs;
}

// Angle between two rotations via the relative quaternion. The atan2 form is
// stable near zero, and bitwise-identical inputs give exactly 0.
double rotation_gap_deg(const Mat3& a, const Mat3& b) {
    const Eigen::Quaterniond qa(a), qb(b);
    const Eigen::Quaterniond rel = qa.conjugate() * qb;
    const double angle =
        2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
    return angle * 180.0 / M_PI;
}

} // namespace

TrajectoryMetrics ate(const Trajectory& est, const Trajectory& gt, double max_dt) {
    const auto pairs = associate(est, gt, max_dt);
    if (pairs.size() < 2)
        throw Error("ate: fewer than 2 associated pose pairs");

    std::vector<Vec3> src, dst;
    src.reserve(pairs.size());
    dst.reserve(pairs.size());
    for (const auto& [i, j] : pairs) {
        src.push_back(est.poses[i].pose.translation);
        dst.push_back(gt.poses[j].pose.translation);
    }
    // Degenerate position sets (e.g. 2 poses) are legal here; the SVD still
    // produces a deterministic minimizer.
    const auto align = detail::align_least_squares(src, dst, true);
    if (!align)
        throw Error("ate: trajectory alignment failed");

    std::vector<double> residuals;
    residuals.reserve(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k)
        residuals.push_back((dst[k] - (*align) * src[k]).norm());
    return metrics_from_residuals(residuals);
}

RpeMetrics rpe(const Trajectory& est, const Trajectory& gt, int delta, double max_dt) {
    if (delta < 1)
        throw Error("rpe: delta must be >= 1");
    const auto pairs = associate(est, gt, max_dt);
    if (pairs.size() < static_cast<std::size_t>(delta) + 1)
        throw Error("rpe: fewer than delta+1 associated poses");

    std::vector<double> trans_err, rot_err;
    for (std::size_t k = 0; k + delta < pairs.size(); ++k) {
        const SE3& e0 = est.poses[pairs[k].first].pose;
        const SE3& e1 = est.poses[pairs[k + delta].first].pose;
        const SE3& g0 = gt.poses[pairs[k].second].pose;
        const SE3& g1 = gt.poses[pairs[k + delta].second].pose;
        const SE3 rel_est = e0.inverse() * e1;
        const SE3 rel_gt = g0.inverse() * g1;
        trans_err.push_back(
            (rel_gt.rotation.transpose() * (rel_est.translation - rel_gt.translation))
                .norm());
        rot_err.push_back(rotation_gap_deg(rel_gt.rotation, rel_est.rotation));
    }
    return {metrics_from_residuals(trans_err), metrics_from_residuals(rot_err)};
}

ClassificationMetrics classification_metrics(const LabelMap& labels,
                                             const std::unordered_set<int>& gt_dynamic) {
    for (int id : gt_dynamic) {
        if (!labels.contains(id))
            throw Error("classification_metrics: ground-truth id " +
                        std::to_string(id) + " missing from labels");
    }
    ClassificationMetrics m;
    for (int id : labels.ids) {
        const bool predicted = labels.at(id).label == Label::Dynamic;
        const bool actual = gt_dynamic.count(id) != 0;
        if (predicted && actual) ++m.tp;
        else if (predicted && !actual) ++m.fp;
        else if (!predicted && actual) ++m.fn;
        else ++m.tn;
    }
    m.precision = (m.tp + m.fp) > 0 ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
    m.recall = (m.tp + m.fn) > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

Trajectory read_trajectory(const std::filesystem::path& path) {
    const auto lines = io_detail::read_lines(path);
    io_detail::check_format_version(lines, path.string());
    Trajectory traj;
    for (const auto& [line_no, text] : lines) {
        if (text.empty() || text[0] == '#') continue;
        const auto fields = io_detail::split_ws(text);
        if (fields.size() != 8)
            throw ParseError(path.string(), line_no,
                             "expected 8 fields (timestamp tx ty tz qx qy qz qw), got " +
                                 std::to_string(fields.size()));
        double v[8];
        for (int k = 0; k < 8; ++k)
            v[k] = io_detail::parse_double(fields[k], path.string(), line_no);
        const Eigen::Quaterniond q(v[7], v[4], v[5], v[6]);
        if (q.norm() == 0.0)
            throw ParseError(path.string(), line_no, "zero quaternion");
        if (!traj.poses.empty() && v[0] <= traj.poses.back().timestamp)
            throw ParseError(path.string(), line_no,
                             "timestamps must be strictly increasing");
        traj.poses.push_back({v[0], SE3::from_quaternion(q, {v[1], v[2], v[3]})});
    }
    return traj;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
    std::string out{kFormatHeader};
    out += "\n# trajectory: timestamp tx ty tz qx qy qz qw\n";
    for (const auto& tp : traj.poses) {
        const auto q = tp.pose.quaternion();
        out += io_detail::format_double(tp.timestamp);
        for (double v : {tp.pose.translation.x(), tp.pose.translation.y(),
                         tp.pose.translation.z(), q.x(), q.y(), q.z(), q.w()}) {
            out += ' ';
            out += io_detail::format_double(v);
        }
        out += '\n';
    }
    atomic_write_text(path, out);
}

} // namespace gmc
