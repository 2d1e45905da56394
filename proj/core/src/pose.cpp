#include "gridmotion/pose.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/SVD>

#include "gridmotion/random.hpp"

namespace gmc {

namespace detail {

std::optional<SE3> align_least_squares(std::span<const Vec3> src,
                                       std::span<const Vec3> dst,
                                       bool allow_degenerate) {
    const std::size_t n = src.size();
    if (n == 0 || n != dst.size()) return std::nullopt;

    Vec3 c_src = Vec3::Zero(), c_dst = Vec3::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        c_src += src[i];
        c_dst += dst[i];
    }
    c_src /= static_cast<double>(n);
    c_dst /= static_cast<double>(n);

    Mat3 h = Mat3::Zero();
    for (std::size_t i = 0; i < n; ++i)
        h += (src[i] - c_src) * (dst[i] - c_dst).transpose();

    Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (!allow_degenerate) {
        // Collinear points leave the rotation about the line unconstrained:
        // the cross-covariance then has rank <= 1.
        const auto& sv = svd.singularValues();
        if (n < 3 || sv(1) <= 1e-12 * std::max(sv(0), 1e-300))
            return std::nullopt;
    }

    Mat3 d = Mat3::Identity();
    d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;

    SE3 out;
    out.rotation = svd.matrixV() * d * svd.matrixU().transpose();
    out.translation = c_dst - out.rotation * c_src;
    return out;
}

} // namespace detail

SE3 rigid_align(std::span<const Vec3> src, std::span<const Vec3> dst) {
    if (src.size() != dst.size())
        throw Error("rigid_align: src/dst size mismatch");
    if (src.size() < 3)
        throw Error("rigid_align: at least 3 correspondences required");
    auto result = detail::align_least_squares(src, dst, false);
    if (!result)
        throw Error("rigid_align: degenerate (collinear) point configuration");
    return *result;
}

PoseEstimate estimate_pose(std::span<const Correspondence> matches,
                           const RansacConfig& cfg) {
    const std::size_t n = matches.size();
    if (n < 3)
        throw Error("estimate_pose: at least 3 matches required");
    if (cfg.iterations < 1)
        throw Error("estimate_pose: iterations must be >= 1");
    if (cfg.inlier_threshold <= 0.0)
        throw Error("estimate_pose: inlier_threshold must be positive");

    Rng rng(cfg.seed);
    std::vector<std::uint8_t> best_mask(n, 0);
    int best_count = 0;
    SE3 best_pose;

    std::array<Vec3, 3> sample_src, sample_dst;
    std::vector<std::uint8_t> mask(n);
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        std::size_t idx[3];
        idx[0] = uniform_index(rng, n);
        do { idx[1] = uniform_index(rng, n); } while (idx[1] == idx[0]);
        do { idx[2] = uniform_index(rng, n); } while (idx[2] == idx[0] || idx[2] == idx[1]);
        for (int k = 0; k < 3; ++k) {
            sample_src[k] = matches[idx[k]].x_ma;
            sample_dst[k] = matches[idx[k]].x_re;
        }
        const auto pose = detail::align_least_squares(sample_src, sample_dst, false);
        if (!pose) continue;

        int count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double err = (matches[i].x_re - (*pose) * matches[i].x_ma).norm();
            mask[i] = err <= cfg.inlier_threshold ? 1 : 0;
            count += mask[i];
        }
        if (count > best_count) { // ties keep the earliest iteration
            best_count = count;
            best_mask = mask;
            best_pose = *pose;
        }
    }

    if (best_count < 3)
        throw Error("estimate_pose: consensus below 3 inliers");

    std::vector<Vec3> src, dst;
    src.reserve(best_count);
    dst.reserve(best_count);
    for (std::size_t i = 0; i < n; ++i) {
        if (!best_mask[i]) continue;
        src.push_back(matches[i].x_ma);
        dst.push_back(matches[i].x_re);
    }
    // A degenerate refit (all inliers collinear) keeps the sample pose.
    if (const auto refit = detail::align_least_squares(src, dst, false))
        best_pose = *refit;

    return {best_pose, std::move(best_mask), best_count};
}

SE3 refine_pose(std::span<const Correspondence> matches, const LabelMap& labels) {
    std::vector<Vec3> src, dst;
    for (const auto& m : matches) {
        if (labels.at(m.id).label != Label::Static) continue;
        src.push_back(m.x_ma);
        dst.push_back(m.x_re);
    }
    if (src.size() < 3)
        throw Error("refine_pose: fewer than 3 Static-labeled matches");
    auto result = detail::align_least_squares(src, dst, false);
    if (!result)
        throw Error("refine_pose: degenerate static point configuration");
    return *result;
}

} // namespace gmc
