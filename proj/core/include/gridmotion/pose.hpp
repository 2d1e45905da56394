#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gridmotion/clustering.hpp"
#include "gridmotion/geometry.hpp"

namespace gmc {

struct RansacConfig {
    int iterations = 200;
    double inlier_threshold = 0.05; // meters, on the raw residual norm
    std::uint64_t seed = 0;
};

/// Closed-form least-squares rigid alignment (orthogonal Procrustes with
/// reflection guard): returns the SE3 minimizing sum ||dst_i - (R*src_i + t)||^2.
/// Throws on fewer than 3 pairs or a collinear source set.
SE3 rigid_align(std::span<const Vec3> src, std::span<const Vec3> dst);

namespace detail {
/// Alignment core. With allow_degenerate the rank check is skipped (used for
/// trajectory alignment, where two poses are legal); returns nullopt only on
/// a detected degenerate configuration.
std::optional<SE3> align_least_squares(std::span<const Vec3> src,
                                       std::span<const Vec3> dst,
                                       bool allow_degenerate);
} // namespace detail

struct PoseEstimate {
    SE3 pose;                     // maps matched-frame points into the reference frame
    std::vector<std::uint8_t> inliers; // parallel to the input matches
    int inlier_count = 0;
};

/// RANSAC consensus pose over minimal samples of 3, scored by the raw
/// residual norm, refit on the final inlier set. Deterministic under a fixed
/// seed. Throws when no consensus of at least 3 inliers exists.
PoseEstimate estimate_pose(std::span<const Correspondence> matches,
                           const RansacConfig& cfg);

/// Rigid alignment restricted to Static-labeled correspondences.
/// Throws when fewer than 3 are available.
SE3 refine_pose(std::span<const Correspondence> matches, const LabelMap& labels);

} // namespace gmc
