#pragma once

#include <cstdint>
#include <vector>

#include "gridmotion/geometry.hpp"

namespace gmc {

/// Pinhole camera, no distortion. Pixel bounds are half-open: [0,w) x [0,h).
struct Intrinsics {
    double fx = 525.0, fy = 525.0;
    double cx = 319.5, cy = 239.5;
    int width = 640, height = 480;

    Vec2 project(const Vec3& p) const {
        return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
    }
    Vec3 backproject(double u, double v, double z) const {
        return {(u - cx) / fx * z, (v - cy) / fy * z, z};
    }
    bool in_bounds(const Vec2& px) const {
        return px.x() >= 0.0 && px.x() < width && px.y() >= 0.0 && px.y() < height;
    }
};

/// A rigid box of feature points moving between the two frames.
/// motion acts on world coordinates (the reference camera frame).
struct ObjectConfig {
    int n_points = 300;
    Vec3 center = {0.8, 0.15, 4.5};
    double extent = 0.6; // cube edge length, meters
    SE3 motion;          // applied in the world (reference) frame
};

/// Synthetic two-frame scene.
///
/// camera_motion maps reference-frame point coordinates into matched-frame
/// coordinates (the camera's ego motion, as a coordinate transform). The
/// pose the filter consumes is its inverse, published as GroundTruth.pose.
struct SceneConfig {
    Intrinsics intrinsics;
    int n_static = 2000;
    double z_min = 2.0, z_max = 8.0; // static point depth range, matched frame
    SE3 camera_motion;
    std::vector<ObjectConfig> objects;
    double pixel_noise_sigma = 0.0; // pixels, per frame
    double depth_noise_sigma = 0.0; // relative, per frame
    double false_match_rate = 0.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct GroundTruth {
    SE3 pose; // camera_motion.inverse(): maps matched-frame points to the reference frame
    std::vector<int> dynamic_ids;              // sorted
    std::vector<std::vector<int>> object_members; // per configured object
    std::vector<int> false_match_ids;          // sorted
};

struct Scene {
    std::vector<Correspondence> matches;
    GroundTruth truth;
};

/// Deterministic scene generation. Static points are sampled in the matched
/// frustum and transported with GroundTruth.pose through the same
/// transform_point the residual uses, so zero-noise static residuals are
/// exactly zero. With nonzero noise the emitted 3D points are back-projected
/// from the noisy pixels/depths, keeping pixels and points consistent.
/// Points that cannot be placed in both frusta are resampled (bounded
/// retries), else the config is rejected.
Scene generate(const SceneConfig& cfg);

/// Swaps the matched-side entries of floor(rate * N) seeded-random
/// correspondences among themselves (cyclic), producing geometrically
/// inconsistent pairs. Returns the corrupted ids, sorted.
std::vector<int> inject_false_matches(std::vector<Correspondence>& matches,
                                      double rate, std::uint64_t seed);

/// The stock evaluation scene: 2000 static points at 2-8 m, one 300-point
/// object moving 0.3 m laterally per frame, 0.5 px pixel noise, 1% depth
/// noise.
SceneConfig default_scene();

} // namespace gmc
