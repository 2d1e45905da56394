#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "gridmotion/error.hpp"

namespace gmc {

// Camera coordinates: x lateral, y vertical, z depth along the optical axis.
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform acting on points as p' = rotation * p + translation.
struct SE3 {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    static SE3 identity() { return {}; }
    static SE3 from_axis_angle(const Vec3& axis, double angle_rad,
                               const Vec3& translation = Vec3::Zero());
    static SE3 from_quaternion(const Eigen::Quaterniond& q, const Vec3& translation);

    Eigen::Quaterniond quaternion() const; // normalized, w >= 0

    SE3 inverse() const;
    SE3 operator*(const SE3& rhs) const;  // composition: (*this) after rhs
    Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

    /// Orthonormal rotation with determinant +1, within tol.
    bool is_valid(double tol = 1e-9) const;
};

inline Vec3 transform_point(const SE3& pose, const Vec3& p) { return pose * p; }

/// One matched feature between two frames: pixel coordinates plus the 3D
/// point expressed in each frame's camera coordinates.
struct Correspondence {
    int id = 0;
    Vec2 px_re = Vec2::Zero(); // pixel (u, v) in the reference frame
    Vec2 px_ma = Vec2::Zero(); // pixel (u, v) in the matched frame
    Vec3 x_re = Vec3::Zero();  // 3D point, reference-frame camera coordinates
    Vec3 x_ma = Vec3::Zero();  // 3D point, matched-frame camera coordinates
};

/// 3D residual of one correspondence under a pose hypothesis.
/// raw is in meters; normalized is raw scaled by alpha / ||x_ma||, which makes
/// the magnitude invariant to uniformly rescaling the scene and damps the
/// depth-proportional triangulation noise of far points.
struct Residual {
    Vec3 raw = Vec3::Zero();
    Vec3 normalized = Vec3::Zero();
};

/// Quantized residual class on the (z, x) motion-pattern table.
/// (0, 0) is the static bin; indices run in [-B, +B], B = (bins_per_axis-1)/2.
struct MotionBin {
    int iz = 0;
    int ix = 0;

    bool is_static() const { return iz == 0 && ix == 0; }
    MotionBin operator-() const { return {-iz, -ix}; }
    friend bool operator==(const MotionBin&, const MotionBin&) = default;
    friend auto operator<=>(const MotionBin&, const MotionBin&) = default;
};

/// raw = x_re - (R * x_ma + t); normalized = raw * alpha / ||x_ma||.
/// Throws on alpha <= 0 or a degenerate matched point at the camera center.
Residual residual(const Correspondence& c, const SE3& pose, double alpha = 1.0);

/// Round-half-away-from-zero binning of (normalized.z, normalized.x), clamped
/// to the outermost bins. The y component is not binned. bins_per_axis must be
/// odd and >= 3.
MotionBin quantize(const Residual& r, double e_int_z, double e_int_x, int bins_per_axis);

} // namespace gmc
