#include "gridmotion/geometry.hpp"

#include <cmath>

namespace gmc {

SE3 SE3::from_axis_angle(const Vec3& axis, double angle_rad, const Vec3& translation) {
    SE3 out;
    const double n = axis.norm();
    if (n <= 0.0)
        throw Error("SE3::from_axis_angle: zero axis");
    out.rotation = Eigen::AngleAxisd(angle_rad, axis / n).toRotationMatrix();
    out.translation = translation;
    return out;
}

SE3 SE3::from_quaternion(const Eigen::Quaterniond& q, const Vec3& translation) {
    SE3 out;
    out.rotation = q.normalized().toRotationMatrix();
    out.translation = translation;
    return out;
}

Eigen::Quaterniond SE3::quaternion() const {
    Eigen::Quaterniond q(rotation);
    q.normalize();
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    return q;
}

SE3 SE3::inverse() const {
    SE3 out;
    out.rotation = rotation.transpose();
    out.translation = -(out.rotation * translation);
    return out;
}

SE3 SE3::operator*(const SE3& rhs) const {
    SE3 out;
    out.rotation = rotation * rhs.rotation;
    out.translation = rotation * rhs.translation + translation;
    return out;
}

bool SE3::is_valid(double tol) const {
    if (!rotation.allFinite() || !translation.allFinite()) return false;
    const Mat3 rtr = rotation.transpose() * rotation;
    if ((rtr - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(rotation.determinant() - 1.0) <= tol;
}

Residual residual(const Correspondence& c, const SE3& pose, double alpha) {
    if (alpha <= 0.0)
        throw Error("residual: alpha must be positive");
    const double dist = c.x_ma.norm();
    if (dist == 0.0)
        throw Error("residual: matched point at camera center (||x_ma|| = 0)");
    Residual r;
    r.raw = c.x_re - transform_point(pose, c.x_ma);
    r.normalized = r.raw * (alpha / dist);
    return r;
}

namespace {

int quantize_axis(double value, double interval, int max_bin) {
    // llround rounds halfway cases away from zero, which preserves the sign
    // antisymmetry of the pattern table.
    const long long b = std::llround(value / interval);
    if (b > max_bin) return max_bin;
    if (b < -max_bin) return -max_bin;
    return static_cast<int>(b);
}

} // namespace

MotionBin quantize(const Residual& r, double e_int_z, double e_int_x, int bins_per_axis) {
    if (e_int_z <= 0.0 || e_int_x <= 0.0)
        throw Error("quantize: residual intervals must be positive");
    if (bins_per_axis < 3 || bins_per_axis % 2 == 0)
        throw Error("quantize: bins_per_axis must be odd and >= 3");
    const int max_bin = (bins_per_axis - 1) / 2;
    MotionBin bin;
    bin.iz = quantize_axis(r.normalized.z(), e_int_z, max_bin);
    bin.ix = quantize_axis(r.normalized.x(), e_int_x, max_bin);
    return bin;
}

} // namespace gmc
