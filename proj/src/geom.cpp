#include "gravcam/geom.hpp"

#include "gravcam/errors.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace gravcam {

namespace {

Mat3 rot_x(double rad) {
    const double c = std::cos(rad), s = std::sin(rad);
    Mat3 m;
    m << 1, 0, 0,
         0, c, -s,
         0, s, c;
    return m;
}

Mat3 rot_y(double rad) {
    const double c = std::cos(rad), s = std::sin(rad);
    Mat3 m;
    m << c, 0, s,
         0, 1, 0,
         -s, 0, c;
    return m;
}

Mat3 rot_z(double rad) {
    const double c = std::cos(rad), s = std::sin(rad);
    Mat3 m;
    m << c, -s, 0,
         s, c, 0,
         0, 0, 1;
    return m;
}

}  // namespace

double orthonormality_drift(const Mat3& m) {
    const double ortho = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
    const double det = std::abs(m.determinant() - 1.0);
    return std::max(ortho, det);
}

Rotation Rotation::from_matrix(const Mat3& m, double tolerance) {
    if (!m.allFinite()) throw InvalidArgument("rotation matrix has non-finite entries");
    const double drift = orthonormality_drift(m);
    if (!(drift <= tolerance)) {
        throw InvalidArgument("matrix is not a proper rotation (drift " + std::to_string(drift) +
                              ", det " + std::to_string(m.determinant()) + ")");
    }
    return Rotation(m, Trusted{});
}

Rotation rotation_from_trusted(const Mat3& m) { return Rotation(m, Rotation::Trusted{}); }

UnitVector3::UnitVector3(const Vec3& v) : v_(v) {
    if (!v.allFinite() || std::abs(v.norm() - 1.0) > 1e-6) {
        throw InvalidArgument("axis is not unit-norm (|a| = " + std::to_string(v.norm()) + ")");
    }
}

UnitVector3 UnitVector3::normalized(const Vec3& v) {
    const double n = v.norm();
    if (!std::isfinite(n) || n == 0.0) throw InvalidArgument("cannot normalize zero vector");
    return UnitVector3(v / n);
}

double wrap_degrees_360(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    if (w >= 360.0) w -= 360.0;
    return w == 0.0 ? 0.0 : w;  // folds -0
}

double wrap_degrees_180(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) w += 360.0;
    if (w > 180.0) w -= 360.0;
    return w == 0.0 ? 0.0 : w;
}

Rotation euler_yxz_to_rotation(const EulerYXZ& e) {
    if (!std::isfinite(e.yaw) || !std::isfinite(e.pitch) || !std::isfinite(e.roll)) {
        throw InvalidArgument("Euler angles must be finite");
    }
    // Pitch is negated about +X so that +pitch maps the optical axis (+Z) towards +Y.
    return rotation_from_trusted(rot_y(deg_to_rad(e.yaw)) * rot_x(-deg_to_rad(e.pitch)) *
                                 rot_z(deg_to_rad(e.roll)));
}

EulerYXZ rotation_to_euler_yxz(const Rotation& r) {
    const Mat3& m = r.matrix();
    // Row 1 of R is world up in camera coordinates: (cos p sin r, cos p cos r, sin p).
    const double pitch = std::atan2(m(1, 2), std::hypot(m(1, 0), m(1, 1)));
    EulerYXZ e;
    e.pitch = rad_to_deg(pitch);
    if (std::abs(e.pitch) >= kGimbalLockPitchDeg) {
        // Camera right axis stays horizontal at the poles: (cos(y +/- r), 0, -sin(y +/- r)).
        e.yaw = wrap_degrees_360(rad_to_deg(std::atan2(-m(2, 0), m(0, 0))));
        e.roll = 0.0;
        return e;
    }
    e.yaw = wrap_degrees_360(rad_to_deg(std::atan2(m(0, 2), m(2, 2))));
    e.roll = wrap_degrees_180(rad_to_deg(std::atan2(m(1, 0), m(1, 1))));
    return e;
}

Rotation axis_angle_exp(const UnitVector3& axis, double theta_deg) {
    if (!std::isfinite(theta_deg)) throw InvalidArgument("rotation angle must be finite");
    const double theta = deg_to_rad(theta_deg);
    Mat3 k;
    k << 0, -axis.z(), axis.y(),
         axis.z(), 0, -axis.x(),
         -axis.y(), axis.x(), 0;
    const Mat3 m = Mat3::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * (k * k);
    return rotation_from_trusted(m);
}

double geodesic_angle(const Rotation& r1, const Rotation& r2) {
    const Mat3 d = r1.matrix().transpose() * r2.matrix();
    const double c = std::clamp((d.trace() - 1.0) * 0.5, -1.0, 1.0);
    const Vec3 axis{d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)};
    const double s = std::min(axis.norm() * 0.5, 1.0);
    return rad_to_deg(std::atan2(s, c));
}

Rotation yaw_correction(const Rotation& r) {
    const double yaw = rotation_to_euler_yxz(r).yaw;
    return rotation_from_trusted(rot_y(-deg_to_rad(yaw)));
}

Rotation remove_yaw(const Rotation& r) { return yaw_correction(r) * r; }

Vec3 camera_frame_up(const Rotation& r) { return r.matrix().transpose() * kWorldUp; }

Mat3 gram_schmidt(const Mat3& m) {
    const Vec3 c0 = m.col(0).normalized();
    const Vec3 c1 = (m.col(1) - c0 * c0.dot(m.col(1))).normalized();
    Mat3 out;
    out.col(0) = c0;
    out.col(1) = c1;
    out.col(2) = c0.cross(c1);
    return out;
}

}  // namespace gravcam
