#pragma once

// Rotation algebra shared by every stage of the pipeline.
//
// Frames: right-handed world with +Y up. Poses are camera-to-world. In the
// camera frame +X is image right, +Y is image up and +Z is the optical axis;
// pixel rows grow downward, so image v maps to camera -Y.
//
// Euler angles use the YXZ intrinsic order: yaw about world up, then pitch
// about the camera right axis (positive pitch lifts the optical axis towards
// the zenith), then roll about the optical axis. All public angles are in
// degrees.

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

#include <numbers>

namespace gravcam {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

/// Pitch magnitude (degrees) at or above which yaw and roll are not separable.
inline constexpr double kGimbalLockPitchDeg = 89.9;

/// Tolerance used to validate orthonormality and unit determinant.
inline constexpr double kRotationTolerance = 1e-9;

inline const Vec3 kWorldUp{0.0, 1.0, 0.0};

/// Largest absolute entry of (m^T m - I) combined with |det(m) - 1|.
double orthonormality_drift(const Mat3& m);

/// Proper rotation matrix. Construction validates the orthonormality and
/// determinant invariants; composition and inversion preserve them.
class Rotation {
public:
    Rotation() : m_(Mat3::Identity()) {}

    /// Throws InvalidArgument when `m` is not a proper rotation within `tolerance`.
    static Rotation from_matrix(const Mat3& m, double tolerance = kRotationTolerance);

    static Rotation identity() { return Rotation(); }

    const Mat3& matrix() const noexcept { return m_; }
    double operator()(int row, int col) const { return m_(row, col); }

    Rotation inverse() const { return Rotation(m_.transpose(), Trusted{}); }
    Rotation operator*(const Rotation& rhs) const { return Rotation(m_ * rhs.m_, Trusted{}); }
    Vec3 operator*(const Vec3& v) const { return m_ * v; }

    bool operator==(const Rotation& rhs) const { return m_ == rhs.m_; }

private:
    struct Trusted {};
    Rotation(const Mat3& m, Trusted) : m_(m) {}

    friend Rotation rotation_from_trusted(const Mat3& m);

    Mat3 m_;
};

/// Wraps a matrix that is a rotation by construction (products of exact
/// elementary rotations). Not validated.
Rotation rotation_from_trusted(const Mat3& m);

/// Yaw in [0, 360), pitch in [-90, 90], roll in (-180, 180].
struct EulerYXZ {
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
};

/// Unit-norm 3-vector.
class UnitVector3 {
public:
    UnitVector3() : v_(0.0, 0.0, 1.0) {}

    /// Throws InvalidArgument when |v| deviates from 1 by more than 1e-6.
    explicit UnitVector3(const Vec3& v);

    /// Normalizes `v`; throws InvalidArgument for zero or non-finite input.
    static UnitVector3 normalized(const Vec3& v);

    const Vec3& vec() const noexcept { return v_; }
    double x() const { return v_.x(); }
    double y() const { return v_.y(); }
    double z() const { return v_.z(); }

private:
    Vec3 v_;
};

/// Intrinsic YXZ composition R = R_y(yaw) * R_pitch * R_z(roll).
Rotation euler_yxz_to_rotation(const EulerYXZ& e);

/// Inverse of euler_yxz_to_rotation. At |pitch| >= 89.9 roll is reported as 0
/// and the residual spin is folded into yaw.
EulerYXZ rotation_to_euler_yxz(const Rotation& r);

/// Rodrigues exponential of `theta_deg` about `axis`.
Rotation axis_angle_exp(const UnitVector3& axis, double theta_deg);

/// Shortest rotation angle between r1 and r2, in [0, 180] degrees.
double geodesic_angle(const Rotation& r1, const Rotation& r2);

/// Rotation about world up by -yaw(r). Premultiplying r by it zeroes the yaw
/// while leaving the camera-frame up vector untouched.
Rotation yaw_correction(const Rotation& r);

/// Keeps pitch and roll of `r`, drops its yaw: yaw_correction(r) * r.
Rotation remove_yaw(const Rotation& r);

/// World up expressed in camera coordinates, r^T * (0, 1, 0).
Vec3 camera_frame_up(const Rotation& r);

/// Gram-Schmidt on the columns of `m`, with the third column rebuilt as the
/// cross product so the result is always proper when the input is near one.
Mat3 gram_schmidt(const Mat3& m);

/// Wraps an angle in degrees into [0, 360).
double wrap_degrees_360(double deg);
/// Wraps an angle in degrees into (-180, 180].
double wrap_degrees_180(double deg);

}  // namespace gravcam
