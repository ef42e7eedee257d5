#pragma once

// Camera poses (camera-to-world), pinhole intrinsics, relative/absolute pose
// composition and the `.poses.json` manifest codec.

#include "gravcam/geom.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gravcam {

struct CameraPose {
    Rotation rotation;                  ///< camera-to-world
    Vec3 translation = Vec3::Zero();    ///< camera center in world coordinates
    double fov_h = 90.0;                ///< horizontal field of view, degrees

    /// Throws InvalidArgument when translation is non-finite or fov is outside (0, 180).
    void validate() const;

    /// Rigid composition: (*this) applied after `rhs`.
    CameraPose operator*(const CameraPose& rhs) const;
    /// Rigid inverse; fov is carried over.
    CameraPose inverse() const;
};

struct Intrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    double vertical_fov() const;
    double horizontal_fov() const;

    /// Camera-frame ray (z = 1) through continuous pixel position (u, v).
    /// Pixel centers sit at half-integer coordinates; image v grows downward
    /// while camera +Y points up.
    Vec3 ray(double u, double v) const { return {(u - cx) / fx, -(v - cy) / fy, 1.0}; }

    /// Continuous pixel position of a camera-frame direction with z > 0.
    Eigen::Vector2d project(const Vec3& d) const {
        return {cx + fx * d.x() / d.z(), cy - fy * d.y() / d.z()};
    }
};

/// Square-pixel pinhole with the principal point at the image center.
Intrinsics intrinsics_from_fov(double fov_h, int width, int height);

/// E_rel,f = E_0^-1 * E_f. Throws InvalidArgument on an empty list.
std::vector<CameraPose> relative_from_sfm(const std::vector<CameraPose>& sfm_poses);

/// Gravity-aligned poses: each relative pose is premultiplied by
/// yaw_correction(R_pano,0) * R_pano,f, so frame 0 starts at null yaw.
/// Output fov is taken from the relative poses.
std::vector<CameraPose> absolute_poses(const std::vector<Rotation>& pano_rotations,
                                       const std::vector<CameraPose>& rel_poses);

/// Same, replacing each output fov with `fovs[f]`.
std::vector<CameraPose> absolute_poses(const std::vector<Rotation>& pano_rotations,
                                       const std::vector<CameraPose>& rel_poses,
                                       const std::vector<double>& fovs);

/// Pure-rotation poses (translation 0) with per-frame fov.
std::vector<CameraPose> poses_from_rotations(const std::vector<Rotation>& rotations,
                                             const std::vector<double>& fovs);

struct ManifestConvention {
    std::string world_up = "+Y";
    std::string handedness = "right";
    std::string forward = "+Z";
    std::string pose_direction = "camera_to_world";
};

struct PoseManifest {
    int version = 1;
    ManifestConvention convention;
    std::vector<CameraPose> frames;  ///< frame index = position
};

PoseManifest manifest_from_poses(std::vector<CameraPose> poses);

/// Serializes to the JSON manifest text.
std::string serialize_manifest(const PoseManifest& m);

/// Parses manifest text. Rotations drifting by at most 1e-6 are
/// re-orthonormalized; larger drift, reflections, non-contiguous indices or
/// malformed fields throw FormatError naming the frame. Manifests declaring
/// world_to_camera poses are inverted into camera_to_world on load.
PoseManifest parse_manifest(const std::string& text);

PoseManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const PoseManifest& m, const std::filesystem::path& path);

}  // namespace gravcam
