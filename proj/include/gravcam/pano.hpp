#pragma once

// Equirectangular resampling: perspective crops, cube faces, FoV masks and
// in-plane roll warping.
//
// Equirect mapping for a W x H panorama (W = 2H): longitude in [-180, 180)
// maps to u = (lon / 360 + 0.5) * W and latitude in [-90, 90] to
// v = (0.5 - lat / 180) * H. Longitude is atan2(x, z) of a world direction and
// latitude its elevation above the XZ plane. Pixel centers sit at +0.5.
// All resampling is bilinear.

#include "gravcam/geom.hpp"
#include "gravcam/image.hpp"
#include "gravcam/pose.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace gravcam {

/// Throws InvalidArgument unless `img` is a non-empty 2:1 image.
void require_equirect(const Image& img);

/// Continuous equirect coordinates (u, v) of a world direction.
Eigen::Vector2d direction_to_equirect(const Vec3& d, int width, int height);
/// Unit world direction of continuous equirect coordinates.
Vec3 equirect_to_direction(double u, double v, int width, int height);
/// (longitude, latitude) in degrees of a world direction.
Eigen::Vector2d direction_to_lonlat(const Vec3& d);

/// Bilinear lookup at continuous equirect coordinates, longitude wrapping,
/// latitude clamped. Writes `src.channels` values to `out`.
void sample_equirect(const Image& src, double u, double v, float* out);

struct PerspectiveFrame {
    Image image;
    Intrinsics intrinsics;
    Rotation pose_rotation;  ///< camera-to-panorama
};

/// Renders a pinhole crop looking along `rotation`. The exact pole direction
/// samples the mean of the pole row. `jobs` splits rows across threads.
PerspectiveFrame render_perspective(const Image& src, const Rotation& rotation, double fov_h,
                                    int out_w, int out_h, int jobs = 1);

enum class CubeFace { front, back, left, right, top, bottom };
inline constexpr std::array<CubeFace, 6> kCubeFaces{CubeFace::front, CubeFace::back,
                                                    CubeFace::left,  CubeFace::right,
                                                    CubeFace::top,   CubeFace::bottom};
const char* cube_face_name(CubeFace face);
Rotation cube_face_rotation(CubeFace face);

/// Six 90-degree square renders in kCubeFaces order.
std::array<PerspectiveFrame, 6> extract_cube_faces(const Image& src, int face_size, int jobs = 1);

/// Binary equirect map of the directions seen by a crop.
struct EquirectMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  ///< 0 or 1, row-major

    std::uint8_t at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                    static_cast<std::size_t>(x)];
    }
    /// Solid angle covered (steradians), each pixel weighted by its area on the sphere.
    double solid_angle() const;
    /// Single-channel 8-bit image with 0 / 1 values.
    Image to_image() const;
};

/// Mask pixel is 1 iff its direction d satisfies, in camera coordinates,
/// z > 0, |x/z| <= tan(fov_h/2) and |y/z| <= tan(fov_v/2), where
/// tan(fov_v/2) = tan(fov_h/2) / crop_aspect.
EquirectMask fov_mask(const Rotation& rotation, double fov_h, double crop_aspect, int out_w,
                      int out_h);

/// Scale (<= 1) of the largest centered axis-aligned rectangle of the frame's
/// aspect that fits inside the frame after rotating it by `roll_deg`.
double inscribed_crop_scale(int width, int height, double roll_deg);

/// In-plane rotation about the principal point (K * R_z(roll) * K^-1),
/// cropped to the largest inscribed rectangle and rescaled to the input size.
/// The pose rotation becomes R * R_z(roll) and the focal length grows by the
/// crop factor. |roll| must be < 90.
PerspectiveFrame roll_warp(const PerspectiveFrame& frame, double roll_deg);

}  // namespace gravcam
