#include "gravcam/pano.hpp"

#include "gravcam/errors.hpp"
#include "gravcam/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gravcam {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Bilinear lookup with clamp-to-edge on both axes (perspective images).
void sample_clamped(const Image& src, double u, double v, float* out) {
    const double x = std::clamp(u - 0.5, 0.0, static_cast<double>(src.width - 1));
    const double y = std::clamp(v - 0.5, 0.0, static_cast<double>(src.height - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, src.width - 1);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const float wx = static_cast<float>(x - x0);
    const float wy = static_cast<float>(y - y0);
    for (int c = 0; c < src.channels; ++c) {
        const float top = src.at(x0, y0, c) + wx * (src.at(x1, y0, c) - src.at(x0, y0, c));
        const float bot = src.at(x0, y1, c) + wx * (src.at(x1, y1, c) - src.at(x0, y1, c));
        out[c] = top + wy * (bot - top);
    }
}

std::vector<float> row_mean(const Image& src, int row) {
    std::vector<double> acc(static_cast<std::size_t>(src.channels), 0.0);
    for (int x = 0; x < src.width; ++x)
        for (int c = 0; c < src.channels; ++c) acc[static_cast<std::size_t>(c)] += src.at(x, row, c);
    std::vector<float> out(acc.size());
    for (std::size_t c = 0; c < acc.size(); ++c) out[c] = static_cast<float>(acc[c] / src.width);
    return out;
}

}  // namespace

void require_equirect(const Image& img) {
    if (img.empty() || img.width != 2 * img.height) {
        throw InvalidArgument("equirectangular frame must be 2:1 (got " + std::to_string(img.width) +
                              "x" + std::to_string(img.height) + ")");
    }
}

Eigen::Vector2d direction_to_lonlat(const Vec3& d) {
    const double lon = std::atan2(d.x(), d.z());
    const double lat = std::atan2(d.y(), std::sqrt(d.x() * d.x() + d.z() * d.z()));
    return {rad_to_deg(lon), rad_to_deg(lat)};
}

Eigen::Vector2d direction_to_equirect(const Vec3& d, int width, int height) {
    const double lon = std::atan2(d.x(), d.z());
    const double lat = std::atan2(d.y(), std::sqrt(d.x() * d.x() + d.z() * d.z()));
    return {(lon / kTwoPi + 0.5) * width, (0.5 - lat / kPi) * height};
}

Vec3 equirect_to_direction(double u, double v, int width, int height) {
    const double lon = (u / width - 0.5) * kTwoPi;
    const double lat = (0.5 - v / height) * kPi;
    const double c = std::cos(lat);
    return {c * std::sin(lon), std::sin(lat), c * std::cos(lon)};
}

void sample_equirect(const Image& src, double u, double v, float* out) {
    const int w = src.width, h = src.height;
    const double x = u - 0.5;
    const double xf = std::floor(x);
    const float wx = static_cast<float>(x - xf);
    int x0 = static_cast<int>(static_cast<long long>(xf) % w);
    if (x0 < 0) x0 += w;
    const int x1 = x0 + 1 == w ? 0 : x0 + 1;

    const double y = v - 0.5;
    int y0, y1;
    float wy;
    if (y <= 0.0) {
        y0 = y1 = 0;
        wy = 0.0f;
    } else if (y >= h - 1) {
        y0 = y1 = h - 1;
        wy = 0.0f;
    } else {
        y0 = static_cast<int>(y);
        y1 = y0 + 1;
        wy = static_cast<float>(y - y0);
    }
    const std::size_t ch = static_cast<std::size_t>(src.channels);
    const float* p00 = &src.data[src.index(x0, y0)];
    const float* p10 = &src.data[src.index(x1, y0)];
    const float* p01 = &src.data[src.index(x0, y1)];
    const float* p11 = &src.data[src.index(x1, y1)];
    for (std::size_t c = 0; c < ch; ++c) {
        const float top = p00[c] + wx * (p10[c] - p00[c]);
        const float bot = p01[c] + wx * (p11[c] - p01[c]);
        out[c] = top + wy * (bot - top);
    }
}

PerspectiveFrame render_perspective(const Image& src, const Rotation& rotation, double fov_h,
                                    int out_w, int out_h, int jobs) {
    require_equirect(src);
    PerspectiveFrame out;
    out.intrinsics = intrinsics_from_fov(fov_h, out_w, out_h);
    out.pose_rotation = rotation;
    out.image = Image(out_w, out_h, src.channels, src.depth);

    const std::vector<float> north = row_mean(src, 0);
    const std::vector<float> south = row_mean(src, src.height - 1);
    const Mat3& m = rotation.matrix();
    const Intrinsics& k = out.intrinsics;
    const double w = src.width, h = src.height;
    const std::size_t ch = static_cast<std::size_t>(src.channels);

    parallel_for(static_cast<std::size_t>(out_h), jobs, [&](std::size_t row) {
        const int y = static_cast<int>(row);
        const double ry = -(y + 0.5 - k.cy) / k.fy;
        const Vec3 base = m.col(1) * ry + m.col(2);
        const Vec3 step = m.col(0) / k.fx;
        float* dst = &out.image.data[out.image.index(0, y)];
        for (int x = 0; x < out_w; ++x, dst += ch) {
            const Vec3 d = base + step * (x + 0.5 - k.cx);
            const double horiz = std::sqrt(d.x() * d.x() + d.z() * d.z());
            if (horiz == 0.0) {
                const auto& pole = d.y() > 0.0 ? north : south;
                std::copy(pole.begin(), pole.end(), dst);
                continue;
            }
            const double lon = std::atan2(d.x(), d.z());
            const double lat = std::atan2(d.y(), horiz);
            sample_equirect(src, (lon / kTwoPi + 0.5) * w, (0.5 - lat / kPi) * h, dst);
        }
    });
    return out;
}

const char* cube_face_name(CubeFace face) {
    switch (face) {
        case CubeFace::front: return "front";
        case CubeFace::back: return "back";
        case CubeFace::left: return "left";
        case CubeFace::right: return "right";
        case CubeFace::top: return "top";
        case CubeFace::bottom: return "bottom";
    }
    return "?";
}

Rotation cube_face_rotation(CubeFace face) {
    switch (face) {
        case CubeFace::front: return euler_yxz_to_rotation({0.0, 0.0, 0.0});
        case CubeFace::back: return euler_yxz_to_rotation({180.0, 0.0, 0.0});
        case CubeFace::left: return euler_yxz_to_rotation({-90.0, 0.0, 0.0});
        case CubeFace::right: return euler_yxz_to_rotation({90.0, 0.0, 0.0});
        case CubeFace::top: return euler_yxz_to_rotation({0.0, 90.0, 0.0});
        case CubeFace::bottom: return euler_yxz_to_rotation({0.0, -90.0, 0.0});
    }
    throw InternalError("unknown cube face");
}

std::array<PerspectiveFrame, 6> extract_cube_faces(const Image& src, int face_size, int jobs) {
    if (face_size < 1) throw InvalidArgument("face_size must be >= 1");
    std::array<PerspectiveFrame, 6> faces;
    for (std::size_t i = 0; i < kCubeFaces.size(); ++i) {
        faces[i] = render_perspective(src, cube_face_rotation(kCubeFaces[i]), 90.0, face_size,
                                      face_size, jobs);
    }
    return faces;
}

double EquirectMask::solid_angle() const {
    const double dlon = kTwoPi / width;
    double total = 0.0;
    for (int y = 0; y < height; ++y) {
        const double lat_top = (0.5 - static_cast<double>(y) / height) * kPi;
        const double lat_bot = (0.5 - static_cast<double>(y + 1) / height) * kPi;
        const double pixel_area = dlon * (std::sin(lat_top) - std::sin(lat_bot));
        long count = 0;
        for (int x = 0; x < width; ++x) count += at(x, y);
        total += pixel_area * static_cast<double>(count);
    }
    return total;
}

Image EquirectMask::to_image() const {
    Image img(width, height, 1, BitDepth::u8);
    for (std::size_t i = 0; i < data.size(); ++i) img.data[i] = static_cast<float>(data[i]);
    return img;
}

EquirectMask fov_mask(const Rotation& rotation, double fov_h, double crop_aspect, int out_w,
                      int out_h) {
    if (!(fov_h > 0.0 && fov_h < 180.0)) {
        throw InvalidArgument("fov must lie in (0, 180) degrees (got " + std::to_string(fov_h) + ")");
    }
    if (!(crop_aspect > 0.0) || !std::isfinite(crop_aspect)) {
        throw InvalidArgument("crop aspect must be positive");
    }
    if (out_h < 1 || out_w != 2 * out_h) throw InvalidArgument("mask must be 2:1");

    const double tan_h = std::tan(deg_to_rad(fov_h) * 0.5);
    const double tan_v = tan_h / crop_aspect;
    const Mat3 to_camera = rotation.matrix().transpose();

    EquirectMask mask;
    mask.width = out_w;
    mask.height = out_h;
    mask.data.assign(static_cast<std::size_t>(out_w) * static_cast<std::size_t>(out_h), 0);
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const Vec3 c = to_camera * equirect_to_direction(x + 0.5, y + 0.5, out_w, out_h);
            const bool inside = c.z() > 0.0 && std::abs(c.x()) <= tan_h * c.z() &&
                                std::abs(c.y()) <= tan_v * c.z();
            mask.data[static_cast<std::size_t>(y) * static_cast<std::size_t>(out_w) +
                      static_cast<std::size_t>(x)] = inside ? 1 : 0;
        }
    }
    return mask;
}

double inscribed_crop_scale(int width, int height, double roll_deg) {
    const double c = std::abs(std::cos(deg_to_rad(roll_deg)));
    const double s = std::abs(std::sin(deg_to_rad(roll_deg)));
    const double w = width, h = height;
    return std::min({1.0, w / (w * c + h * s), h / (w * s + h * c)});
}

PerspectiveFrame roll_warp(const PerspectiveFrame& frame, double roll_deg) {
    if (!std::isfinite(roll_deg) || std::abs(roll_deg) >= 90.0) {
        throw InvalidArgument("roll must satisfy |roll| < 90 (got " + std::to_string(roll_deg) + ")");
    }
    const Image& src = frame.image;
    const Intrinsics& k = frame.intrinsics;
    if (src.empty() || k.width != src.width || k.height != src.height) {
        throw InvalidArgument("roll_warp: intrinsics do not match the image");
    }
    const double scale = inscribed_crop_scale(src.width, src.height, roll_deg);
    const double c = std::cos(deg_to_rad(roll_deg));
    const double s = std::sin(deg_to_rad(roll_deg));

    PerspectiveFrame out;
    out.image = Image(src.width, src.height, src.channels, src.depth);
    out.intrinsics = k;
    out.intrinsics.fx = k.fx / scale;
    out.intrinsics.fy = k.fy / scale;
    out.pose_rotation = frame.pose_rotation * euler_yxz_to_rotation({0.0, 0.0, roll_deg});

    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            // Output pixel -> camera ray of the cropped view -> rotate -> source pixel.
            const Vec3 r = k.ray(k.cx + (x + 0.5 - k.cx) * scale, k.cy + (y + 0.5 - k.cy) * scale);
            const Vec3 rotated{c * r.x() - s * r.y(), s * r.x() + c * r.y(), 1.0};
            const Eigen::Vector2d q = k.project(rotated);
            sample_clamped(src, q.x(), q.y(), &out.image.data[out.image.index(x, y)]);
        }
    }
    return out;
}

}  // namespace gravcam
