#pragma once

// Per-pixel Plücker ray buffers and the `.plk` tensor file.
//
// File layout: 8-byte magic "PLKRTEN1", uint32 little-endian header length,
// UTF-8 JSON header {"dims": [F, H, W, 6], "dtype": "f32", "channel_order":
// [...]}, then the raw little-endian float32 payload in F, H, W, 6 order.

#include "gravcam/pose.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

namespace gravcam {

/// F x H x W x 6 float32 tensor, channels (m_x, m_y, m_z, d_x, d_y, d_z).
struct PluckerMap {
    int frames = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    static constexpr int kChannels = 6;

    std::size_t offset(int f, int y, int x) const {
        return ((static_cast<std::size_t>(f) * static_cast<std::size_t>(height) +
                 static_cast<std::size_t>(y)) *
                    static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)) *
               kChannels;
    }
    const float* pixel(int f, int y, int x) const { return &data[offset(f, y, x)]; }

    bool operator==(const PluckerMap&) const = default;
};

inline constexpr std::array<const char*, 6> kPluckerChannelOrder{"m_x", "m_y", "m_z",
                                                                 "d_x", "d_y", "d_z"};

/// For every pose and pixel center, d' = normalize(R * ray(u + 0.5, v + 0.5))
/// and m = t x d'. Intrinsics come from each pose's fov at width x height.
PluckerMap plucker_map(const std::vector<CameraPose>& poses, int width, int height, int jobs = 1);

void write_plucker(const PluckerMap& map, const std::filesystem::path& path);
PluckerMap read_plucker(const std::filesystem::path& path);

/// In-memory codec used by the file functions.
std::vector<std::byte> encode_plucker(const PluckerMap& map);
PluckerMap decode_plucker(const std::vector<std::byte>& bytes);

}  // namespace gravcam
