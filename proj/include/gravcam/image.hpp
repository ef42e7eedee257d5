#pragma once

// Float image buffers plus PNG (8-bit) and PFM (float) codecs.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace gravcam {

enum class BitDepth { u8, f32 };

/// Interleaved, row-major float image. 8-bit sources are scaled to [0, 1].
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    BitDepth depth = BitDepth::f32;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, int c, BitDepth d = BitDepth::f32);

    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)) *
                   static_cast<std::size_t>(channels) +
               static_cast<std::size_t>(c);
    }
    float& at(int x, int y, int c = 0) { return data[index(x, y, c)]; }
    float at(int x, int y, int c = 0) const { return data[index(x, y, c)]; }

    bool empty() const { return data.empty(); }
};

/// Reads `.png` or `.pfm` by extension. Throws FormatError on failure.
Image read_image(const std::filesystem::path& path);

/// Writes `.png` (values clamped to [0, 1] and quantized) or `.pfm`
/// (1 or 3 channels) by extension. Throws FormatError on failure.
void write_image(const Image& img, const std::filesystem::path& path);

/// File extension matching an image's source depth: ".png" or ".pfm".
std::string extension_for(BitDepth depth);

/// Sorted `frame_%05d.{png,pfm}` files of a frame directory.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// `frame_%05d` + ext.
std::string frame_filename(int index, const std::string& ext);

}  // namespace gravcam
