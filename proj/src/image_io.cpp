#include "gravcam/image.hpp"

#include "gravcam/errors.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <regex>
#include <sstream>

namespace gravcam {

namespace fs = std::filesystem;

Image::Image(int w, int h, int c, BitDepth d) : width(w), height(h), channels(c), depth(d) {
    if (w < 1 || h < 1 || c < 1 || c > 4) throw InvalidArgument("invalid image dimensions");
    data.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                    static_cast<std::size_t>(c),
                0.0f);
}

namespace {

std::string lower_ext(const fs::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return e;
}

png_uint_32 png_format(int channels) {
    switch (channels) {
        case 1: return PNG_FORMAT_GRAY;
        case 2: return PNG_FORMAT_GA;
        case 3: return PNG_FORMAT_RGB;
        default: return PNG_FORMAT_RGBA;
    }
}

Image read_png(const fs::path& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str())) {
        throw FormatError("cannot read PNG " + path.string() + ": " + png.message);
    }
    const int channels = static_cast<int>(PNG_IMAGE_SAMPLE_CHANNELS(png.format));
    png.format = png_format(channels);
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        throw FormatError("cannot decode PNG " + path.string() + ": " + msg);
    }
    Image img(static_cast<int>(png.width), static_cast<int>(png.height), channels, BitDepth::u8);
    for (std::size_t i = 0; i < buf.size(); ++i) img.data[i] = static_cast<float>(buf[i]) / 255.0f;
    return img;
}

void write_png(const Image& img, const fs::path& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(img.width);
    png.height = static_cast<png_uint_32>(img.height);
    png.format = png_format(img.channels);
    std::vector<std::uint8_t> buf(img.data.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        const float v = std::clamp(img.data[i], 0.0f, 1.0f);
        buf[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
    if (!png_image_write_to_file(&png, path.c_str(), 0, buf.data(), 0, nullptr)) {
        throw FormatError("cannot write PNG " + path.string() + ": " + png.message);
    }
}

// PFM stores rows bottom-to-top; a negative scale means little-endian.
Image read_pfm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open PFM " + path.string());
    std::string magic;
    int w = 0, h = 0;
    double scale = 0.0;
    in >> magic >> w >> h >> scale;
    in.get();
    if (!in || (magic != "PF" && magic != "Pf") || w < 1 || h < 1 || scale == 0.0) {
        throw FormatError("malformed PFM header in " + path.string());
    }
    const int channels = magic == "PF" ? 3 : 1;
    Image img(w, h, channels, BitDepth::f32);
    const bool little = scale < 0.0;
    const std::size_t row = static_cast<std::size_t>(w) * static_cast<std::size_t>(channels);
    std::vector<std::uint8_t> bytes(row * 4);
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!in) throw FormatError("truncated PFM payload in " + path.string());
        for (std::size_t i = 0; i < row; ++i) {
            std::uint32_t u = 0;
            for (int b = 0; b < 4; ++b) {
                const std::uint32_t byte = bytes[i * 4 + static_cast<std::size_t>(b)];
                u |= little ? byte << (8 * b) : byte << (8 * (3 - b));
            }
            float f;
            std::memcpy(&f, &u, 4);
            img.data[static_cast<std::size_t>(y) * row + i] = f;
        }
    }
    return img;
}

void write_pfm(const Image& img, const fs::path& path) {
    if (img.channels != 1 && img.channels != 3) {
        throw FormatError("PFM supports 1 or 3 channels, image has " + std::to_string(img.channels));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write PFM " + path.string());
    out << (img.channels == 3 ? "PF" : "Pf") << "\n" << img.width << " " << img.height << "\n-1.0\n";
    const std::size_t row = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.channels);
    std::vector<std::uint8_t> bytes(row * 4);
    for (int y = img.height - 1; y >= 0; --y) {
        for (std::size_t i = 0; i < row; ++i) {
            std::uint32_t u;
            std::memcpy(&u, &img.data[static_cast<std::size_t>(y) * row + i], 4);
            for (int b = 0; b < 4; ++b) bytes[i * 4 + static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(u >> (8 * b));
        }
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    if (!out) throw FormatError("failed writing PFM " + path.string());
}

}  // namespace

Image read_image(const fs::path& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".png") return read_png(path);
    if (ext == ".pfm") return read_pfm(path);
    throw FormatError("unsupported image extension '" + ext + "' (" + path.string() + ")");
}

void write_image(const Image& img, const fs::path& path) {
    if (img.empty()) throw InvalidArgument("cannot write an empty image");
    const std::string ext = lower_ext(path);
    if (ext == ".png") return write_png(img, path);
    if (ext == ".pfm") return write_pfm(img, path);
    throw FormatError("unsupported image extension '" + ext + "' (" + path.string() + ")");
}

std::string extension_for(BitDepth depth) { return depth == BitDepth::u8 ? ".png" : ".pfm"; }

std::string frame_filename(int index, const std::string& ext) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "frame_%05d", index);
    return buf + ext;
}

std::vector<fs::path> list_frames(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw FormatError("not a frame directory: " + dir.string());
    static const std::regex pattern(R"(frame_(\d{5})\.(png|pfm))", std::regex::icase);
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() &&
            std::regex_match(entry.path().filename().string(), pattern)) {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].stem().string() != frame_filename(static_cast<int>(i), "")) {
            throw FormatError("frame sequence in " + dir.string() + " is not contiguous at " +
                                  out[i].filename().string(),
                              static_cast<long>(i));
        }
    }
    return out;
}

}  // namespace gravcam
