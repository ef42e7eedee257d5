#pragma once

// Shared test helpers. Random draws here use <random> directly so oracles
// never share code paths with the library's own samplers.

#include "gravcam/geom.hpp"
#include "gravcam/image.hpp"
#include "gravcam/pose.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

using gravcam::Mat3;
using gravcam::Vec3;

inline double rad(double deg) { return deg * M_PI / 180.0; }
inline double deg(double r) { return r * 180.0 / M_PI; }

inline Mat3 rot_x(double d) {
    const double c = std::cos(rad(d)), s = std::sin(rad(d));
    Mat3 m;
    m << 1, 0, 0, 0, c, -s, 0, s, c;
    return m;
}
inline Mat3 rot_y(double d) {
    const double c = std::cos(rad(d)), s = std::sin(rad(d));
    Mat3 m;
    m << c, 0, s, 0, 1, 0, -s, 0, c;
    return m;
}
inline Mat3 rot_z(double d) {
    const double c = std::cos(rad(d)), s = std::sin(rad(d));
    Mat3 m;
    m << c, -s, 0, s, c, 0, 0, 0, 1;
    return m;
}

/// Yaw about +Y, then pitch raising the optical axis (+Z) toward +Y, then roll about +Z.
inline Mat3 euler_oracle(double yaw, double pitch, double roll) {
    return rot_y(yaw) * rot_x(-pitch) * rot_z(roll);
}

/// Haar-uniform rotation from a normalized Gaussian quaternion.
inline gravcam::Rotation random_rotation(std::mt19937_64& g) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Quaterniond q(n(g), n(g), n(g), n(g));
    q.normalize();
    return gravcam::Rotation::from_matrix(q.toRotationMatrix(), 1e-12);
}

inline Vec3 random_unit(std::mt19937_64& g) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v(n(g), n(g), n(g));
    return v.normalized();
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

/// Equirect image whose channel 0 holds latitude, channel 1 longitude (degrees)
/// and channel 2 cos(longitude) at each texel center, following the library's u/v convention
/// (u grows with longitude from -180 at the left edge, v from +90 at the top).
inline gravcam::Image latlon_panorama(int width) {
    const int height = width / 2;
    gravcam::Image img(width, height, 3);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            img.at(x, y, 0) = static_cast<float>(90.0 - (y + 0.5) * 180.0 / height);
            img.at(x, y, 1) = static_cast<float>(-180.0 + (x + 0.5) * 360.0 / width);
            img.at(x, y, 2) = static_cast<float>(std::cos(rad(img.at(x, y, 1))));
        }
    }
    return img;
}

inline gravcam::Image constant_image(int w, int h, int c, float value) {
    gravcam::Image img(w, h, c);
    std::fill(img.data.begin(), img.data.end(), value);
    return img;
}

/// One-sample Kolmogorov-Smirnov statistic against U(lo, hi).
inline double ks_uniform_statistic(std::vector<double> xs, double lo, double hi) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = std::clamp((xs[i] - lo) / (hi - lo), 0.0, 1.0);
        d = std::max({d, (i + 1) / n - cdf, cdf - i / n});
    }
    return d;
}

/// Asymptotic Kolmogorov survival function with the Stephens small-sample correction.
inline double ks_p_value(double d, std::size_t n) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("gravcam_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testing_support
