#pragma once

#include "gravcam/geom.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace gravcam {

/// Named sub-streams of a sample seed. Each sampler draws from its own stream
/// so adding draws to one never shifts another.
enum class Stream : std::uint64_t {
    rotation_path = 1,
    fov = 2,
    eval_rotation = 3,
    caption = 4,
    selection = 5,
    roll_augment = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stable 64-bit hash of a string (FNV-1a followed by a splitmix finalizer).
std::uint64_t hash_string(std::string_view s);

/// Seeded generator with platform-independent distributions. The engine is
/// mt19937_64; every transform below is written out so a seed reproduces the
/// same bits regardless of the standard library in use.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
    Rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer in [lo, hi] (inclusive), unbiased.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    /// Bernoulli(p).
    bool bernoulli(double p);
    /// Standard normal (polar Box-Muller, spare discarded for reproducibility).
    double normal();
    /// Gamma(shape, 1) by Marsaglia-Tsang.
    double gamma(double shape);
    /// Beta(a, b); closed-form inverse CDF when either parameter is 1.
    double beta(double a, double b);
    /// Uniform direction on the unit sphere.
    UnitVector3 unit_sphere();

private:
    std::mt19937_64 engine_;
};

}  // namespace gravcam
