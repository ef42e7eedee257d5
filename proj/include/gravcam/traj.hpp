#pragma once

// Stochastic camera rotation paths over the sphere, FoV keyframe curves,
// null-pitch companions and the evaluation-time rotation resampler.

#include "gravcam/geom.hpp"
#include "gravcam/random.hpp"
#include "gravcam/spline.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gravcam {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Constants of the random rotation path sampler. Defaults reproduce the
/// published procedure; they are exposed so ablations need no code change.
struct PathSamplerConfig {
    Range initial_pitch{-90.0, 90.0};
    Range initial_roll{-90.0, 90.0};
    Range initial_yaw{0.0, 360.0};
    int min_segments = 1;
    int max_segments = 4;
    double beta_a = 1.0;
    double beta_b = 5.0;
    /// theta_max = Beta(a, b) * max_degrees_per_unit_time * duration.
    double max_degrees_per_unit_time = 720.0;
    /// Ramp end slopes are drawn from U(0, slope_factor / duration).
    double ramp_slope_factor = 2.0;
};

/// Keyframe-spline curve family (FoV, and the evaluation pitch/roll/yaw curves).
struct KeyframeCurveConfig {
    int min_keys = 1;
    int max_keys = 3;
    Range values{35.0, 100.0};
    /// End derivatives drawn from U(-max_end_slope, max_end_slope) per unit time.
    double max_end_slope = 65.0;
    /// Interpolate along the shortest arc and wrap into [0, 360).
    bool periodic = false;
};

KeyframeCurveConfig default_fov_curve();

/// One eased rotation about a fixed axis.
struct RotationSegment {
    UnitVector3 axis;
    double theta_max = 0.0;  ///< degrees
    HermiteRamp ramp;        ///< easing from 0 at ramp.t_start to 1 at ramp.t_end

    double t_start() const { return ramp.t_start; }
    double t_end() const { return ramp.t_end; }
    double duration() const { return ramp.t_end - ramp.t_start; }

    /// clamp(s(t), 0, 1) * theta_max.
    double angle_at(double t) const;
    Rotation rotation_at(double t) const;
};

/// Initial orientation plus the eased segments composed on top of it.
struct RotationPath {
    EulerYXZ initial_euler;
    Rotation initial;
    std::vector<RotationSegment> segments;

    /// initial * R_1(t) * ... * R_N(t), segments in ascending order.
    Rotation rotation_at(double t) const;
};

struct Keyframes {
    std::vector<double> times;   ///< strictly increasing in [0, 1]
    std::vector<double> values;
    double slope_start = 0.0;
    double slope_end = 0.0;
};

/// Evaluates keyframes at t = f / frame_count, clamped into `clamp_range`.
/// Periodic keyframes are unwrapped along the shortest arc before fitting and
/// the result is wrapped into [0, 360).
std::vector<double> evaluate_keyframes(const Keyframes& keys, int frame_count, Range clamp_range,
                                       bool periodic = false);

struct TrajectorySample {
    int frame_count = 0;
    std::vector<Rotation> rotations;  ///< camera orientation in the panorama frame
    std::vector<double> fovs;         ///< horizontal FoV per frame, degrees
    std::vector<Rotation> null_pitch_rotations;
    double null_pitch_fov = 90.0;
    std::uint64_t seed = 0;
    EulerYXZ initial;
    std::vector<RotationSegment> segments;
    Keyframes fov_keyframes;
};

RotationPath sample_rotation_path(Rng& rng, const PathSamplerConfig& config = {});

/// Random rotation path evaluated at f / frame_count for f in [0, frame_count).
/// Fills rotations, segments, initial and seed only.
TrajectorySample sample_rotation_trajectory(int frame_count, std::uint64_t seed,
                                            const PathSamplerConfig& config = {});

Keyframes sample_keyframes(Rng& rng, const KeyframeCurveConfig& config);

std::vector<double> sample_fov_trajectory(int frame_count, std::uint64_t seed,
                                          const KeyframeCurveConfig& config = default_fov_curve());

/// Per frame euler(yaw(R_f), 0, 0). Frames at |pitch| > 89.9 hold the previous
/// frame's yaw (yaw 0 if frame 0 is at the pole).
std::vector<Rotation> null_pitch_companion(const std::vector<Rotation>& rotations);

/// Rotation path, FoV curve and null-pitch companion for one seed.
TrajectorySample sample_trajectory(int frame_count, std::uint64_t seed,
                                   const PathSamplerConfig& path = {},
                                   const KeyframeCurveConfig& fov = default_fov_curve());

/// 2-3 keyframe curve in [-limit, limit] (used for roll augmentation).
std::vector<double> sample_roll_curve(Rng& rng, int frame_count, double limit);

struct EvalRotationConfig {
    Range pitch{-85.0, 85.0};
    int min_keys = 2;
    int max_keys = 3;
};

/// Independent pitch, roll and yaw keyframe curves composed per frame.
/// roll_limit must lie in [0, 90].
std::vector<Rotation> sample_eval_rotation_trajectory(int frame_count, std::uint64_t seed,
                                                      double roll_limit,
                                                      const EvalRotationConfig& config = {});

/// Per-frame `frame,yaw,pitch,roll,fov` CSV for plotting.
std::string format_trajectory_csv(const std::vector<Rotation>& rotations,
                                  const std::vector<double>& fovs);

}  // namespace gravcam
