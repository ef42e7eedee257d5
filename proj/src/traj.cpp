#include "gravcam/traj.hpp"

#include "gravcam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace gravcam {

namespace {

void require_frames(int frame_count) {
    if (frame_count < 1) {
        throw InvalidArgument("frame_count must be >= 1 (got " + std::to_string(frame_count) + ")");
    }
}

double frame_time(int f, int frame_count) {
    return static_cast<double>(f) / static_cast<double>(frame_count);
}

}  // namespace

KeyframeCurveConfig default_fov_curve() { return KeyframeCurveConfig{}; }

double RotationSegment::angle_at(double t) const {
    return std::clamp(ramp(t), 0.0, 1.0) * theta_max;
}

Rotation RotationSegment::rotation_at(double t) const { return axis_angle_exp(axis, angle_at(t)); }

Rotation RotationPath::rotation_at(double t) const {
    Rotation r = initial;
    for (const auto& seg : segments) r = r * seg.rotation_at(t);
    return r;
}

RotationPath sample_rotation_path(Rng& rng, const PathSamplerConfig& config) {
    if (config.min_segments < 0 || config.max_segments < config.min_segments) {
        throw InvalidArgument("invalid segment count range");
    }
    RotationPath path;
    path.initial_euler.pitch = rng.uniform(config.initial_pitch.lo, config.initial_pitch.hi);
    path.initial_euler.roll = rng.uniform(config.initial_roll.lo, config.initial_roll.hi);
    path.initial_euler.yaw = rng.uniform(config.initial_yaw.lo, config.initial_yaw.hi);
    path.initial = euler_yxz_to_rotation(path.initial_euler);

    const auto n = rng.uniform_int(config.min_segments, config.max_segments);
    path.segments.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        double duration = 0.0;
        while (duration == 0.0) duration = rng.uniform01();
        const double start = rng.uniform(0.0, 1.0 - duration);

        RotationSegment seg;
        seg.axis = rng.unit_sphere();
        seg.theta_max = rng.beta(config.beta_a, config.beta_b) * config.max_degrees_per_unit_time *
                        duration;
        const double max_slope = config.ramp_slope_factor / duration;
        seg.ramp.t_start = start;
        seg.ramp.t_end = start + duration;
        seg.ramp.slope_start = rng.uniform(0.0, max_slope);
        seg.ramp.slope_end = rng.uniform(0.0, max_slope);
        path.segments.push_back(seg);
    }
    return path;
}

TrajectorySample sample_rotation_trajectory(int frame_count, std::uint64_t seed,
                                            const PathSamplerConfig& config) {
    require_frames(frame_count);
    Rng rng(seed, Stream::rotation_path);
    const RotationPath path = sample_rotation_path(rng, config);

    TrajectorySample out;
    out.frame_count = frame_count;
    out.seed = seed;
    out.initial = path.initial_euler;
    out.segments = path.segments;
    out.rotations.reserve(static_cast<std::size_t>(frame_count));
    for (int f = 0; f < frame_count; ++f) {
        out.rotations.push_back(path.rotation_at(frame_time(f, frame_count)));
    }
    return out;
}

Keyframes sample_keyframes(Rng& rng, const KeyframeCurveConfig& config) {
    if (config.min_keys < 1 || config.max_keys < config.min_keys) {
        throw InvalidArgument("invalid keyframe count range");
    }
    Keyframes keys;
    const auto count = static_cast<std::size_t>(rng.uniform_int(config.min_keys, config.max_keys));
    do {
        keys.times.clear();
        for (std::size_t i = 0; i < count; ++i) keys.times.push_back(rng.uniform01());
        std::sort(keys.times.begin(), keys.times.end());
    } while (std::adjacent_find(keys.times.begin(), keys.times.end()) != keys.times.end());
    for (std::size_t i = 0; i < count; ++i) {
        keys.values.push_back(rng.uniform(config.values.lo, config.values.hi));
    }
    keys.slope_start = rng.uniform(-config.max_end_slope, config.max_end_slope);
    keys.slope_end = rng.uniform(-config.max_end_slope, config.max_end_slope);
    return keys;
}

std::vector<double> evaluate_keyframes(const Keyframes& keys, int frame_count, Range clamp_range,
                                       bool periodic) {
    require_frames(frame_count);
    std::vector<double> values = keys.values;
    if (periodic) {
        for (std::size_t i = 1; i < values.size(); ++i) {
            values[i] = values[i - 1] + wrap_degrees_180(values[i] - values[i - 1]);
        }
    }
    const CubicSpline spline(keys.times, values, keys.slope_start, keys.slope_end);
    std::vector<double> out(static_cast<std::size_t>(frame_count));
    for (int f = 0; f < frame_count; ++f) {
        const double v = spline(frame_time(f, frame_count));
        out[static_cast<std::size_t>(f)] =
            periodic ? wrap_degrees_360(v) : std::clamp(v, clamp_range.lo, clamp_range.hi);
    }
    return out;
}

std::vector<double> sample_fov_trajectory(int frame_count, std::uint64_t seed,
                                          const KeyframeCurveConfig& config) {
    require_frames(frame_count);
    Rng rng(seed, Stream::fov);
    return evaluate_keyframes(sample_keyframes(rng, config), frame_count, config.values);
}

std::vector<Rotation> null_pitch_companion(const std::vector<Rotation>& rotations) {
    std::vector<Rotation> out;
    out.reserve(rotations.size());
    double held_yaw = 0.0;
    for (const auto& r : rotations) {
        const EulerYXZ e = rotation_to_euler_yxz(r);
        if (std::abs(e.pitch) <= kGimbalLockPitchDeg) held_yaw = e.yaw;
        out.push_back(euler_yxz_to_rotation({held_yaw, 0.0, 0.0}));
    }
    return out;
}

TrajectorySample sample_trajectory(int frame_count, std::uint64_t seed,
                                   const PathSamplerConfig& path, const KeyframeCurveConfig& fov) {
    TrajectorySample out = sample_rotation_trajectory(frame_count, seed, path);
    Rng rng(seed, Stream::fov);
    out.fov_keyframes = sample_keyframes(rng, fov);
    out.fovs = evaluate_keyframes(out.fov_keyframes, frame_count, fov.values);
    out.null_pitch_rotations = null_pitch_companion(out.rotations);
    out.null_pitch_fov = 90.0;
    return out;
}

std::vector<double> sample_roll_curve(Rng& rng, int frame_count, double limit) {
    require_frames(frame_count);
    if (!(limit >= 0.0 && limit <= 90.0)) {
        throw InvalidArgument("roll limit must lie in [0, 90] (got " + std::to_string(limit) + ")");
    }
    KeyframeCurveConfig cfg;
    cfg.min_keys = 2;
    cfg.max_keys = 3;
    cfg.values = {-limit, limit};
    cfg.max_end_slope = limit;
    return evaluate_keyframes(sample_keyframes(rng, cfg), frame_count, cfg.values);
}

std::vector<Rotation> sample_eval_rotation_trajectory(int frame_count, std::uint64_t seed,
                                                      double roll_limit,
                                                      const EvalRotationConfig& config) {
    require_frames(frame_count);
    if (!(roll_limit >= 0.0 && roll_limit <= 90.0)) {
        throw InvalidArgument("roll limit must lie in [0, 90] (got " + std::to_string(roll_limit) +
                              ")");
    }
    Rng rng(seed, Stream::eval_rotation);

    KeyframeCurveConfig pitch_cfg;
    pitch_cfg.min_keys = config.min_keys;
    pitch_cfg.max_keys = config.max_keys;
    pitch_cfg.values = config.pitch;
    pitch_cfg.max_end_slope = (config.pitch.hi - config.pitch.lo) / 2.0;
    const auto pitch = evaluate_keyframes(sample_keyframes(rng, pitch_cfg), frame_count,
                                          pitch_cfg.values);

    KeyframeCurveConfig roll_cfg = pitch_cfg;
    roll_cfg.values = {-roll_limit, roll_limit};
    roll_cfg.max_end_slope = roll_limit;
    const auto roll = evaluate_keyframes(sample_keyframes(rng, roll_cfg), frame_count,
                                         roll_cfg.values);

    KeyframeCurveConfig yaw_cfg = pitch_cfg;
    yaw_cfg.values = {0.0, 360.0};
    yaw_cfg.max_end_slope = 180.0;
    yaw_cfg.periodic = true;
    const auto yaw = evaluate_keyframes(sample_keyframes(rng, yaw_cfg), frame_count,
                                        yaw_cfg.values, true);

    std::vector<Rotation> out;
    out.reserve(static_cast<std::size_t>(frame_count));
    for (std::size_t f = 0; f < pitch.size(); ++f) {
        out.push_back(euler_yxz_to_rotation({yaw[f], pitch[f], roll[f]}));
    }
    return out;
}

std::string format_trajectory_csv(const std::vector<Rotation>& rotations,
                                  const std::vector<double>& fovs) {
    if (rotations.size() != fovs.size()) throw InvalidArgument("rotation/fov length mismatch");
    std::string out = "frame,yaw,pitch,roll,fov\n";
    char buf[160];
    for (std::size_t f = 0; f < rotations.size(); ++f) {
        const EulerYXZ e = rotation_to_euler_yxz(rotations[f]);
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g\n", f, e.yaw, e.pitch, e.roll, fovs[f]);
        out += buf;
    }
    return out;
}

}  // namespace gravcam
