#include "gravcam/pipeline.hpp"

#include "gravcam/errors.hpp"
#include "gravcam/parallel.hpp"
#include "gravcam/random.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace gravcam {

using json = nlohmann::json;
namespace fs = std::filesystem;

void PipelineConfig::validate() const {
    if (width < 1 || height < 1) throw InvalidArgument("output resolution must be >= 1");
    if (!(null_pitch_fov > 0.0 && null_pitch_fov < 180.0)) {
        throw InvalidArgument("null_pitch_fov must lie in (0, 180)");
    }
    if (!(null_pitch_rate >= 0.0 && null_pitch_rate <= 1.0)) {
        throw InvalidArgument("null_pitch_rate must lie in [0, 1]");
    }
    if (mask_width < 2 || mask_width % 2 != 0) throw InvalidArgument("mask_width must be even and >= 2");
    if (!(fov.values.lo > 0.0 && fov.values.hi < 180.0 && fov.values.lo <= fov.values.hi)) {
        throw InvalidArgument("fov range must lie inside (0, 180)");
    }
}

namespace {

json range_json(Range r) { return json::array({r.lo, r.hi}); }

Range range_from(const json& j, Range fallback) {
    if (!j.is_array() || j.size() != 2) throw FormatError("range must be a [lo, hi] array");
    fallback.lo = j[0].get<double>();
    fallback.hi = j[1].get<double>();
    return fallback;
}

json config_json(const PipelineConfig& c) {
    return {{"width", c.width},
            {"height", c.height},
            {"null_pitch_fov", c.null_pitch_fov},
            {"null_pitch_rate", c.null_pitch_rate},
            {"mask_width", c.mask_width},
            {"per_frame_masks", c.per_frame_masks},
            {"path",
             {{"initial_pitch", range_json(c.path.initial_pitch)},
              {"initial_roll", range_json(c.path.initial_roll)},
              {"initial_yaw", range_json(c.path.initial_yaw)},
              {"min_segments", c.path.min_segments},
              {"max_segments", c.path.max_segments},
              {"beta_a", c.path.beta_a},
              {"beta_b", c.path.beta_b},
              {"max_degrees_per_unit_time", c.path.max_degrees_per_unit_time},
              {"ramp_slope_factor", c.path.ramp_slope_factor}}},
            {"fov",
             {{"min_keys", c.fov.min_keys},
              {"max_keys", c.fov.max_keys},
              {"range", range_json(c.fov.values)},
              {"max_end_slope", c.fov.max_end_slope}}}};
}

}  // namespace

PipelineConfig pipeline_config_from_json(const std::string& text) {
    PipelineConfig c;
    try {
        const json j = json::parse(text);
        c.width = j.value("width", c.width);
        c.height = j.value("height", c.height);
        c.null_pitch_fov = j.value("null_pitch_fov", c.null_pitch_fov);
        c.null_pitch_rate = j.value("null_pitch_rate", c.null_pitch_rate);
        c.mask_width = j.value("mask_width", c.mask_width);
        c.per_frame_masks = j.value("per_frame_masks", c.per_frame_masks);
        c.jobs = j.value("jobs", c.jobs);
        if (j.contains("path")) {
            const auto& p = j.at("path");
            if (p.contains("initial_pitch")) c.path.initial_pitch = range_from(p.at("initial_pitch"), c.path.initial_pitch);
            if (p.contains("initial_roll")) c.path.initial_roll = range_from(p.at("initial_roll"), c.path.initial_roll);
            if (p.contains("initial_yaw")) c.path.initial_yaw = range_from(p.at("initial_yaw"), c.path.initial_yaw);
            c.path.min_segments = p.value("min_segments", c.path.min_segments);
            c.path.max_segments = p.value("max_segments", c.path.max_segments);
            c.path.beta_a = p.value("beta_a", c.path.beta_a);
            c.path.beta_b = p.value("beta_b", c.path.beta_b);
            c.path.max_degrees_per_unit_time = p.value("max_degrees_per_unit_time", c.path.max_degrees_per_unit_time);
            c.path.ramp_slope_factor = p.value("ramp_slope_factor", c.path.ramp_slope_factor);
        }
        if (j.contains("fov")) {
            const auto& f = j.at("fov");
            c.fov.min_keys = f.value("min_keys", c.fov.min_keys);
            c.fov.max_keys = f.value("max_keys", c.fov.max_keys);
            if (f.contains("range")) c.fov.values = range_from(f.at("range"), c.fov.values);
            c.fov.max_end_slope = f.value("max_end_slope", c.fov.max_end_slope);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("invalid pipeline config: ") + e.what());
    }
    c.validate();
    return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return pipeline_config_from_json(ss.str());
}

std::string pipeline_config_to_json(const PipelineConfig& config) {
    return config_json(config).dump(2) + "\n";
}

EquirectClip load_clip(const fs::path& path) {
    EquirectClip clip;
    if (fs::is_directory(path)) {
        for (const auto& f : list_frames(path)) clip.frames.push_back(read_image(f));
        if (clip.frames.empty()) throw FormatError("no frame_%05d images in " + path.string());
    } else {
        clip.frames.push_back(read_image(path));
    }
    for (std::size_t i = 0; i < clip.frames.size(); ++i) {
        if (clip.frames[i].width != 2 * clip.frames[i].height) {
            throw FormatError("panorama is not 2:1 in " + path.string(), static_cast<long>(i));
        }
    }
    return clip;
}

std::vector<PerspectiveFrame> render_clip(const EquirectClip& clip, const std::vector<Rotation>& rotations,
                                          const std::vector<double>& fovs, int width, int height,
                                          int jobs) {
    if (rotations.size() != fovs.size()) throw InvalidArgument("rotation/fov length mismatch");
    if (clip.frames.empty()) throw InvalidArgument("clip has no frames");
    if (clip.frames.size() != 1 && clip.frames.size() != rotations.size()) {
        throw InvalidArgument("frame count mismatch: clip has " + std::to_string(clip.frames.size()) +
                              " frames, trajectory has " + std::to_string(rotations.size()));
    }
    std::vector<PerspectiveFrame> out(rotations.size());
    parallel_for(rotations.size(), jobs, [&](std::size_t f) {
        const Image& src = clip.frames.size() == 1 ? clip.frames.front() : clip.frames[f];
        try {
            out[f] = render_perspective(src, rotations[f], fovs[f], width, height);
        } catch (const FormatError& e) {
            throw FormatError(e.what(), static_cast<long>(f));
        }
    });
    return out;
}

const char* caption_source_name(CaptionSource c) {
    return c == CaptionSource::null_pitch ? "null_pitch" : "rotated";
}

CaptionSource draw_caption_source(std::uint64_t seed, double null_pitch_rate) {
    Rng rng(seed, Stream::caption);
    return rng.bernoulli(null_pitch_rate) ? CaptionSource::null_pitch : CaptionSource::rotated;
}

namespace {

template <typename Fn>
auto with_context(const std::string& clip_id, std::optional<long> frame, Fn&& fn) {
    try {
        return fn();
    } catch (const ContextError&) {
        throw;
    } catch (const FormatError& e) {
        throw ContextError(clip_id, frame ? frame : e.frame(), e.what(), true);
    } catch (const InvalidArgument& e) {
        throw ContextError(clip_id, frame, e.what(), true);
    } catch (const std::exception& e) {
        throw ContextError(clip_id, frame, e.what(), false);
    }
}

}  // namespace

SampleBundle generate_sample(const EquirectClip& clip, const PoseManifest& sfm, std::uint64_t seed,
                             const PipelineConfig& config, const std::string& clip_id) {
    config.validate();
    if (sfm.frames.empty()) throw ContextError(clip_id, std::nullopt, "SfM manifest has no frames", true);
    const int frame_count = static_cast<int>(sfm.frames.size());
    const TrajectorySample traj = with_context(clip_id, std::nullopt, [&] {
        return sample_trajectory(frame_count, seed, config.path, config.fov);
    });
    return generate_sample(clip, sfm, traj, config, clip_id);
}

SampleBundle generate_sample(const EquirectClip& clip, const PoseManifest& sfm,
                             const TrajectorySample& trajectory, const PipelineConfig& config,
                             const std::string& clip_id) {
    config.validate();
    const std::size_t n = sfm.frames.size();
    if (n == 0) throw ContextError(clip_id, std::nullopt, "SfM manifest has no frames", true);
    if (clip.frames.size() != n && clip.frames.size() != 1) {
        throw ContextError(clip_id, std::nullopt,
                           "frame count mismatch: clip has " + std::to_string(clip.frames.size()) +
                               " frames, SfM manifest has " + std::to_string(n),
                           true);
    }
    if (trajectory.rotations.size() != n || trajectory.fovs.size() != n ||
        trajectory.null_pitch_rotations.size() != n) {
        throw ContextError(clip_id, std::nullopt, "trajectory length does not match SfM manifest", true);
    }
    for (std::size_t i = 0; i < clip.frames.size(); ++i) {
        with_context(clip_id, static_cast<long>(i), [&] { require_equirect(clip.frames[i]); });
    }

    SampleBundle b;
    b.clip_id = clip_id;
    b.seed = trajectory.seed;
    b.trajectory = trajectory;

    const auto rel = with_context(clip_id, std::nullopt, [&] { return relative_from_sfm(sfm.frames); });
    b.poses = manifest_from_poses(with_context(clip_id, std::nullopt, [&] {
        return absolute_poses(trajectory.rotations, rel, trajectory.fovs);
    }));
    const std::vector<double> null_fovs(n, config.null_pitch_fov);
    b.null_pitch_poses = manifest_from_poses(with_context(clip_id, std::nullopt, [&] {
        return absolute_poses(trajectory.null_pitch_rotations, rel, null_fovs);
    }));

    b.frames = with_context(clip_id, std::nullopt, [&] {
        return render_clip(clip, trajectory.rotations, trajectory.fovs, config.width, config.height,
                           config.jobs);
    });
    b.null_pitch_frames = with_context(clip_id, std::nullopt, [&] {
        return render_clip(clip, trajectory.null_pitch_rotations, null_fovs, config.width,
                           config.height, config.jobs);
    });

    b.rays = with_context(clip_id, std::nullopt, [&] {
        return plucker_map(b.poses.frames, config.width, config.height, config.jobs);
    });

    const double aspect = static_cast<double>(config.width) / config.height;
    const int mw = config.mask_width, mh = config.mask_width / 2;
    b.mask = with_context(clip_id, 0L, [&] {
        return fov_mask(trajectory.rotations.front(), trajectory.fovs.front(), aspect, mw, mh);
    });
    b.null_mask = with_context(clip_id, 0L, [&] {
        return fov_mask(trajectory.null_pitch_rotations.front(), config.null_pitch_fov, aspect, mw, mh);
    });
    if (config.per_frame_masks) {
        b.frame_masks.resize(n);
        b.null_frame_masks.resize(n);
        parallel_for(n, config.jobs, [&](std::size_t f) {
            with_context(clip_id, static_cast<long>(f), [&] {
                b.frame_masks[f] = fov_mask(trajectory.rotations[f], trajectory.fovs[f], aspect, mw, mh);
                b.null_frame_masks[f] = fov_mask(trajectory.null_pitch_rotations[f],
                                                 config.null_pitch_fov, aspect, mw, mh);
            });
        });
    }
    b.caption_source = draw_caption_source(trajectory.seed, config.null_pitch_rate);
    return b;
}

std::string bundle_meta_json(const SampleBundle& b, const PipelineConfig& config) {
    const auto& t = b.trajectory;
    json segments = json::array();
    for (const auto& s : t.segments) {
        segments.push_back({{"axis", {s.axis.x(), s.axis.y(), s.axis.z()}},
                            {"theta_max_deg", s.theta_max},
                            {"t_start", s.t_start()},
                            {"t_end", s.t_end()},
                            {"slope_start", s.ramp.slope_start},
                            {"slope_end", s.ramp.slope_end}});
    }
    json meta = {
        {"clip_id", b.clip_id},
        {"seed", b.seed},
        {"frame_count", b.frames.size()},
        {"caption_source", caption_source_name(b.caption_source)},
        {"null_pitch_rate", config.null_pitch_rate},
        {"null_pitch_fov_deg", config.null_pitch_fov},
        {"resolution", {config.width, config.height}},
        {"initial_euler_deg", {{"yaw", t.initial.yaw}, {"pitch", t.initial.pitch}, {"roll", t.initial.roll}}},
        {"segments", segments},
        {"fov_keyframes",
         {{"times", t.fov_keyframes.times},
          {"values", t.fov_keyframes.values},
          {"slope_start", t.fov_keyframes.slope_start},
          {"slope_end", t.fov_keyframes.slope_end}}},
        {"fovs_deg", t.fovs},
        {"config", config_json(config)},
    };
    return meta.dump(2) + "\n";
}

fs::path write_bundle(const SampleBundle& b, const fs::path& root, const PipelineConfig& config) {
    const fs::path dir = root / b.clip_id / std::to_string(b.seed);
    fs::create_directories(dir / "frames");
    fs::create_directories(dir / "null_pitch");
    for (std::size_t f = 0; f < b.frames.size(); ++f) {
        const std::string ext = extension_for(b.frames[f].image.depth);
        write_image(b.frames[f].image, dir / "frames" / frame_filename(static_cast<int>(f), ext));
        write_image(b.null_pitch_frames[f].image,
                    dir / "null_pitch" / frame_filename(static_cast<int>(f), ext));
    }
    write_manifest(b.poses, dir / "poses.json");
    write_manifest(b.null_pitch_poses, dir / "null_pitch.poses.json");
    write_plucker(b.rays, dir / "rays.plk");
    write_image(b.mask.to_image(), dir / "mask.png");
    write_image(b.null_mask.to_image(), dir / "null_mask.png");
    if (!b.frame_masks.empty()) {
        fs::create_directories(dir / "masks");
        fs::create_directories(dir / "null_masks");
        for (std::size_t f = 0; f < b.frame_masks.size(); ++f) {
            write_image(b.frame_masks[f].to_image(), dir / "masks" / frame_filename(static_cast<int>(f), ".png"));
            write_image(b.null_frame_masks[f].to_image(),
                        dir / "null_masks" / frame_filename(static_cast<int>(f), ".png"));
        }
    }
    std::ofstream meta(dir / "meta.json", std::ios::trunc);
    if (!meta) throw FormatError("cannot write " + (dir / "meta.json").string());
    meta << bundle_meta_json(b, config);
    return dir;
}

}  // namespace gravcam
