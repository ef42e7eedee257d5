#pragma once

// End-to-end training-sample generation: from an equirectangular clip and its
// SfM pose manifest to perspective frames, null-pitch frames, gravity-aligned
// pose manifests, Plücker rays and equirect FoV masks.

#include "gravcam/pano.hpp"
#include "gravcam/plucker.hpp"
#include "gravcam/pose.hpp"
#include "gravcam/traj.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gravcam {

struct PipelineConfig {
    int width = 720;
    int height = 480;
    double null_pitch_fov = 90.0;
    /// Probability that a sample is captioned from its null-pitch companion.
    double null_pitch_rate = 0.5;
    int mask_width = 1024;  ///< mask height is mask_width / 2
    bool per_frame_masks = false;
    PathSamplerConfig path;
    KeyframeCurveConfig fov = default_fov_curve();
    int jobs = 1;

    void validate() const;
};

/// Reads a JSON config; absent keys keep their defaults.
PipelineConfig pipeline_config_from_json(const std::string& text);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
std::string pipeline_config_to_json(const PipelineConfig& config);

struct EquirectClip {
    std::vector<Image> frames;
};

/// Loads a `frame_%05d.{png,pfm}` directory or a single panorama image.
EquirectClip load_clip(const std::filesystem::path& path);

/// Renders frame f of the clip along rotations[f] with fovs[f]. A single-frame
/// clip is reused for every rotation. Frames are split across `jobs` workers.
std::vector<PerspectiveFrame> render_clip(const EquirectClip& clip, const std::vector<Rotation>& rotations,
                                          const std::vector<double>& fovs, int width, int height,
                                          int jobs = 1);

enum class CaptionSource { rotated, null_pitch };
const char* caption_source_name(CaptionSource c);

struct SampleBundle {
    std::string clip_id;
    std::uint64_t seed = 0;
    TrajectorySample trajectory;
    std::vector<PerspectiveFrame> frames;
    std::vector<PerspectiveFrame> null_pitch_frames;
    PoseManifest poses;             ///< gravity-aligned, sampled FoV
    PoseManifest null_pitch_poses;  ///< gravity-aligned, fixed 90-degree FoV
    PluckerMap rays;                ///< from `poses`
    EquirectMask mask;              ///< first frame of the sampled trajectory
    EquirectMask null_mask;         ///< first frame of the companion
    std::vector<EquirectMask> frame_masks;       ///< only with per_frame_masks
    std::vector<EquirectMask> null_frame_masks;  ///< only with per_frame_masks
    CaptionSource caption_source = CaptionSource::rotated;
};

/// The caption-source coin flip for a seed (independent of every other draw).
CaptionSource draw_caption_source(std::uint64_t seed, double null_pitch_rate);

/// Generates one sample. The SfM manifest frame count must match the clip,
/// except that a single-frame clip is reused for every pose. Delegate
/// failures are rethrown as ContextError naming the clip and frame.
SampleBundle generate_sample(const EquirectClip& clip, const PoseManifest& sfm, std::uint64_t seed,
                             const PipelineConfig& config, const std::string& clip_id = "clip");

/// Same, with an explicitly supplied trajectory (rotations, fovs and companion).
SampleBundle generate_sample(const EquirectClip& clip, const PoseManifest& sfm,
                             const TrajectorySample& trajectory, const PipelineConfig& config,
                             const std::string& clip_id = "clip");

/// Writes `<root>/<clip_id>/<seed>/{frames/, null_pitch/, poses.json,
/// null_pitch.poses.json, rays.plk, mask.png, null_mask.png, meta.json}` and
/// returns the bundle directory.
std::filesystem::path write_bundle(const SampleBundle& bundle, const std::filesystem::path& root,
                                   const PipelineConfig& config);

/// Sample metadata (seed, caption source, trajectory provenance) as JSON text.
std::string bundle_meta_json(const SampleBundle& bundle, const PipelineConfig& config);

}  // namespace gravcam
