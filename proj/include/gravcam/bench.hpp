#pragma once

// Benchmark construction: 10-degree pitch bins over [-85, 85], uniform
// per-bin selection and roll-augmentation planning.

#include "gravcam/pano.hpp"
#include "gravcam/pose.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gravcam {

inline constexpr int kPitchBinCount = 17;
inline constexpr double kPitchBinLow = -85.0;
inline constexpr double kPitchBinHigh = 85.0;
inline constexpr double kPitchBinWidth = 10.0;

struct ClipRecord {
    std::string clip_id;
    double mean_pitch = 0.0;
    std::string source_path;
    bool selected = false;
    std::optional<int> assigned_bin;
    bool out_of_range = false;  ///< pitch outside [-85, 85], clamped into an end bin
};

/// Bin index floor((pitch + 85) / 10) clamped to [0, 16].
int pitch_bin(double pitch);

/// Assigns every clip its bin. Throws InvalidArgument on non-finite pitch.
std::vector<ClipRecord> assign_bins(std::vector<ClipRecord> clips);

/// Drops clips whose id appears in `excluded`.
std::vector<ClipRecord> apply_exclusions(std::vector<ClipRecord> clips,
                                         const std::set<std::string>& excluded);

struct BinShortfall {
    int bin = 0;
    int quota = 0;
    int available = 0;
};

struct SelectionResult {
    std::vector<ClipRecord> clips;      ///< input order, `selected` set
    std::vector<int> quotas;            ///< per bin
    std::vector<int> selected_per_bin;  ///< per bin
    std::vector<BinShortfall> shortfalls;
    int total_selected = 0;
};

/// Per-bin quota floor(target / 17); the remainder goes one clip each to the
/// bins with the fewest selected clips that still have spare candidates, ties
/// broken by a seeded permutation. Within a bin, clips are drawn by a seeded
/// shuffle. Bins short of their quota are filled completely and reported.
/// Clips must be binned; target_total must be >= 17.
SelectionResult select_uniform(const std::vector<ClipRecord>& clips, int target_total,
                               std::uint64_t seed);

/// Human-readable shortfall report (empty string when there is none).
std::string shortfall_report(const SelectionResult& result);

struct RollPlanEntry {
    std::string clip_id;
    std::vector<double> roll_deg;  ///< per frame
};

/// One roll curve per clip (keyframe spline clamped to [-roll_limit, roll_limit]),
/// seeded by (seed, clip_id). Throws InvalidArgument on an empty selection.
std::vector<RollPlanEntry> augment_roll(const std::vector<ClipRecord>& clips, int frame_count,
                                        std::uint64_t seed, double roll_limit = 40.0);

/// Composes R_f * R_z(roll_f) into every frame of a manifest.
PoseManifest apply_roll_to_manifest(const PoseManifest& manifest, const std::vector<double>& roll_deg);

/// Warps each frame by its roll.
std::vector<PerspectiveFrame> apply_roll_to_frames(const std::vector<PerspectiveFrame>& frames,
                                                   const std::vector<double>& roll_deg, int jobs = 1);

// CSV sidecars. Clip CSVs have a header with at least clip_id and mean_pitch;
// `path`, `bin`, `out_of_range` and `selected` columns are read when present.
std::vector<ClipRecord> read_clips_csv(const std::filesystem::path& path);
std::string format_clips_csv(const std::vector<ClipRecord>& clips);
/// One clip id per line; blank lines and '#' comments are ignored.
std::set<std::string> read_exclude_list(const std::filesystem::path& path);
std::string format_roll_plan_csv(const std::vector<RollPlanEntry>& plan);

}  // namespace gravcam
