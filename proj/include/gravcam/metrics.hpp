#pragma once

// Pose-annotation error metrics and trajectory distribution statistics.

#include "gravcam/pose.hpp"

#include <string>
#include <vector>

namespace gravcam {

struct TrajectoryPair {
    std::vector<CameraPose> reference;
    std::vector<CameraPose> estimate;
};

/// Mean |pitch(ref_f) - pitch(est_f)|, degrees.
double pitch_error(const TrajectoryPair& pair);

/// Mean angle between the camera-frame up vectors R^T (0, 1, 0), degrees.
double gravity_error(const TrajectoryPair& pair);

/// Mean geodesic angle between first-frame-relative rotations R_0^T R_f of
/// the two trajectories, degrees. Frame 0 contributes 0.
double relative_rotation_error(const TrajectoryPair& pair);

/// Mean distance between positions after anchoring each trajectory at its
/// first camera and scaling its largest displacement from there to 1.
/// Static trajectories keep scale 1.
double translation_error(const TrajectoryPair& pair);

struct PairReport {
    std::string clip_id;
    double pitch_err = 0.0;
    double gravity_err = 0.0;
    double rot_err = 0.0;
    double trans_err = 0.0;
};

PairReport evaluate_pair(const TrajectoryPair& pair, std::string clip_id = {});

/// Column-wise mean of a set of reports (clip_id "mean").
PairReport mean_report(const std::vector<PairReport>& reports);

/// CSV with header clip_id,pitch_err,gravity_err,rot_err,trans_err, one row
/// per report, optionally followed by the aggregate mean row.
std::string format_report_csv(const std::vector<PairReport>& reports, bool with_mean);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    double bin_width = 0.0;
    std::vector<long> counts;

    /// Bin of a value: floor((x - lo) / bin_width) clamped to the valid range.
    std::size_t bin_of(double x) const;
};

struct TrajectoryStats {
    double total_angular_distance = 0.0;  ///< sum of consecutive geodesic steps, degrees
    Histogram pitch;  ///< [-90, 90]
    Histogram roll;   ///< (-180, 180]
    Histogram yaw;    ///< [0, 360)
};

TrajectoryStats trajectory_stats(const std::vector<CameraPose>& poses, double bin_width);

/// CSV with header angle,bin_lo,bin_hi,count and a trailing
/// total_angular_distance row.
std::string format_stats_csv(const TrajectoryStats& stats);

}  // namespace gravcam
