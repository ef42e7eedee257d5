#include "gravcam/metrics.hpp"

#include "gravcam/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gravcam {

namespace {

void check_pair(const TrajectoryPair& pair) {
    if (pair.reference.size() != pair.estimate.size()) {
        throw InvalidArgument("trajectory length mismatch: " + std::to_string(pair.reference.size()) +
                              " vs " + std::to_string(pair.estimate.size()));
    }
    if (pair.reference.empty()) throw InvalidArgument("trajectories are empty");
}

double angle_between(const Vec3& a, const Vec3& b) {
    return rad_to_deg(std::atan2(a.cross(b).norm(), a.dot(b)));
}

std::vector<Vec3> normalized_positions(const std::vector<CameraPose>& poses) {
    std::vector<Vec3> out;
    out.reserve(poses.size());
    const Vec3 origin = poses.front().translation;
    double scale = 0.0;
    for (const auto& p : poses) {
        out.push_back(p.translation - origin);
        scale = std::max(scale, out.back().norm());
    }
    if (scale > 0.0)
        for (auto& v : out) v /= scale;
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

double pitch_error(const TrajectoryPair& pair) {
    check_pair(pair);
    double sum = 0.0;
    for (std::size_t f = 0; f < pair.reference.size(); ++f) {
        sum += std::abs(rotation_to_euler_yxz(pair.reference[f].rotation).pitch -
                        rotation_to_euler_yxz(pair.estimate[f].rotation).pitch);
    }
    return sum / static_cast<double>(pair.reference.size());
}

double gravity_error(const TrajectoryPair& pair) {
    check_pair(pair);
    double sum = 0.0;
    for (std::size_t f = 0; f < pair.reference.size(); ++f) {
        sum += angle_between(camera_frame_up(pair.reference[f].rotation),
                             camera_frame_up(pair.estimate[f].rotation));
    }
    return sum / static_cast<double>(pair.reference.size());
}

double relative_rotation_error(const TrajectoryPair& pair) {
    check_pair(pair);
    const Rotation ref0 = pair.reference.front().rotation.inverse();
    const Rotation est0 = pair.estimate.front().rotation.inverse();
    double sum = 0.0;
    for (std::size_t f = 1; f < pair.reference.size(); ++f) {
        sum += geodesic_angle(ref0 * pair.reference[f].rotation, est0 * pair.estimate[f].rotation);
    }
    return sum / static_cast<double>(pair.reference.size());
}

double translation_error(const TrajectoryPair& pair) {
    check_pair(pair);
    const auto ref = normalized_positions(pair.reference);
    const auto est = normalized_positions(pair.estimate);
    double sum = 0.0;
    for (std::size_t f = 0; f < ref.size(); ++f) sum += (ref[f] - est[f]).norm();
    return sum / static_cast<double>(ref.size());
}

PairReport evaluate_pair(const TrajectoryPair& pair, std::string clip_id) {
    PairReport r;
    r.clip_id = std::move(clip_id);
    r.pitch_err = pitch_error(pair);
    r.gravity_err = gravity_error(pair);
    r.rot_err = relative_rotation_error(pair);
    r.trans_err = translation_error(pair);
    return r;
}

PairReport mean_report(const std::vector<PairReport>& reports) {
    PairReport m;
    m.clip_id = "mean";
    if (reports.empty()) return m;
    for (const auto& r : reports) {
        m.pitch_err += r.pitch_err;
        m.gravity_err += r.gravity_err;
        m.rot_err += r.rot_err;
        m.trans_err += r.trans_err;
    }
    const double n = static_cast<double>(reports.size());
    m.pitch_err /= n;
    m.gravity_err /= n;
    m.rot_err /= n;
    m.trans_err /= n;
    return m;
}

std::string format_report_csv(const std::vector<PairReport>& reports, bool with_mean) {
    std::ostringstream out;
    out << "clip_id,pitch_err,gravity_err,rot_err,trans_err\n";
    auto row = [&](const PairReport& r) {
        out << r.clip_id << ',' << fmt(r.pitch_err) << ',' << fmt(r.gravity_err) << ','
            << fmt(r.rot_err) << ',' << fmt(r.trans_err) << '\n';
    };
    for (const auto& r : reports) row(r);
    if (with_mean) row(mean_report(reports));
    return out.str();
}

std::size_t Histogram::bin_of(double x) const {
    const double idx = std::floor((x - lo) / bin_width);
    const double last = static_cast<double>(counts.size() - 1);
    return static_cast<std::size_t>(std::clamp(idx, 0.0, last));
}

namespace {

Histogram make_histogram(double lo, double hi, double bin_width) {
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.bin_width = bin_width;
    h.counts.assign(static_cast<std::size_t>(std::ceil((hi - lo) / bin_width - 1e-12)), 0);
    return h;
}

}  // namespace

TrajectoryStats trajectory_stats(const std::vector<CameraPose>& poses, double bin_width) {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
        throw InvalidArgument("bin_width must be positive");
    }
    if (poses.empty()) throw InvalidArgument("trajectory_stats: empty trajectory");
    TrajectoryStats s;
    s.pitch = make_histogram(-90.0, 90.0, bin_width);
    s.roll = make_histogram(-180.0, 180.0, bin_width);
    s.yaw = make_histogram(0.0, 360.0, bin_width);
    for (std::size_t f = 0; f < poses.size(); ++f) {
        if (f + 1 < poses.size()) {
            s.total_angular_distance += geodesic_angle(poses[f].rotation, poses[f + 1].rotation);
        }
        const EulerYXZ e = rotation_to_euler_yxz(poses[f].rotation);
        ++s.pitch.counts[s.pitch.bin_of(e.pitch)];
        ++s.roll.counts[s.roll.bin_of(e.roll)];
        ++s.yaw.counts[s.yaw.bin_of(e.yaw)];
    }
    return s;
}

std::string format_stats_csv(const TrajectoryStats& stats) {
    std::ostringstream out;
    out << "angle,bin_lo,bin_hi,count\n";
    auto emit = [&](const char* name, const Histogram& h) {
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            const double lo = h.lo + static_cast<double>(i) * h.bin_width;
            out << name << ',' << fmt(lo) << ',' << fmt(std::min(lo + h.bin_width, h.hi)) << ','
                << h.counts[i] << '\n';
        }
    };
    emit("pitch", stats.pitch);
    emit("roll", stats.roll);
    emit("yaw", stats.yaw);
    out << "total_angular_distance,,," << fmt(stats.total_angular_distance) << '\n';
    return out.str();
}

}  // namespace gravcam
