#include "gravcam/pose.hpp"

#include "gravcam/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace gravcam {

using json = nlohmann::json;

namespace {

constexpr double kAcceptDrift = 1e-6;

void check_fov(double fov_h) {
    if (!(fov_h > 0.0 && fov_h < 180.0)) {
        throw InvalidArgument("fov must lie in (0, 180) degrees (got " + std::to_string(fov_h) + ")");
    }
}

}  // namespace

void CameraPose::validate() const {
    if (!translation.allFinite()) throw InvalidArgument("pose translation is not finite");
    check_fov(fov_h);
}

CameraPose CameraPose::operator*(const CameraPose& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation, rhs.fov_h};
}

CameraPose CameraPose::inverse() const {
    const Rotation inv = rotation.inverse();
    return {inv, -(inv * translation), fov_h};
}

double Intrinsics::horizontal_fov() const {
    return rad_to_deg(2.0 * std::atan(0.5 * width / fx));
}

double Intrinsics::vertical_fov() const {
    return rad_to_deg(2.0 * std::atan(0.5 * height / fy));
}

Intrinsics intrinsics_from_fov(double fov_h, int width, int height) {
    check_fov(fov_h);
    if (width < 1 || height < 1) throw InvalidArgument("image dimensions must be >= 1");
    Intrinsics k;
    k.width = width;
    k.height = height;
    k.fx = 0.5 * width / std::tan(deg_to_rad(fov_h) * 0.5);
    k.fy = k.fx;
    k.cx = 0.5 * width;
    k.cy = 0.5 * height;
    return k;
}

std::vector<CameraPose> relative_from_sfm(const std::vector<CameraPose>& sfm_poses) {
    if (sfm_poses.empty()) throw InvalidArgument("relative_from_sfm: empty pose list");
    const CameraPose first_inv = sfm_poses.front().inverse();
    std::vector<CameraPose> out;
    out.reserve(sfm_poses.size());
    for (const auto& p : sfm_poses) out.push_back(first_inv * p);
    // Frame 0 is identity by definition; avoid carrying rounding residue.
    out.front().rotation = Rotation::identity();
    out.front().translation = Vec3::Zero();
    return out;
}

std::vector<CameraPose> poses_from_rotations(const std::vector<Rotation>& rotations,
                                             const std::vector<double>& fovs) {
    if (rotations.size() != fovs.size()) throw InvalidArgument("rotation/fov length mismatch");
    std::vector<CameraPose> out(rotations.size());
    for (std::size_t f = 0; f < rotations.size(); ++f) {
        out[f].rotation = rotations[f];
        out[f].fov_h = fovs[f];
        out[f].validate();
    }
    return out;
}

std::vector<CameraPose> absolute_poses(const std::vector<Rotation>& pano_rotations,
                                       const std::vector<CameraPose>& rel_poses) {
    if (pano_rotations.empty() || pano_rotations.size() != rel_poses.size()) {
        throw InvalidArgument("absolute_poses: " + std::to_string(pano_rotations.size()) +
                              " rotations vs " + std::to_string(rel_poses.size()) + " poses");
    }
    const Rotation gravity = yaw_correction(pano_rotations.front());
    std::vector<CameraPose> out;
    out.reserve(rel_poses.size());
    for (std::size_t f = 0; f < rel_poses.size(); ++f) {
        const Rotation g = gravity * pano_rotations[f];
        out.push_back({g * rel_poses[f].rotation, g * rel_poses[f].translation, rel_poses[f].fov_h});
    }
    return out;
}

std::vector<CameraPose> absolute_poses(const std::vector<Rotation>& pano_rotations,
                                       const std::vector<CameraPose>& rel_poses,
                                       const std::vector<double>& fovs) {
    if (fovs.size() != rel_poses.size()) {
        throw InvalidArgument("absolute_poses: fov count does not match pose count");
    }
    auto out = absolute_poses(pano_rotations, rel_poses);
    for (std::size_t f = 0; f < out.size(); ++f) {
        check_fov(fovs[f]);
        out[f].fov_h = fovs[f];
    }
    return out;
}

PoseManifest manifest_from_poses(std::vector<CameraPose> poses) {
    PoseManifest m;
    m.frames = std::move(poses);
    return m;
}

std::string serialize_manifest(const PoseManifest& m) {
    json frames = json::array();
    for (std::size_t i = 0; i < m.frames.size(); ++i) {
        const auto& p = m.frames[i];
        json rot = json::array();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) rot.push_back(p.rotation(r, c));
        frames.push_back({{"index", i},
                          {"rotation", rot},
                          {"translation", {p.translation.x(), p.translation.y(), p.translation.z()}},
                          {"fov_deg", p.fov_h}});
    }
    json doc = {{"version", m.version},
                {"convention",
                 {{"world_up", m.convention.world_up},
                  {"handedness", m.convention.handedness},
                  {"forward", m.convention.forward},
                  {"pose_direction", m.convention.pose_direction}}},
                {"frames", frames}};
    return doc.dump(2) + "\n";
}

namespace {

double number_at(const json& arr, std::size_t i, long frame, const char* field) {
    const auto& v = arr.at(i);
    if (!v.is_number()) throw FormatError(std::string(field) + " entries must be numbers", frame);
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw FormatError(std::string(field) + " has non-finite entry", frame);
    return d;
}

const json& array_field(const json& obj, const char* field, std::size_t size, long frame) {
    if (!obj.contains(field)) throw FormatError(std::string("missing '") + field + "'", frame);
    const auto& arr = obj.at(field);
    if (!arr.is_array() || arr.size() != size) {
        throw FormatError(std::string("'") + field + "' must be an array of " +
                              std::to_string(size) + " numbers",
                          frame);
    }
    return arr;
}

}  // namespace

PoseManifest parse_manifest(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw FormatError("manifest root must be an object");

    PoseManifest m;
    try {
        m.version = doc.at("version").get<int>();
        if (m.version != 1) throw FormatError("unsupported manifest version " + std::to_string(m.version));
        if (doc.contains("convention")) {
            const auto& c = doc.at("convention");
            m.convention.world_up = c.value("world_up", m.convention.world_up);
            m.convention.handedness = c.value("handedness", m.convention.handedness);
            m.convention.forward = c.value("forward", m.convention.forward);
            m.convention.pose_direction = c.value("pose_direction", m.convention.pose_direction);
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed manifest header: ") + e.what());
    }
    const auto& cv = m.convention;
    if (cv.world_up != "+Y" || cv.handedness != "right" || cv.forward != "+Z") {
        throw FormatError("unsupported convention (world_up " + cv.world_up + ", handedness " +
                          cv.handedness + ", forward " + cv.forward + ")");
    }
    if (cv.pose_direction != "camera_to_world" && cv.pose_direction != "world_to_camera") {
        throw FormatError("unknown pose_direction '" + cv.pose_direction + "'");
    }
    const bool invert = cv.pose_direction == "world_to_camera";

    if (!doc.contains("frames") || !doc.at("frames").is_array()) {
        throw FormatError("manifest has no 'frames' array");
    }
    const auto& frames = doc.at("frames");
    m.frames.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const auto& fr = frames[i];
        const long idx = static_cast<long>(i);
        if (!fr.is_object()) throw FormatError("frame entry must be an object", idx);
        if (!fr.contains("index") || !fr.at("index").is_number_integer() ||
            fr.at("index").get<long>() != idx) {
            throw FormatError("frame indices must be contiguous from 0", idx);
        }
        const auto& rot = array_field(fr, "rotation", 9, idx);
        const auto& tr = array_field(fr, "translation", 3, idx);
        if (!fr.contains("fov_deg") || !fr.at("fov_deg").is_number()) {
            throw FormatError("missing numeric 'fov_deg'", idx);
        }

        Mat3 r;
        for (int k = 0; k < 9; ++k) r(k / 3, k % 3) = number_at(rot, static_cast<std::size_t>(k), idx, "rotation");
        const double drift = orthonormality_drift(r);
        if (!(drift <= kAcceptDrift)) {
            throw FormatError("rotation is not a proper rotation (drift " + std::to_string(drift) +
                                  ", det " + std::to_string(r.determinant()) + ")",
                              idx);
        }
        if (drift > kRotationTolerance) r = gram_schmidt(r);

        CameraPose p;
        p.rotation = rotation_from_trusted(r);
        p.translation = {number_at(tr, 0, idx, "translation"), number_at(tr, 1, idx, "translation"),
                         number_at(tr, 2, idx, "translation")};
        p.fov_h = fr.at("fov_deg").get<double>();
        if (!(p.fov_h > 0.0 && p.fov_h < 180.0)) throw FormatError("fov_deg outside (0, 180)", idx);
        if (invert) {
            p = p.inverse();
        }
        m.frames.push_back(p);
    }
    if (invert) m.convention.pose_direction = "camera_to_world";
    return m;
}

PoseManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open manifest " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_manifest(ss.str());
    } catch (const FormatError& e) {
        throw e.prefixed(path.string() + ": ");
    }
}

void write_manifest(const PoseManifest& m, const std::filesystem::path& path) {
    for (std::size_t i = 0; i < m.frames.size(); ++i) {
        try {
            m.frames[i].validate();
        } catch (const InvalidArgument& e) {
            throw InvalidArgument("frame " + std::to_string(i) + ": " + e.what());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write manifest " + path.string());
    out << serialize_manifest(m);
    if (!out) throw FormatError("failed writing manifest " + path.string());
}

}  // namespace gravcam
