#include "gravcam/plucker.hpp"

#include "gravcam/errors.hpp"
#include "gravcam/parallel.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

namespace gravcam {

using json = nlohmann::json;

namespace {

constexpr char kMagic[8] = {'P', 'L', 'K', 'R', 'T', 'E', 'N', '1'};

static_assert(std::endian::native == std::endian::little,
              "the .plk codec copies float32 payloads verbatim and assumes a little-endian host");

}  // namespace

PluckerMap plucker_map(const std::vector<CameraPose>& poses, int width, int height, int jobs) {
    if (poses.empty()) throw InvalidArgument("plucker_map: empty pose list");
    if (width < 1 || height < 1) throw InvalidArgument("plucker_map: dimensions must be >= 1");
    for (const auto& p : poses) p.validate();

    PluckerMap map;
    map.frames = static_cast<int>(poses.size());
    map.height = height;
    map.width = width;
    map.data.resize(static_cast<std::size_t>(map.frames) * static_cast<std::size_t>(height) *
                    static_cast<std::size_t>(width) * PluckerMap::kChannels);

    parallel_for(poses.size(), jobs, [&](std::size_t fi) {
        const int f = static_cast<int>(fi);
        const CameraPose& pose = poses[fi];
        const Intrinsics k = intrinsics_from_fov(pose.fov_h, width, height);
        const Mat3& r = pose.rotation.matrix();
        const Vec3& t = pose.translation;
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const Vec3 d = r * k.ray(x + 0.5, y + 0.5);
                const double n = d.norm();
                if (!(n > 0.0)) throw InternalError("zero-norm ray direction");
                const Vec3 dn = d / n;
                const Vec3 m = t.cross(dn);
                float* out = &map.data[map.offset(f, y, x)];
                out[0] = static_cast<float>(m.x());
                out[1] = static_cast<float>(m.y());
                out[2] = static_cast<float>(m.z());
                out[3] = static_cast<float>(dn.x());
                out[4] = static_cast<float>(dn.y());
                out[5] = static_cast<float>(dn.z());
            }
        }
    });
    return map;
}

std::vector<std::byte> encode_plucker(const PluckerMap& map) {
    const std::size_t expected = static_cast<std::size_t>(map.frames) *
                                 static_cast<std::size_t>(map.height) *
                                 static_cast<std::size_t>(map.width) * PluckerMap::kChannels;
    if (map.data.size() != expected) throw InvalidArgument("plucker map data size mismatch");

    json order = json::array();
    for (const char* c : kPluckerChannelOrder) order.push_back(c);
    const std::string header =
        json{{"dims", {map.frames, map.height, map.width, PluckerMap::kChannels}},
             {"dtype", "f32"},
             {"channel_order", order}}
            .dump();

    std::vector<std::byte> out(sizeof(kMagic) + 4 + header.size() + map.data.size() * 4);
    std::byte* p = out.data();
    std::memcpy(p, kMagic, sizeof(kMagic));
    p += sizeof(kMagic);
    const auto len = static_cast<std::uint32_t>(header.size());
    for (int b = 0; b < 4; ++b) *p++ = static_cast<std::byte>((len >> (8 * b)) & 0xFF);
    std::memcpy(p, header.data(), header.size());
    p += header.size();
    std::memcpy(p, map.data.data(), map.data.size() * 4);
    return out;
}

PluckerMap decode_plucker(const std::vector<std::byte>& bytes) {
    if (bytes.size() < sizeof(kMagic) + 4 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw FormatError("not a .plk tensor (bad magic)");
    }
    std::uint32_t len = 0;
    for (int b = 0; b < 4; ++b) {
        len |= static_cast<std::uint32_t>(bytes[sizeof(kMagic) + static_cast<std::size_t>(b)]) << (8 * b);
    }
    const std::size_t header_begin = sizeof(kMagic) + 4;
    if (bytes.size() < header_begin + len) {
        throw FormatError("truncated .plk header: expected " + std::to_string(len) + " bytes, have " +
                          std::to_string(bytes.size() - header_begin));
    }
    json header;
    try {
        header = json::parse(reinterpret_cast<const char*>(bytes.data()) + header_begin,
                             reinterpret_cast<const char*>(bytes.data()) + header_begin + len);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string(".plk header is not valid JSON: ") + e.what());
    }

    PluckerMap map;
    try {
        if (header.at("dtype").get<std::string>() != "f32") {
            throw FormatError(".plk dtype mismatch: expected f32, got " +
                              header.at("dtype").get<std::string>());
        }
        const auto dims = header.at("dims").get<std::vector<long long>>();
        if (dims.size() != 4 || dims[3] != PluckerMap::kChannels || dims[0] < 1 || dims[1] < 1 ||
            dims[2] < 1) {
            throw FormatError(".plk dims must be [F, H, W, 6] with positive sizes");
        }
        if (header.contains("channel_order")) {
            const auto order = header.at("channel_order").get<std::vector<std::string>>();
            bool same = order.size() == kPluckerChannelOrder.size();
            for (std::size_t i = 0; same && i < order.size(); ++i) same = order[i] == kPluckerChannelOrder[i];
            if (!same) throw FormatError(".plk channel_order differs from (m_x, m_y, m_z, d_x, d_y, d_z)");
        }
        map.frames = static_cast<int>(dims[0]);
        map.height = static_cast<int>(dims[1]);
        map.width = static_cast<int>(dims[2]);
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed .plk header: ") + e.what());
    }

    const std::size_t count = static_cast<std::size_t>(map.frames) * static_cast<std::size_t>(map.height) *
                              static_cast<std::size_t>(map.width) * PluckerMap::kChannels;
    const std::size_t payload = bytes.size() - header_begin - len;
    if (payload != count * 4) {
        throw FormatError(".plk payload size mismatch: expected " + std::to_string(count * 4) +
                          " bytes, got " + std::to_string(payload));
    }
    map.data.resize(count);
    std::memcpy(map.data.data(), bytes.data() + header_begin + len, payload);
    return map;
}

void write_plucker(const PluckerMap& map, const std::filesystem::path& path) {
    const auto bytes = encode_plucker(map);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw FormatError("failed writing " + path.string());
}

PluckerMap read_plucker(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<std::byte> bytes(raw.size());
    std::memcpy(bytes.data(), raw.data(), raw.size());
    try {
        return decode_plucker(bytes);
    } catch (const FormatError& e) {
        throw e.prefixed(path.string() + ": ");
    }
}

}  // namespace gravcam
