#include "gravcam/bench.hpp"

#include "gravcam/errors.hpp"
#include "gravcam/parallel.hpp"
#include "gravcam/random.hpp"
#include "gravcam/traj.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace gravcam {

namespace {

template <typename T>
void seeded_shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i - 1)));
        std::swap(v[i - 1], v[j]);
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

int pitch_bin(double pitch) {
    if (!std::isfinite(pitch)) throw InvalidArgument("mean pitch must be finite");
    const double idx = std::floor((pitch - kPitchBinLow) / kPitchBinWidth);
    return static_cast<int>(std::clamp(idx, 0.0, static_cast<double>(kPitchBinCount - 1)));
}

std::vector<ClipRecord> assign_bins(std::vector<ClipRecord> clips) {
    for (auto& c : clips) {
        if (!std::isfinite(c.mean_pitch)) {
            throw InvalidArgument("clip " + c.clip_id + ": mean pitch is not finite");
        }
        c.assigned_bin = pitch_bin(c.mean_pitch);
        c.out_of_range = c.mean_pitch < kPitchBinLow || c.mean_pitch > kPitchBinHigh;
    }
    return clips;
}

std::vector<ClipRecord> apply_exclusions(std::vector<ClipRecord> clips,
                                         const std::set<std::string>& excluded) {
    std::erase_if(clips, [&](const ClipRecord& c) { return excluded.count(c.clip_id) > 0; });
    return clips;
}

SelectionResult select_uniform(const std::vector<ClipRecord>& clips, int target_total,
                               std::uint64_t seed) {
    if (target_total < kPitchBinCount) {
        throw InvalidArgument("target_total must be >= " + std::to_string(kPitchBinCount) +
                              " (got " + std::to_string(target_total) + ")");
    }
    std::vector<std::vector<std::size_t>> candidates(kPitchBinCount);
    for (std::size_t i = 0; i < clips.size(); ++i) {
        if (!clips[i].assigned_bin) {
            throw InvalidArgument("clip " + clips[i].clip_id + " has no bin; run assign_bins first");
        }
        candidates[static_cast<std::size_t>(*clips[i].assigned_bin)].push_back(i);
    }

    SelectionResult res;
    res.clips = clips;
    for (auto& c : res.clips) c.selected = false;
    const int base = target_total / kPitchBinCount;
    int remainder = target_total % kPitchBinCount;
    res.quotas.assign(kPitchBinCount, base);

    // Remainder: fewest-filled bins with spare candidates first, seeded tie-break.
    std::vector<int> order(kPitchBinCount);
    std::iota(order.begin(), order.end(), 0);
    Rng tie_rng(seed, Stream::selection, kPitchBinCount);
    seeded_shuffle(order, tie_rng);
    std::vector<int> rank(kPitchBinCount);
    for (int i = 0; i < kPitchBinCount; ++i) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
    auto filled = [&](int b) {
        return std::min<int>(base, static_cast<int>(candidates[static_cast<std::size_t>(b)].size()));
    };
    std::vector<int> eligible;
    for (int b = 0; b < kPitchBinCount; ++b) {
        if (static_cast<int>(candidates[static_cast<std::size_t>(b)].size()) > base) eligible.push_back(b);
    }
    std::sort(eligible.begin(), eligible.end(), [&](int a, int b) {
        if (filled(a) != filled(b)) return filled(a) < filled(b);
        return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)];
    });
    std::vector<bool> extra(kPitchBinCount, false);
    for (int b : eligible) {
        if (remainder == 0) break;
        extra[static_cast<std::size_t>(b)] = true;
        --remainder;
    }
    // Bins without spare candidates still carry the remainder in their quota
    // when nothing else can take it, so the shortfall report accounts for it.
    for (int b = 0; remainder > 0 && b < kPitchBinCount; ++b) {
        const auto idx = static_cast<std::size_t>(order[static_cast<std::size_t>(b)]);
        if (!extra[idx]) {
            extra[idx] = true;
            --remainder;
        }
    }

    res.selected_per_bin.assign(kPitchBinCount, 0);
    for (int b = 0; b < kPitchBinCount; ++b) {
        const auto bi = static_cast<std::size_t>(b);
        res.quotas[bi] = base + (extra[bi] ? 1 : 0);
        std::vector<std::size_t> pool = candidates[bi];
        Rng rng(seed, Stream::selection, static_cast<std::uint64_t>(b));
        seeded_shuffle(pool, rng);
        const int take = std::min<int>(res.quotas[bi], static_cast<int>(pool.size()));
        for (int i = 0; i < take; ++i) res.clips[pool[static_cast<std::size_t>(i)]].selected = true;
        res.selected_per_bin[bi] = take;
        res.total_selected += take;
        if (take < res.quotas[bi]) {
            res.shortfalls.push_back({b, res.quotas[bi], static_cast<int>(pool.size())});
        }
    }
    return res;
}

std::string shortfall_report(const SelectionResult& result) {
    std::ostringstream out;
    for (const auto& s : result.shortfalls) {
        const double lo = kPitchBinLow + s.bin * kPitchBinWidth;
        out << "bin " << s.bin << " [" << lo << ", " << lo + kPitchBinWidth << "): quota " << s.quota
            << ", available " << s.available << ", short by " << (s.quota - s.available) << "\n";
    }
    if (!result.shortfalls.empty()) {
        int quota_total = 0;
        for (int q : result.quotas) quota_total += q;
        out << "selected " << result.total_selected << " of " << quota_total << " requested\n";
    }
    return out.str();
}

std::vector<RollPlanEntry> augment_roll(const std::vector<ClipRecord>& clips, int frame_count,
                                        std::uint64_t seed, double roll_limit) {
    if (clips.empty()) throw InvalidArgument("augment_roll: empty selection");
    std::vector<RollPlanEntry> plan;
    plan.reserve(clips.size());
    for (const auto& c : clips) {
        Rng rng(seed, Stream::roll_augment, hash_string(c.clip_id));
        plan.push_back({c.clip_id, sample_roll_curve(rng, frame_count, roll_limit)});
    }
    return plan;
}

PoseManifest apply_roll_to_manifest(const PoseManifest& manifest, const std::vector<double>& roll_deg) {
    if (manifest.frames.size() != roll_deg.size()) {
        throw InvalidArgument("roll curve has " + std::to_string(roll_deg.size()) +
                              " frames, manifest has " + std::to_string(manifest.frames.size()));
    }
    PoseManifest out = manifest;
    for (std::size_t f = 0; f < roll_deg.size(); ++f) {
        out.frames[f].rotation =
            out.frames[f].rotation * euler_yxz_to_rotation({0.0, 0.0, roll_deg[f]});
    }
    return out;
}

std::vector<PerspectiveFrame> apply_roll_to_frames(const std::vector<PerspectiveFrame>& frames,
                                                   const std::vector<double>& roll_deg, int jobs) {
    if (frames.size() != roll_deg.size()) {
        throw InvalidArgument("roll curve length does not match frame count");
    }
    std::vector<PerspectiveFrame> out(frames.size());
    parallel_for(frames.size(), jobs, [&](std::size_t f) { out[f] = roll_warp(frames[f], roll_deg[f]); });
    return out;
}

std::vector<ClipRecord> read_clips_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open clip list " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError("clip list " + path.string() + " is empty");
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    if (!col.count("clip_id") || !col.count("mean_pitch")) {
        throw FormatError("clip list " + path.string() + " needs clip_id and mean_pitch columns");
    }
    auto get = [&](const std::vector<std::string>& row, const char* name) -> std::optional<std::string> {
        const auto it = col.find(name);
        if (it == col.end() || it->second >= row.size()) return std::nullopt;
        return row[it->second];
    };

    std::vector<ClipRecord> clips;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto row = split_csv_line(line);
        ClipRecord c;
        c.clip_id = get(row, "clip_id").value_or("");
        if (c.clip_id.empty()) {
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": missing clip_id");
        }
        try {
            std::size_t used = 0;
            const std::string p = get(row, "mean_pitch").value_or("");
            c.mean_pitch = std::stod(p, &used);
            if (used != p.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad mean_pitch");
        }
        c.source_path = get(row, "path").value_or("");
        if (auto b = get(row, "bin"); b && !b->empty()) c.assigned_bin = std::stoi(*b);
        if (auto o = get(row, "out_of_range"); o) c.out_of_range = *o == "1";
        if (auto s = get(row, "selected"); s) c.selected = *s == "1";
        clips.push_back(std::move(c));
    }
    return clips;
}

std::string format_clips_csv(const std::vector<ClipRecord>& clips) {
    std::ostringstream out;
    out << "clip_id,mean_pitch,path,bin,out_of_range,selected\n";
    for (const auto& c : clips) {
        out << csv_field(c.clip_id) << ',' << fmt(c.mean_pitch) << ',' << csv_field(c.source_path)
            << ',' << (c.assigned_bin ? std::to_string(*c.assigned_bin) : "") << ','
            << (c.out_of_range ? 1 : 0) << ',' << (c.selected ? 1 : 0) << '\n';
    }
    return out.str();
}

std::set<std::string> read_exclude_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open exclude list " + path.string());
    std::set<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto e = line.find_last_not_of(" \t\r");
        out.insert(line.substr(b, e - b + 1));
    }
    return out;
}

std::string format_roll_plan_csv(const std::vector<RollPlanEntry>& plan) {
    std::ostringstream out;
    out << "clip_id,frame,roll_deg\n";
    for (const auto& e : plan) {
        for (std::size_t f = 0; f < e.roll_deg.size(); ++f) {
            out << csv_field(e.clip_id) << ',' << f << ',' << fmt(e.roll_deg[f]) << '\n';
        }
    }
    return out.str();
}

}  // namespace gravcam
