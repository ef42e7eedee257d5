#include "gravcam/cli.hpp"

#include "gravcam/bench.hpp"
#include "gravcam/errors.hpp"
#include "gravcam/metrics.hpp"
#include "gravcam/parallel.hpp"
#include "gravcam/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>

namespace gravcam::cli {

namespace fs = std::filesystem;

namespace {

fs::path default_out_root() {
    const char* env = std::getenv("GRAVCAM_OUT");
    return env && *env ? fs::path(env) : fs::path("out");
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path);
    out << text;
}

Rotation euler_arg(const std::vector<double>& v) {
    return euler_yxz_to_rotation({v.at(0), v.at(1), v.at(2)});
}

void write_frames(const std::vector<PerspectiveFrame>& frames, const fs::path& dir) {
    fs::create_directories(dir);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        const auto& img = frames[f].image;
        write_image(img, dir / frame_filename(static_cast<int>(f), extension_for(img.depth)));
    }
}

std::string manifest_stem(const fs::path& p) {
    std::string name = p.filename().string();
    const std::string suffix = ".poses.json";
    if (name.size() > suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return name.substr(0, name.size() - suffix.size());
    }
    return p.stem().string();
}

std::vector<PairReport> metrics_reports(const fs::path& ref, const fs::path& est) {
    std::vector<PairReport> reports;
    if (!fs::is_directory(ref)) {
        TrajectoryPair pair{read_manifest(ref).frames, read_manifest(est).frames};
        reports.push_back(evaluate_pair(pair, manifest_stem(ref)));
        return reports;
    }
    if (!fs::is_directory(est)) throw InvalidArgument("--ref is a directory but --est is not");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(ref)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        const fs::path other = est / f.filename();
        if (!fs::exists(other)) throw FormatError("no estimate for " + f.filename().string());
        TrajectoryPair pair{read_manifest(f).frames, read_manifest(other).frames};
        try {
            reports.push_back(evaluate_pair(pair, manifest_stem(f)));
        } catch (const InvalidArgument& e) {
            throw ContextError(manifest_stem(f), std::nullopt, e.what(), true);
        }
    }
    if (reports.empty()) throw FormatError("no manifests in " + ref.string());
    return reports;
}

std::vector<ClipRecord> selected_only(std::vector<ClipRecord> clips) {
    const bool any = std::any_of(clips.begin(), clips.end(), [](const ClipRecord& c) { return c.selected; });
    if (!any) return clips;
    std::vector<ClipRecord> out;
    for (auto& c : clips)
        if (c.selected) out.push_back(std::move(c));
    return out;
}

void report_error(const std::exception& e) {
    std::cerr << "gravcam: error: " << e.what() << '\n';
    if (const auto* ce = dynamic_cast<const ContextError*>(&e)) {
        if (!ce->clip().empty()) std::cerr << "  clip: " << ce->clip() << '\n';
        if (ce->frame()) std::cerr << "  frame: " << *ce->frame() << '\n';
    } else if (const auto* fe = dynamic_cast<const FormatError*>(&e)) {
        if (fe->frame()) std::cerr << "  frame: " << *fe->frame() << '\n';
    }
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Gravity-aligned camera data pipeline", "gravcam"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::function<void()> action;
    int jobs = default_jobs();
    const fs::path out_root = default_out_root();

    auto add_jobs = [&](CLI::App* sub) {
        sub->add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);
    };

    // sample-traj
    int st_frames = 49;
    std::uint64_t st_seed = 0;
    bool st_eval = false;
    double st_roll_limit = 0.0;
    double st_fov = 90.0;
    std::string st_out, st_csv, st_config;
    {
        auto* sub = app.add_subcommand("sample-traj", "sample a camera rotation trajectory");
        sub->add_option("--frames,-n", st_frames, "frame count")->check(CLI::PositiveNumber);
        sub->add_option("--seed,-s", st_seed, "RNG seed");
        auto* ev = sub->add_flag("--eval", st_eval, "evaluation-time pitch/roll/yaw resampler");
        sub->add_option("--roll-limit", st_roll_limit, "roll bound for --eval")
            ->check(CLI::Range(0.0, 90.0))
            ->needs(ev);
        sub->add_option("--fov", st_fov, "fixed horizontal FoV for --eval")->needs(ev);
        sub->add_option("--config", st_config, "pipeline config JSON")->check(CLI::ExistingFile)->excludes(ev);
        sub->add_option("--out,-o", st_out, "manifest path (default stdout)");
        sub->add_option("--csv", st_csv, "per-frame Euler/FoV CSV");
        sub->callback([&] {
            action = [&] {
                std::vector<Rotation> rotations;
                std::vector<double> fovs;
                if (st_eval) {
                    rotations = sample_eval_rotation_trajectory(st_frames, st_seed, st_roll_limit);
                    fovs.assign(rotations.size(), st_fov);
                } else {
                    const PipelineConfig cfg = st_config.empty() ? PipelineConfig{} : load_pipeline_config(st_config);
                    const TrajectorySample t = sample_trajectory(st_frames, st_seed, cfg.path, cfg.fov);
                    rotations = t.rotations;
                    fovs = t.fovs;
                }
                write_text(serialize_manifest(manifest_from_poses(poses_from_rotations(rotations, fovs))), st_out);
                if (!st_csv.empty()) write_text(format_trajectory_csv(rotations, fovs), st_csv);
            };
        });
    }

    // render
    std::string r_input, r_manifest, r_out;
    std::vector<double> r_euler;
    double r_fov = 90.0;
    int r_width = 720, r_height = 480, r_frames = 1;
    {
        auto* sub = app.add_subcommand("render", "render perspective frames from an equirect clip");
        sub->add_option("--input,-i", r_input, "panorama image or frame directory")->required()->check(CLI::ExistingPath);
        auto* src = sub->add_option_group("orientation");
        auto* man = src->add_option("--manifest", r_manifest, "pose manifest (rotation and fov per frame)")
                        ->check(CLI::ExistingFile);
        auto* eul = src->add_option("--euler", r_euler, "yaw,pitch,roll in degrees")->expected(3)->delimiter(',');
        src->require_option(1);
        sub->add_option("--fov", r_fov, "horizontal FoV with --euler")->needs(eul)->excludes(man);
        sub->add_option("--frames", r_frames, "frame count with --euler")->needs(eul)->check(CLI::PositiveNumber);
        sub->add_option("--width", r_width)->check(CLI::PositiveNumber);
        sub->add_option("--height", r_height)->check(CLI::PositiveNumber);
        sub->add_option("--out,-o", r_out, "output directory");
        add_jobs(sub);
        sub->callback([&] {
            action = [&] {
                const EquirectClip clip = load_clip(r_input);
                std::vector<Rotation> rotations;
                std::vector<double> fovs;
                if (!r_manifest.empty()) {
                    for (const auto& p : read_manifest(r_manifest).frames) {
                        rotations.push_back(p.rotation);
                        fovs.push_back(p.fov_h);
                    }
                } else {
                    rotations.assign(static_cast<std::size_t>(r_frames), euler_arg(r_euler));
                    fovs.assign(rotations.size(), r_fov);
                }
                const auto frames = render_clip(clip, rotations, fovs, r_width, r_height, jobs);
                const fs::path dir = r_out.empty() ? out_root / "render" : fs::path(r_out);
                write_frames(frames, dir);
                write_manifest(manifest_from_poses(poses_from_rotations(rotations, fovs)), dir / "poses.json");
            };
        });
    }

    // cubefaces
    std::string c_input, c_out;
    int c_size = 512;
    {
        auto* sub = app.add_subcommand("cubefaces", "extract the six 90-degree cube faces");
        sub->add_option("--input,-i", c_input, "panorama image")->required()->check(CLI::ExistingFile);
        sub->add_option("--size", c_size, "face size in pixels")->check(CLI::PositiveNumber);
        sub->add_option("--out,-o", c_out, "output directory");
        add_jobs(sub);
        sub->callback([&] {
            action = [&] {
                const Image src = read_image(c_input);
                const auto faces = extract_cube_faces(src, c_size, jobs);
                const fs::path dir = c_out.empty() ? out_root / "cubefaces" : fs::path(c_out);
                fs::create_directories(dir);
                for (std::size_t i = 0; i < faces.size(); ++i) {
                    write_image(faces[i].image, dir / (std::string(cube_face_name(kCubeFaces[i])) +
                                                       extension_for(faces[i].image.depth)));
                }
            };
        });
    }

    // plucker
    std::string p_manifest, p_out;
    int p_width = 720, p_height = 480;
    {
        auto* sub = app.add_subcommand("plucker", "Plücker ray maps for a pose manifest");
        sub->add_option("--manifest,-m", p_manifest)->required()->check(CLI::ExistingFile);
        sub->add_option("--width", p_width)->check(CLI::PositiveNumber);
        sub->add_option("--height", p_height)->check(CLI::PositiveNumber);
        sub->add_option("--out,-o", p_out, "output .plk file")->required();
        add_jobs(sub);
        sub->callback([&] {
            action = [&] {
                const auto map = plucker_map(read_manifest(p_manifest).frames, p_width, p_height, jobs);
                if (fs::path(p_out).has_parent_path()) fs::create_directories(fs::path(p_out).parent_path());
                write_plucker(map, p_out);
            };
        });
    }

    // mask
    std::string m_manifest, m_out;
    std::vector<double> m_euler;
    int m_frame = 0, m_width = 1024;
    double m_fov = 90.0, m_aspect = 1.5;
    {
        auto* sub = app.add_subcommand("mask", "equirect mask of the directions seen by a crop");
        auto* src = sub->add_option_group("orientation");
        auto* man = src->add_option("--manifest", m_manifest)->check(CLI::ExistingFile);
        auto* eul = src->add_option("--euler", m_euler, "yaw,pitch,roll in degrees")->expected(3)->delimiter(',');
        src->require_option(1);
        sub->add_option("--frame", m_frame, "manifest frame")->needs(man)->check(CLI::NonNegativeNumber);
        sub->add_option("--fov", m_fov, "horizontal FoV with --euler")->needs(eul);
        sub->add_option("--aspect", m_aspect, "crop width / height")->check(CLI::PositiveNumber);
        sub->add_option("--width", m_width, "mask width (height is width / 2)")->check(CLI::PositiveNumber);
        sub->add_option("--out,-o", m_out, "output PNG")->required();
        sub->callback([&] {
            action = [&] {
                Rotation r = Rotation::identity();
                double fov = m_fov;
                if (!m_manifest.empty()) {
                    const auto m = read_manifest(m_manifest);
                    if (static_cast<std::size_t>(m_frame) >= m.frames.size()) {
                        throw InvalidArgument("--frame " + std::to_string(m_frame) + " out of range");
                    }
                    r = m.frames[static_cast<std::size_t>(m_frame)].rotation;
                    fov = m.frames[static_cast<std::size_t>(m_frame)].fov_h;
                } else {
                    r = euler_arg(m_euler);
                }
                if (m_width % 2 != 0) throw InvalidArgument("--width must be even");
                const auto mask = fov_mask(r, fov, m_aspect, m_width, m_width / 2);
                if (fs::path(m_out).has_parent_path()) fs::create_directories(fs::path(m_out).parent_path());
                write_image(mask.to_image(), m_out);
            };
        });
    }

    // bundle
    std::string b_clip, b_sfm, b_config, b_clip_id, b_out;
    std::uint64_t b_seed = 0;
    std::optional<int> b_width, b_height;
    std::optional<double> b_rate;
    bool b_frame_masks = false;
    {
        auto* sub = app.add_subcommand("bundle", "generate one training sample");
        sub->add_option("--clip", b_clip, "panorama frame directory or image")->required()->check(CLI::ExistingPath);
        sub->add_option("--sfm", b_sfm, "SfM pose manifest")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed,-s", b_seed);
        sub->add_option("--config", b_config, "pipeline config JSON")->check(CLI::ExistingFile);
        sub->add_option("--clip-id", b_clip_id, "defaults to the clip file/directory name");
        sub->add_option("--width", b_width)->check(CLI::PositiveNumber);
        sub->add_option("--height", b_height)->check(CLI::PositiveNumber);
        sub->add_option("--null-pitch-rate", b_rate)->check(CLI::Range(0.0, 1.0));
        sub->add_flag("--per-frame-masks", b_frame_masks);
        sub->add_option("--out,-o", b_out, "output root");
        add_jobs(sub);
        sub->callback([&] {
            action = [&] {
                PipelineConfig cfg = b_config.empty() ? PipelineConfig{} : load_pipeline_config(b_config);
                if (b_width) cfg.width = *b_width;
                if (b_height) cfg.height = *b_height;
                if (b_rate) cfg.null_pitch_rate = *b_rate;
                if (b_frame_masks) cfg.per_frame_masks = true;
                cfg.jobs = jobs;
                const std::string id = b_clip_id.empty() ? fs::path(b_clip).stem().string() : b_clip_id;
                EquirectClip clip;
                PoseManifest sfm;
                try {
                    clip = load_clip(b_clip);
                    sfm = read_manifest(b_sfm);
                } catch (const FormatError& e) {
                    throw ContextError(id, e.frame(), e.what(), true);
                }
                const auto bundle = generate_sample(clip, sfm, b_seed, cfg, id);
                const fs::path dir = write_bundle(bundle, b_out.empty() ? out_root : fs::path(b_out), cfg);
                std::cout << dir.string() << '\n';
            };
        });
    }

    // metrics
    std::string e_ref, e_est, e_out;
    {
        auto* sub = app.add_subcommand("metrics", "pose error report for reference/estimate manifests");
        sub->add_option("--ref", e_ref, "reference manifest or directory")->required()->check(CLI::ExistingPath);
        sub->add_option("--est", e_est, "estimate manifest or directory")->required()->check(CLI::ExistingPath);
        sub->add_option("--out,-o", e_out, "CSV path (default stdout)");
        sub->callback([&] {
            action = [&] {
                const auto reports = metrics_reports(e_ref, e_est);
                write_text(format_report_csv(reports, fs::is_directory(e_ref)), e_out);
            };
        });
    }

    // stats
    std::string s_manifest, s_out;
    double s_bin = 10.0;
    {
        auto* sub = app.add_subcommand("stats", "pitch/roll/yaw histograms of a manifest");
        sub->add_option("--manifest,-m", s_manifest)->required()->check(CLI::ExistingFile);
        sub->add_option("--bin-width", s_bin)->check(CLI::PositiveNumber);
        sub->add_option("--out,-o", s_out, "CSV path (default stdout)");
        sub->callback([&] {
            action = [&] { write_text(format_stats_csv(trajectory_stats(read_manifest(s_manifest).frames, s_bin)), s_out); };
        });
    }

    // bench-bin
    std::string bb_clips, bb_exclude, bb_out;
    {
        auto* sub = app.add_subcommand("bench-bin", "assign clips to 10-degree pitch bins");
        sub->add_option("--clips", bb_clips, "CSV with clip_id,mean_pitch[,path]")->required()->check(CLI::ExistingFile);
        sub->add_option("--exclude", bb_exclude, "clip ids to drop, one per line")->check(CLI::ExistingFile);
        sub->add_option("--out,-o", bb_out, "CSV path (default stdout)");
        sub->callback([&] {
            action = [&] {
                auto clips = read_clips_csv(bb_clips);
                if (!bb_exclude.empty()) clips = apply_exclusions(std::move(clips), read_exclude_list(bb_exclude));
                write_text(format_clips_csv(assign_bins(std::move(clips))), bb_out);
            };
        });
    }

    // bench-select
    std::string bs_clips, bs_exclude, bs_out, bs_report;
    int bs_target = 140;
    std::uint64_t bs_seed = 0;
    {
        auto* sub = app.add_subcommand("bench-select", "uniform per-bin benchmark selection");
        sub->add_option("--clips", bs_clips, "clip CSV")->required()->check(CLI::ExistingFile);
        sub->add_option("--exclude", bs_exclude)->check(CLI::ExistingFile);
        sub->add_option("--target", bs_target, "total clips")->check(CLI::Range(kPitchBinCount, 1 << 30));
        sub->add_option("--seed,-s", bs_seed);
        sub->add_option("--out,-o", bs_out, "selection CSV (default stdout)");
        sub->add_option("--report", bs_report, "shortfall report path (default stderr)");
        sub->callback([&] {
            action = [&] {
                auto clips = read_clips_csv(bs_clips);
                if (!bs_exclude.empty()) clips = apply_exclusions(std::move(clips), read_exclude_list(bs_exclude));
                const auto result = select_uniform(assign_bins(std::move(clips)), bs_target, bs_seed);
                std::vector<ClipRecord> chosen;
                for (const auto& c : result.clips)
                    if (c.selected) chosen.push_back(c);
                write_text(format_clips_csv(chosen), bs_out);
                const std::string report = shortfall_report(result);
                if (!bs_report.empty()) {
                    write_text(report, bs_report);
                } else if (!report.empty()) {
                    std::cerr << report;
                }
            };
        });
    }

    // bench-roll
    std::string br_selection, br_out, br_manifests, br_frames_dir, br_out_dir;
    int br_frames = 49;
    std::uint64_t br_seed = 0;
    double br_limit = 40.0;
    {
        auto* sub = app.add_subcommand("bench-roll", "plan (and optionally apply) roll augmentation");
        sub->add_option("--selection", br_selection, "selection CSV")->required()->check(CLI::ExistingFile);
        sub->add_option("--frames,-n", br_frames, "frames per clip")->check(CLI::PositiveNumber);
        sub->add_option("--seed,-s", br_seed);
        sub->add_option("--roll-limit", br_limit)->check(CLI::Range(0.0, 89.0));
        sub->add_option("--out,-o", br_out, "roll plan CSV (default stdout)");
        auto* man = sub->add_option("--manifests", br_manifests, "directory of <clip_id>.poses.json")
                        ->check(CLI::ExistingDirectory);
        sub->add_option("--execute", br_frames_dir, "directory of <clip_id>/frame_%05d images to warp")
            ->check(CLI::ExistingDirectory)
            ->needs(man);
        sub->add_option("--out-dir", br_out_dir, "output directory for manifests and frames")->needs(man);
        add_jobs(sub);
        sub->callback([&] {
            action = [&] {
                const auto clips = selected_only(read_clips_csv(br_selection));
                const auto plan = augment_roll(clips, br_frames, br_seed, br_limit);
                write_text(format_roll_plan_csv(plan), br_out);
                if (br_manifests.empty()) return;
                const fs::path dir = br_out_dir.empty() ? out_root / "bench-roll" : fs::path(br_out_dir);
                fs::create_directories(dir);
                for (const auto& entry : plan) {
                    try {
                        const auto m = read_manifest(fs::path(br_manifests) / (entry.clip_id + ".poses.json"));
                        write_manifest(apply_roll_to_manifest(m, entry.roll_deg), dir / (entry.clip_id + ".poses.json"));
                        if (br_frames_dir.empty()) continue;
                        const auto files = list_frames(fs::path(br_frames_dir) / entry.clip_id);
                        if (files.size() != m.frames.size()) {
                            throw InvalidArgument("frame count does not match manifest");
                        }
                        std::vector<PerspectiveFrame> frames(files.size());
                        for (std::size_t f = 0; f < files.size(); ++f) {
                            try {
                                frames[f].image = read_image(files[f]);
                            } catch (const FormatError& e) {
                                throw FormatError(e.what(), static_cast<long>(f));
                            }
                            frames[f].intrinsics = intrinsics_from_fov(m.frames[f].fov_h, frames[f].image.width,
                                                                       frames[f].image.height);
                            frames[f].pose_rotation = m.frames[f].rotation;
                        }
                        write_frames(apply_roll_to_frames(frames, entry.roll_deg, jobs), dir / entry.clip_id);
                    } catch (const FormatError& e) {
                        throw ContextError(entry.clip_id, e.frame(), e.what(), true);
                    } catch (const InvalidArgument& e) {
                        throw ContextError(entry.clip_id, std::nullopt, e.what(), true);
                    }
                }
            };
        });
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (action) action();
        return kOk;
    } catch (const std::exception& e) {
        report_error(e);
        return kDataError;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace gravcam::cli
