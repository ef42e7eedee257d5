#include "gravcam/bench.hpp"
#include "gravcam/cli.hpp"
#include "gravcam/metrics.hpp"
#include "gravcam/pipeline.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace gravcam;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

int shell(const std::string& args) {
    const std::string cmd = std::string(GRAVCAM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string synthetic_clips_csv(int per_bin) {
    std::string s = "clip_id,mean_pitch,path\n";
    for (int b = 0; b < kPitchBinCount; ++b)
        for (int i = 0; i < per_bin; ++i)
            s += "v" + std::to_string(b) + "_" + std::to_string(i) + "," + std::to_string(-84.0 + 10 * b + i * 0.3) +
                 ",/videos/v.mp4\n";
    return s;
}

}  // namespace

TEST(Cli, SampleTrajIsDeterministicAndMatchesLibrary) {
    const auto dir = temp_dir("cli_traj");
    const std::string a = (dir / "a.json").string(), b = (dir / "b.json").string();
    ASSERT_EQ(cli::run({"sample-traj", "--frames", "49", "--seed", "7", "-o", a, "--csv", (dir / "a.csv").string()}), 0);
    ASSERT_EQ(cli::run({"sample-traj", "--frames", "49", "--seed", "7", "-o", b}), 0);
    EXPECT_EQ(slurp(a), slurp(b));

    const auto t = sample_trajectory(49, 7);
    EXPECT_EQ(slurp(a), serialize_manifest(manifest_from_poses(poses_from_rotations(t.rotations, t.fovs))));
    EXPECT_EQ(slurp(dir / "a.csv"), format_trajectory_csv(t.rotations, t.fovs));

    ASSERT_EQ(cli::run({"sample-traj", "--frames", "10", "--eval", "--roll-limit", "0", "-o", a}), 0);
    for (const auto& p : read_manifest(a).frames) EXPECT_NEAR(rotation_to_euler_yxz(p.rotation).roll, 0.0, 1e-9);
}

TEST(Cli, MetricsSelfComparisonIsZero) {
    const auto dir = temp_dir("cli_metrics");
    const auto t = sample_trajectory(12, 3);
    write_manifest(manifest_from_poses(poses_from_rotations(t.rotations, t.fovs)), dir / "a.poses.json");
    const auto out = dir / "report.csv";
    ASSERT_EQ(cli::run({"metrics", "--ref", (dir / "a.poses.json").string(), "--est",
                        (dir / "a.poses.json").string(), "-o", out.string()}),
              0);
    EXPECT_EQ(slurp(out), "clip_id,pitch_err,gravity_err,rot_err,trans_err\na,0,0,0,0\n");
}

TEST(Cli, MetricsOverDirectories) {
    const auto root = temp_dir("cli_metrics_dir");
    fs::create_directories(root / "ref");
    fs::create_directories(root / "est");
    std::vector<PairReport> expect;
    for (int i = 0; i < 3; ++i) {
        const auto r = sample_trajectory(8, static_cast<std::uint64_t>(i));
        const auto e = sample_trajectory(8, static_cast<std::uint64_t>(i + 100));
        const auto rp = poses_from_rotations(r.rotations, r.fovs), ep = poses_from_rotations(e.rotations, e.fovs);
        const std::string name = "clip" + std::to_string(i);
        write_manifest(manifest_from_poses(rp), root / "ref" / (name + ".poses.json"));
        write_manifest(manifest_from_poses(ep), root / "est" / (name + ".poses.json"));
        expect.push_back(evaluate_pair({rp, ep}, name));
    }
    const auto out = root / "r.csv";
    ASSERT_EQ(cli::run({"metrics", "--ref", (root / "ref").string(), "--est", (root / "est").string(), "-o",
                        out.string()}),
              0);
    EXPECT_EQ(slurp(out), format_report_csv(expect, true));
}

TEST(Cli, BenchSelect140) {
    const auto dir = temp_dir("cli_bench");
    write_file(dir / "clips.csv", synthetic_clips_csv(20));
    const auto out = dir / "sel.csv";
    ASSERT_EQ(cli::run({"bench-select", "--clips", (dir / "clips.csv").string(), "--target", "140", "--seed", "1",
                        "-o", out.string()}),
              0);
    const auto sel = read_clips_csv(out);
    EXPECT_EQ(sel.size(), 140u);
    std::vector<int> counts(kPitchBinCount, 0);
    for (const auto& c : sel) ++counts[static_cast<std::size_t>(*c.assigned_bin)];
    for (int n : counts) EXPECT_TRUE(n == 8 || n == 9);

    const auto lib = select_uniform(assign_bins(read_clips_csv(dir / "clips.csv")), 140, 1);
    std::vector<ClipRecord> chosen;
    for (const auto& c : lib.clips)
        if (c.selected) chosen.push_back(c);
    EXPECT_EQ(slurp(out), format_clips_csv(chosen));
}

TEST(Cli, BenchBinAndRoll) {
    const auto dir = temp_dir("cli_roll");
    write_file(dir / "clips.csv", synthetic_clips_csv(1));
    write_file(dir / "exclude.txt", "v0_0\n");
    ASSERT_EQ(cli::run({"bench-bin", "--clips", (dir / "clips.csv").string(), "--exclude",
                        (dir / "exclude.txt").string(), "-o", (dir / "binned.csv").string()}),
              0);
    const auto binned = read_clips_csv(dir / "binned.csv");
    EXPECT_EQ(binned.size(), 16u);

    fs::create_directories(dir / "manifests");
    fs::create_directories(dir / "frames");
    for (const auto& c : binned) {
        write_manifest(manifest_from_poses(std::vector<CameraPose>(3)), dir / "manifests" / (c.clip_id + ".poses.json"));
        fs::create_directories(dir / "frames" / c.clip_id);
        for (int f = 0; f < 3; ++f) {
            Image img(16, 12, 1, BitDepth::u8);
            std::fill(img.data.begin(), img.data.end(), 0.5f);
            write_image(img, dir / "frames" / c.clip_id / frame_filename(f, ".png"));
        }
    }
    ASSERT_EQ(cli::run({"bench-roll", "--selection", (dir / "binned.csv").string(), "--frames", "3", "--seed", "4",
                        "-o", (dir / "plan.csv").string(), "--manifests", (dir / "manifests").string(), "--execute",
                        (dir / "frames").string(), "--out-dir", (dir / "out").string()}),
              0);
    const auto plan = augment_roll(binned, 3, 4);
    EXPECT_EQ(slurp(dir / "plan.csv"), format_roll_plan_csv(plan));
    const auto rolled = read_manifest(dir / "out" / (plan[0].clip_id + ".poses.json"));
    EXPECT_NEAR(rotation_to_euler_yxz(rolled.frames[2].rotation).roll, plan[0].roll_deg[2], 1e-9);
    EXPECT_TRUE(fs::exists(dir / "out" / plan[0].clip_id / "frame_00002.png"));
}

TEST(Cli, RenderMaskPluckerCubefacesStats) {
    const auto dir = temp_dir("cli_render");
    Image pano = latlon_panorama(64);
    for (auto& v : pano.data) v = std::clamp(v / 360.0f + 0.5f, 0.0f, 1.0f);
    write_image(pano, dir / "pano.pfm");
    const auto t = sample_trajectory(3, 5);
    const auto m = manifest_from_poses(poses_from_rotations(t.rotations, t.fovs));
    write_manifest(m, dir / "traj.json");

    ASSERT_EQ(cli::run({"render", "-i", (dir / "pano.pfm").string(), "--manifest", (dir / "traj.json").string(),
                        "--width", "12", "--height", "8", "-o", (dir / "render").string(), "-j", "2"}),
              0);
    const auto frames = render_clip({{pano}}, t.rotations, t.fovs, 12, 8);
    EXPECT_EQ(read_image(dir / "render" / "frame_00001.pfm").data, frames[1].image.data);

    ASSERT_EQ(cli::run({"mask", "--euler", "10,20,30", "--fov", "60", "--width", "64", "-o", (dir / "m.png").string()}), 0);
    EXPECT_EQ(read_image(dir / "m.png").data,
              fov_mask(euler_yxz_to_rotation({10, 20, 30}), 60, 1.5, 64, 32).to_image().data);

    ASSERT_EQ(cli::run({"plucker", "-m", (dir / "traj.json").string(), "--width", "6", "--height", "4", "-o",
                        (dir / "r.plk").string()}),
              0);
    EXPECT_TRUE(read_plucker(dir / "r.plk") == plucker_map(m.frames, 6, 4));

    ASSERT_EQ(cli::run({"cubefaces", "-i", (dir / "pano.pfm").string(), "--size", "8", "-o", (dir / "cube").string()}), 0);
    EXPECT_TRUE(fs::exists(dir / "cube" / "bottom.pfm"));

    ASSERT_EQ(cli::run({"stats", "-m", (dir / "traj.json").string(), "-o", (dir / "s.csv").string()}), 0);
    EXPECT_EQ(slurp(dir / "s.csv"), format_stats_csv(trajectory_stats(m.frames, 10)));
}

TEST(Cli, BundleMatchesLibrary) {
    const auto dir = temp_dir("cli_bundle");
    Image pano = latlon_panorama(64);
    write_image(pano, dir / "pano.pfm");
    write_manifest(manifest_from_poses(std::vector<CameraPose>(2)), dir / "sfm.json");
    ASSERT_EQ(cli::run({"bundle", "--clip", (dir / "pano.pfm").string(), "--sfm", (dir / "sfm.json").string(),
                        "--seed", "9", "--width", "16", "--height", "8", "-o", (dir / "out").string(), "-j", "1"}),
              0);
    PipelineConfig cfg;
    cfg.width = 16;
    cfg.height = 8;
    const auto b = generate_sample({{pano}}, manifest_from_poses(std::vector<CameraPose>(2)), 9, cfg, "pano");
    EXPECT_TRUE(read_plucker(dir / "out" / "pano" / "9" / "rays.plk") == b.rays);
}

TEST(Cli, ExitCodes) {
    const auto dir = temp_dir("cli_exit");
    EXPECT_EQ(shell("--help"), 0);
    EXPECT_EQ(shell(""), 1);
    EXPECT_EQ(shell("no-such-command"), 1);
    EXPECT_EQ(shell("sample-traj --frames abc"), 1);
    EXPECT_EQ(shell("sample-traj --roll-limit 10"), 1);  // needs --eval
    write_file(dir / "p.json", "{\"version\": 1, \"frames\": []}");
    EXPECT_EQ(shell("render -i " + (dir / "p.json").string() + " --manifest " + (dir / "p.json").string() +
                    " --euler 0,0,0"),
              1);
    write_file(dir / "bad.json", "{ broken");
    EXPECT_EQ(shell("stats -m " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(shell("metrics --ref " + (dir / "bad.json").string() + " --est " + (dir / "bad.json").string()), 2);
}

TEST(Cli, DataErrorsNameClipAndFrame) {
    const auto dir = temp_dir("cli_ctx");
    write_image(latlon_panorama(32), dir / "pano.pfm");
    write_manifest(manifest_from_poses(std::vector<CameraPose>(2)), dir / "sfm.json");
    fs::create_directories(dir / "clip");
    write_image(latlon_panorama(32), dir / "clip" / "frame_00000.pfm");
    write_image(Image(10, 10, 3), dir / "clip" / "frame_00001.pfm");
    const std::string cmd = std::string(GRAVCAM_CLI_PATH) + " bundle --clip " + (dir / "clip").string() + " --sfm " +
                            (dir / "sfm.json").string() + " -o " + (dir / "out").string() + " 2>" +
                            (dir / "err.txt").string();
    const int status = std::system(cmd.c_str());
    EXPECT_EQ(WEXITSTATUS(status), 2);
    const std::string err = slurp(dir / "err.txt");
    EXPECT_NE(err.find("clip: clip"), std::string::npos) << err;
    EXPECT_NE(err.find("frame: 1"), std::string::npos) << err;
}

TEST(Cli, OutputRootFromEnvironment) {
    const auto dir = temp_dir("cli_env");
    write_image(latlon_panorama(32), dir / "pano.pfm");
    setenv("GRAVCAM_OUT", (dir / "envroot").string().c_str(), 1);
    ASSERT_EQ(cli::run({"cubefaces", "-i", (dir / "pano.pfm").string(), "--size", "4"}), 0);
    unsetenv("GRAVCAM_OUT");
    EXPECT_TRUE(fs::exists(dir / "envroot" / "cubefaces" / "front.pfm"));
}
