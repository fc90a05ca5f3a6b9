#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ecolens/core.hpp"
#include "ecolens/loop.hpp"

namespace ecolens::cmd {

/// Flags win over file values; seed falls back to the scene file's.
struct ProfileOptions {
    std::filesystem::path scene_file;
    double regime = 0.0;  // p in [0,1]
    std::filesystem::path out_csv;
};

struct RunOptions {
    std::filesystem::path scene_file;
    std::filesystem::path out_dir;
    LoopParams params;
    bool seed_overridden = false;  // when false, the scene file's seed is used
    bool write_plot = true;
    Configuration baseline{2.4, FilterFeature::Pixel, 0.0, 3000};
};

struct EvalOptions {
    std::filesystem::path frames_dir;
    std::filesystem::path gt_detections;
    std::filesystem::path kept_detections;
    FilterFeature feature = FilterFeature::Pixel;
    double threshold = 0.0;
    int area_change_threshold = 25;
    double edge_binarize_level = 0.125;
    std::filesystem::path report_path;  // optional; report always goes to stdout
};

struct ParetoOptions {
    std::filesystem::path profile_csv;
    std::filesystem::path out_csv;
};

struct ServeOptions {
    std::filesystem::path scene_file;
    std::filesystem::path out_dir;
    int port = 7401;
    LoopParams params;
    bool seed_overridden = false;
};

struct CameraOptionsCli {
    std::string host = "127.0.0.1";
    int port = 7401;
    std::filesystem::path frames_dir;
    double threshold = 0.0;
    int bitrate_kbps = 3000;
    std::uint64_t seed = 7;
};

// Each command returns a process exit status and reports failures on stderr.
int cmd_profile(const ProfileOptions& options);
int cmd_run(const RunOptions& options);
int cmd_eval(const EvalOptions& options);
int cmd_pareto(const ParetoOptions& options);
int cmd_serve(const ServeOptions& options, int* bound_port = nullptr);
int cmd_camera(const CameraOptionsCli& options);

/// Default output directory: $ECOLENS_OUT_DIR or ./out.
std::filesystem::path default_out_dir();

std::filesystem::path pareto_companion_path(const std::filesystem::path& out_csv);

}  // namespace ecolens::cmd
