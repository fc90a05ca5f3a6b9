#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace ecolens {

enum class FilterFeature { Pixel, Area, Edge };

const char* to_string(FilterFeature f);
FilterFeature filter_feature_from_string(const std::string& name);

/// One point in the control space: CPU frequency, frame-difference filter,
/// filter threshold and encoding bitrate. The online stage pins frequency
/// and filter and only moves (threshold, bitrate).
struct Configuration {
    double cpu_ghz = 1.5;
    FilterFeature filter = FilterFeature::Pixel;
    double threshold = 0.0;        // fraction in [0, 1]
    int bitrate_kbps = 3000;       // [100, 3000]

    friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

/// Objective-space coordinates: accuracy is maximized, power minimized.
/// Units stay raw (fraction, watts); normalization is the surrogate's job.
struct ObjectivePoint {
    double accuracy = 0.0;
    double power_w = 0.0;

    friend auto operator<=>(const ObjectivePoint&, const ObjectivePoint&) = default;
};

struct Observation {
    Configuration config;
    ObjectivePoint point;
    int round = 0;
};

/// Weak Pareto dominance with at least one strict inequality.
bool dominates(const ObjectivePoint& p, const ObjectivePoint& q);

/// Non-dominated subset, exact duplicates collapsed, sorted by ascending
/// power (hence ascending accuracy).
std::vector<ObjectivePoint> pareto_front(const std::vector<ObjectivePoint>& points);

/// Area dominated by `front` and bounded by `ref`, in accuracy x watts.
/// Every front point must strictly dominate ref (throws otherwise).
/// Dominated or duplicate entries in `front` contribute nothing.
double hypervolume_2d(const std::vector<ObjectivePoint>& front, const ObjectivePoint& ref);

// Control-knob grids used for profiling and online candidates.
inline constexpr double kCpuFrequencies[] = {1.5, 1.8, 2.1, 2.4};
inline constexpr FilterFeature kFilterFeatures[] = {FilterFeature::Pixel,
                                                    FilterFeature::Area,
                                                    FilterFeature::Edge};
inline constexpr int kBitratesKbps[] = {100,  400,  700,  1000, 1300, 1600,
                                        1900, 2100, 2400, 2700, 3000};
inline constexpr int kThresholdSteps = 11;  // 0.00 .. 0.10 in 0.01 steps

double threshold_step(int i);

/// Full 4 x 3 x 11 x 11 profiling grid (1452 configurations).
std::vector<Configuration> offline_grid();

/// Online search grid: frequency and filter pinned to 1.5 GHz / pixel,
/// 11 thresholds x 11 bitrates.
std::vector<Configuration> online_grid();

}  // namespace ecolens
