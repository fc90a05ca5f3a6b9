#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "ecolens/core.hpp"

namespace ecolens {

inline constexpr double kMaxBitrateKbps = 3000.0;

/// Accuracy surface coefficients for one scene regime (day or night):
/// a normalized exponential bitrate-saturation term times a normalized
/// logistic threshold penalty. Both factors are exactly 1 at (tau=0, b=3000).
struct RegimeAccuracyParams {
    double sat_c = 0.0;
    double sat_b0 = 1.0;
    double dec_k = 1.0;
    double dec_tau0 = 1.0;
};

/// Affine power decomposition: per-frequency base, per-filter compute cost
/// scaled by frequency, and an encode term proportional to the fraction of
/// frames passing the filter times a bitrate factor.
struct PowerParams {
    std::vector<double> cpu_ghz;            // ascending
    std::vector<double> base_w;             // per frequency
    double filter_w[3] = {0, 0, 0};         // pixel, area, edge at the lowest frequency
    std::vector<double> filter_cpu_scale;   // per frequency
    double encode_w = 0.0;                  // full-pass, max-bitrate encode cost at 1.5 GHz
    std::vector<double> encode_cpu_scale;   // per frequency
    double bitrate_floor = 0.0;             // g(b) = floor + (1-floor)*(b/3000)^exp
    double bitrate_exp = 1.0;
    std::vector<double> pass_tau;           // knots for the pass-rate curves
    std::vector<double> pass_day;           // non-increasing, pass_day[0] = 1
    std::vector<double> pass_night;
};

/// Parametric ground truth: accuracy/power surfaces per regime, a drift
/// schedule mixing day into night, and seeded observation noise.
struct SceneModel {
    std::uint64_t seed = 0;
    double noise_sd_accuracy = 0.0;
    double noise_sd_power = 0.0;
    std::vector<std::pair<double, double>> drift_schedule;  // (time_s, p), times ascending
    RegimeAccuracyParams day;
    RegimeAccuracyParams night;
    PowerParams power;

    /// Regime mix p(t) in [0,1] (0 = day, 1 = night), linear between breakpoints.
    double drift_mix(double t_s) const;
};

struct ProfileRecord {
    Configuration config;
    double accuracy = 0.0;
    double power_w = 0.0;
    double regime = 0.0;

    friend bool operator==(const ProfileRecord&, const ProfileRecord&) = default;
};

/// Noise-free accuracy at regime mix p. Depends on threshold and bitrate
/// only; frequency and filter move power alone.
double true_accuracy(const SceneModel& model, const Configuration& config, double p);

/// Noise-free average power in watts at regime mix p.
double true_power(const SceneModel& model, const Configuration& config, double p);

/// True values at p(t) plus independent Gaussian noise (accuracy first, then
/// power), clamped to valid ranges. Advances the caller's RNG stream.
ObjectivePoint observe(const SceneModel& model, const Configuration& config, double t_s,
                       std::mt19937_64& rng);

/// Noise-free profile of every grid configuration at a fixed regime mix.
std::vector<ProfileRecord> offline_profile(const SceneModel& model,
                                           const std::vector<Configuration>& grid, double p);

SceneModel load_scene(const std::filesystem::path& path);

// Profile CSV: header cpu_ghz,filter,threshold,bitrate_kbps,accuracy,power_w.
void save_profile_csv(const std::vector<ProfileRecord>& records,
                      const std::filesystem::path& path);
std::vector<ProfileRecord> load_profile_csv(const std::filesystem::path& path);

}  // namespace ecolens
