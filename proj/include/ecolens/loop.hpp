#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ecolens/core.hpp"
#include "ecolens/engine.hpp"
#include "ecolens/scene.hpp"

namespace ecolens {

/// Verify/explore bursts stream unfiltered at the maximum bitrate.
inline const Configuration kBurstConfig{1.5, FilterFeature::Pixel, 0.0, 3000};
inline constexpr int kBurstFrameCount = 15;  // one second at 15 fps
inline constexpr int kBurstFps = 15;

struct LoopParams {
    double target_accuracy = 0.90;
    double explore_duration_s = 5.0;   // includes the 1 s verify burst
    double exploit_duration_s = 60.0;
    int window_capacity = kDefaultWindowCapacity;
    int n_manual = kDefaultManualPicks;
    int n_mbo = kDefaultMboPicks;
    double total_duration_s = 900.0;
    std::uint64_t seed = 7;

    void validate() const;
};

enum class Phase { Verify, Explore, Exploit };
const char* to_string(Phase phase);

struct TraceEvent {
    double t_s = 0.0;
    Phase phase = Phase::Verify;
    Configuration config;
    double accuracy = 0.0;
    double power_w = 0.0;
    std::string note;  // empty or "config_switch"
};

/// What the online loop needs from the world: noisy observations of the
/// streamed configuration, burst-based accuracy evaluation of an arbitrary
/// configuration, and the noise-free power surface for baseline accounting.
class Backend {
public:
    virtual ~Backend() = default;
    virtual ObjectivePoint observe_stream(const Configuration& config, double t_s) = 0;
    virtual double evaluate_accuracy(const Configuration& config, double t_s) = 0;
    virtual double true_power_at(const Configuration& config, double t_s) = 0;
};

/// Scene-model backend: the simulator stands in for camera, energy monitor
/// and configuration evaluator. One seeded RNG stream drives all noise.
class SceneBackend : public Backend {
public:
    SceneBackend(const SceneModel& model, std::uint64_t seed);

    ObjectivePoint observe_stream(const Configuration& config, double t_s) override;
    double evaluate_accuracy(const Configuration& config, double t_s) override;
    double true_power_at(const Configuration& config, double t_s) override;

    const SceneModel& model() const { return *model_; }

private:
    const SceneModel* model_;
    std::mt19937_64 rng_;
};

struct RunSummary {
    double mean_accuracy = 0.0;
    double mean_power_w = 0.0;
    double baseline_power_w = 0.0;   // time-averaged noise-free baseline power
    double normalized_energy = 0.0;  // mean power / baseline power
    double savings_pct = 0.0;
    int switch_count = 0;
    int rounds = 0;
    double verify_s = 0.0;
    double explore_s = 0.0;
    double exploit_s = 0.0;
    Configuration baseline_config;
    Configuration final_config;
};

struct RunResult {
    std::vector<TraceEvent> trace;
    RunSummary summary;
};

/// Integration points for the networked agents. All hooks are optional and
/// must not influence the numbers: the trace is a function of (params,
/// scene, seed) alone.
struct RoundHooks {
    std::function<void(int round)> await_burst;
    std::function<void(const Configuration& config, int round, bool switched)> publish_config;
    std::function<void(const TraceEvent& event)> on_event;
};

/// Repeats verify -> explore -> exploit until the simulated clock reaches
/// total_duration_s. The window is seeded from the offline profile's Pareto
/// records; each cycle advances the clock by explore + exploit seconds.
RunResult run_online(const LoopParams& params, Backend& backend,
                     const std::vector<ProfileRecord>& seed_profile,
                     const Configuration& baseline, const RoundHooks* hooks = nullptr);

// Byte-stable serialization used by both the in-process runner and the
// server agent. One JSON object per line, keys in trace order.
std::string trace_event_line(const TraceEvent& event);
void write_trace_jsonl(const std::vector<TraceEvent>& trace, const std::filesystem::path& path);
std::string summary_json(const RunSummary& summary);
void write_summary_json(const RunSummary& summary, const std::filesystem::path& path);

}  // namespace ecolens
