#include "ecolens/loop.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ecolens {

void LoopParams::validate() const {
    if (target_accuracy <= 0.0 || target_accuracy > 1.0)
        throw std::invalid_argument("target accuracy must be in (0, 1]");
    if (explore_duration_s < 2.0)
        throw std::invalid_argument("explore duration must cover the burst plus one second");
    if (exploit_duration_s < 1.0) throw std::invalid_argument("exploit duration must be positive");
    if (total_duration_s <= 0.0) throw std::invalid_argument("total duration must be positive");
    if (window_capacity < 2)
        throw std::invalid_argument("window capacity must hold at least 2 observations");
    if (n_manual < 0 || n_mbo < 0) throw std::invalid_argument("pick counts must be non-negative");
    if (n_manual + n_mbo <= 0) throw std::invalid_argument("need at least one candidate per round");
}

const char* to_string(Phase phase) {
    switch (phase) {
        case Phase::Verify: return "verify";
        case Phase::Explore: return "explore";
        case Phase::Exploit: return "exploit";
    }
    return "?";
}

SceneBackend::SceneBackend(const SceneModel& model, std::uint64_t seed)
    : model_(&model), rng_(seed) {}

ObjectivePoint SceneBackend::observe_stream(const Configuration& config, double t_s) {
    return observe(*model_, config, t_s, rng_);
}

double SceneBackend::evaluate_accuracy(const Configuration& config, double t_s) {
    // the evaluator re-simulates the burst under `config`; same noise model,
    // power draw discarded
    return observe(*model_, config, t_s, rng_).accuracy;
}

double SceneBackend::true_power_at(const Configuration& config, double t_s) {
    return true_power(*model_, config, model_->drift_mix(t_s));
}

namespace {

struct LoopState {
    SlidingWindow window;
    Configuration current;
    int round = 0;
};

double attributed_power(const SlidingWindow& window, const ProfilePowerTable& table,
                        const Configuration& config) {
    // energy is not re-measured online: keep the most recently recorded power
    // for known configurations, read fresh ones off the offline profile
    if (const Observation* prev = window.find(config)) return prev->point.power_w;
    return table.power_at(config.threshold, config.bitrate_kbps);
}

}  // namespace

RunResult run_online(const LoopParams& params, Backend& backend,
                     const std::vector<ProfileRecord>& seed_profile,
                     const Configuration& baseline, const RoundHooks* hooks) {
    params.validate();
    if (seed_profile.empty()) throw std::invalid_argument("run_online: empty seed profile");

    const ProfilePowerTable power_table(seed_profile);
    const auto grid = online_grid();

    LoopState state{seed_window(seed_profile, params.window_capacity), {}, 0};
    state.current = select_optimal(state.window, params.target_accuracy, 0);

    RunResult result;
    RunSummary& summary = result.summary;
    summary.baseline_config = baseline;

    auto emit = [&](TraceEvent ev) {
        if (hooks && hooks->on_event) hooks->on_event(ev);
        result.trace.push_back(std::move(ev));
    };

    double t = 0.0;
    while (t < params.total_duration_s) {
        ++state.round;
        const int round = state.round;
        if (hooks && hooks->await_burst) hooks->await_burst(round);

        // verify: one burst second re-scoring the incumbent configuration
        const double verified_acc = backend.evaluate_accuracy(state.current, t);
        const ObjectivePoint burst = backend.observe_stream(kBurstConfig, t);
        state.window.update({state.current,
                             {verified_acc, attributed_power(state.window, power_table,
                                                             state.current)},
                             round});
        emit({t, Phase::Verify, state.current, verified_acc, burst.power_w, ""});
        summary.verify_s += 1.0;

        // explore: profile the assembled candidates against the same burst
        const auto acc_model = GpSurrogate::fit(state.window.entries(), Objective::Accuracy);
        const auto pow_model = GpSurrogate::fit(state.window.entries(), Objective::Power);
        const auto candidates =
            assemble_candidates(state.window, params.target_accuracy, params.n_manual,
                                params.n_mbo, acc_model, pow_model, grid);
        for (const auto& c : candidates) {
            const double acc = backend.evaluate_accuracy(c, t);
            state.window.update({c, {acc, attributed_power(state.window, power_table, c)}, round});
        }
        for (double s = 1.0; s < params.explore_duration_s; s += 1.0) {
            if (t + s >= params.total_duration_s) break;
            const auto pt = backend.observe_stream(state.current, t + s);
            emit({t + s, Phase::Explore, state.current, pt.accuracy, pt.power_w, ""});
            summary.explore_s += 1.0;
        }

        const Configuration next = select_optimal(state.window, params.target_accuracy, round);
        const bool switched = !(next == state.current);
        state.current = next;
        if (hooks && hooks->publish_config) hooks->publish_config(state.current, round, switched);
        if (switched) ++summary.switch_count;

        // exploit: stream the chosen configuration, one event per second
        for (double s = 0.0; s < params.exploit_duration_s; s += 1.0) {
            const double ts = t + params.explore_duration_s + s;
            if (ts >= params.total_duration_s) break;
            const auto pt = backend.observe_stream(state.current, ts);
            emit({ts, Phase::Exploit, state.current, pt.accuracy, pt.power_w,
                  switched && s == 0.0 ? "config_switch" : ""});
            summary.exploit_s += 1.0;
        }

        t += params.explore_duration_s + params.exploit_duration_s;
    }

    summary.rounds = state.round;
    summary.final_config = state.current;
    for (const auto& ev : result.trace) {
        summary.mean_accuracy += ev.accuracy;
        summary.mean_power_w += ev.power_w;
    }
    if (!result.trace.empty()) {
        summary.mean_accuracy /= static_cast<double>(result.trace.size());
        summary.mean_power_w /= static_cast<double>(result.trace.size());
    }
    double baseline_total = 0.0;
    int baseline_seconds = 0;
    for (double ts = 0.0; ts < params.total_duration_s; ts += 1.0, ++baseline_seconds)
        baseline_total += backend.true_power_at(baseline, ts);
    summary.baseline_power_w = baseline_seconds ? baseline_total / baseline_seconds : 0.0;
    summary.normalized_energy =
        summary.baseline_power_w > 0.0 ? summary.mean_power_w / summary.baseline_power_w : 0.0;
    summary.savings_pct = 100.0 * (1.0 - summary.normalized_energy);
    return result;
}

std::string trace_event_line(const TraceEvent& ev) {
    nlohmann::ordered_json j;
    j["t_s"] = ev.t_s;
    j["phase"] = to_string(ev.phase);
    j["threshold"] = ev.config.threshold;
    j["bitrate_kbps"] = ev.config.bitrate_kbps;
    j["accuracy"] = ev.accuracy;
    j["power_w"] = ev.power_w;
    if (!ev.note.empty()) j["note"] = ev.note;
    return j.dump();
}

void write_trace_jsonl(const std::vector<TraceEvent>& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& ev : trace) out << trace_event_line(ev) << "\n";
}

std::string summary_json(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["mean_accuracy"] = s.mean_accuracy;
    j["mean_power_w"] = s.mean_power_w;
    j["baseline"] = {{"cpu_ghz", s.baseline_config.cpu_ghz},
                     {"filter", to_string(s.baseline_config.filter)},
                     {"threshold", s.baseline_config.threshold},
                     {"bitrate_kbps", s.baseline_config.bitrate_kbps},
                     {"mean_power_w", s.baseline_power_w}};
    j["normalized_energy"] = s.normalized_energy;
    j["energy_savings_pct"] = s.savings_pct;
    j["switch_count"] = s.switch_count;
    j["rounds"] = s.rounds;
    j["phase_seconds"] = {{"verify", s.verify_s}, {"explore", s.explore_s},
                          {"exploit", s.exploit_s}};
    j["final_config"] = {{"threshold", s.final_config.threshold},
                         {"bitrate_kbps", s.final_config.bitrate_kbps}};
    return j.dump(2) + "\n";
}

void write_summary_json(const RunSummary& summary, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << summary_json(summary);
}

}  // namespace ecolens
