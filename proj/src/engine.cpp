#include "ecolens/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace ecolens {

SlidingWindow::SlidingWindow(int capacity) : capacity_(capacity) {
    if (capacity <= 0) throw std::invalid_argument("window capacity must be positive");
    entries_.reserve(static_cast<std::size_t>(capacity));
}

void SlidingWindow::update(const Observation& obs) {
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&obs](const Observation& e) { return e.config == obs.config; });
    if (it != entries_.end()) entries_.erase(it);
    entries_.push_back(obs);
    if (entries_.size() > static_cast<std::size_t>(capacity_)) entries_.erase(entries_.begin());
}

const Observation* SlidingWindow::find(const Configuration& config) const {
    for (const auto& e : entries_)
        if (e.config == config) return &e;
    return nullptr;
}

ProfilePowerTable::ProfilePowerTable(const std::vector<ProfileRecord>& records) {
    for (const auto& r : records) {
        if (r.config.cpu_ghz != 1.5 || r.config.filter != FilterFeature::Pixel) continue;
        if (std::find(taus_.begin(), taus_.end(), r.config.threshold) == taus_.end())
            taus_.push_back(r.config.threshold);
        const double b = r.config.bitrate_kbps;
        if (std::find(bitrates_.begin(), bitrates_.end(), b) == bitrates_.end())
            bitrates_.push_back(b);
    }
    std::sort(taus_.begin(), taus_.end());
    std::sort(bitrates_.begin(), bitrates_.end());
    if (taus_.size() < 2 || bitrates_.size() < 2)
        throw std::invalid_argument("profile lacks a (threshold, bitrate) grid at 1.5 GHz/pixel");
    grid_.assign(taus_.size() * bitrates_.size(), -1.0);
    for (const auto& r : records) {
        if (r.config.cpu_ghz != 1.5 || r.config.filter != FilterFeature::Pixel) continue;
        const auto ti = std::find(taus_.begin(), taus_.end(), r.config.threshold) - taus_.begin();
        const auto bi = std::find(bitrates_.begin(), bitrates_.end(),
                                  double(r.config.bitrate_kbps)) - bitrates_.begin();
        grid_[static_cast<std::size_t>(ti) * bitrates_.size() + bi] = r.power_w;
    }
    for (double v : grid_)
        if (v < 0.0) throw std::invalid_argument("profile (threshold, bitrate) grid is incomplete");
}

double ProfilePowerTable::power_at(double threshold, double bitrate_kbps) const {
    auto bracket = [](const std::vector<double>& xs, double x) {
        std::size_t hi = 1;
        while (hi + 1 < xs.size() && xs[hi] < x) ++hi;
        const double lo_x = xs[hi - 1], hi_x = xs[hi];
        double w = (x - lo_x) / (hi_x - lo_x);
        return std::pair<std::size_t, double>{hi - 1, std::clamp(w, 0.0, 1.0)};
    };
    const auto [ti, tw] = bracket(taus_, threshold);
    const auto [bi, bw] = bracket(bitrates_, bitrate_kbps);
    const auto at = [this](std::size_t t, std::size_t b) { return grid_[t * bitrates_.size() + b]; };
    const double lo = at(ti, bi) + bw * (at(ti, bi + 1) - at(ti, bi));
    const double hi = at(ti + 1, bi) + bw * (at(ti + 1, bi + 1) - at(ti + 1, bi));
    return lo + tw * (hi - lo);
}

SlidingWindow seed_window(const std::vector<ProfileRecord>& profile, int capacity) {
    std::vector<ObjectivePoint> pts;
    pts.reserve(profile.size());
    for (const auto& r : profile) pts.push_back({r.accuracy, r.power_w});
    const auto front = pareto_front(pts);

    std::vector<ProfileRecord> picked;
    for (const auto& r : profile) {
        const ObjectivePoint p{r.accuracy, r.power_w};
        if (std::binary_search(front.begin(), front.end(), p,
                               [](const ObjectivePoint& a, const ObjectivePoint& b) {
                                   return a.power_w != b.power_w ? a.power_w < b.power_w
                                                                 : a.accuracy < b.accuracy;
                               })) {
            // one representative per objective point
            bool dup = false;
            for (const auto& q : picked)
                dup |= q.accuracy == r.accuracy && q.power_w == r.power_w;
            if (!dup) picked.push_back(r);
        }
    }
    std::sort(picked.begin(), picked.end(), [](const ProfileRecord& a, const ProfileRecord& b) {
        return a.power_w != b.power_w ? a.power_w < b.power_w
                                      : std::tie(a.config.threshold, a.config.bitrate_kbps) <
                                            std::tie(b.config.threshold, b.config.bitrate_kbps);
    });
    if (picked.size() > static_cast<std::size_t>(capacity)) picked.resize(capacity);

    // insert costliest first so the cheapest seeds age out last
    SlidingWindow window(capacity);
    for (auto it = picked.rbegin(); it != picked.rend(); ++it)
        window.update({it->config, {it->accuracy, it->power_w}, 0});
    return window;
}

ObjectivePoint acquisition_reference(const SlidingWindow& window) {
    double max_power = 0.0;
    for (const auto& e : window.entries()) max_power = std::max(max_power, e.point.power_w);
    return {0.0, kReferencePowerFactor * max_power};
}

std::vector<Configuration> assemble_candidates(const SlidingWindow& window, double target,
                                               int n_manual, int n_mbo,
                                               const GpSurrogate& model_accuracy,
                                               const GpSurrogate& model_power,
                                               const std::vector<Configuration>& grid) {
    if (window.empty()) throw std::invalid_argument("assemble_candidates: empty window");

    std::vector<Observation> by_power = window.entries();
    std::sort(by_power.begin(), by_power.end(), [](const Observation& a, const Observation& b) {
        return a.point.power_w != b.point.power_w
                   ? a.point.power_w < b.point.power_w
                   : std::tie(a.config.threshold, a.config.bitrate_kbps) <
                         std::tie(b.config.threshold, b.config.bitrate_kbps);
    });

    std::vector<ObjectivePoint> pts;
    for (const auto& e : window.entries()) pts.push_back(e.point);
    const auto front = pareto_front(pts);
    auto on_front = [&front](const ObjectivePoint& p) {
        return std::find(front.begin(), front.end(), p) != front.end();
    };

    std::vector<Configuration> manual;
    auto take = [&manual](const Configuration& c) {
        if (std::find(manual.begin(), manual.end(), c) == manual.end()) manual.push_back(c);
    };
    // Pareto-optimal entries meeting the target, cheapest first
    for (const auto& e : by_power) {
        if (static_cast<int>(manual.size()) >= n_manual) break;
        if (e.point.accuracy >= target && on_front(e.point)) take(e.config);
    }
    // then any entry meeting the target, cheapest first
    for (const auto& e : by_power) {
        if (static_cast<int>(manual.size()) >= n_manual) break;
        if (e.point.accuracy >= target) take(e.config);
    }
    // finally the most accurate entries
    std::vector<Observation> by_accuracy = window.entries();
    std::sort(by_accuracy.begin(), by_accuracy.end(),
              [](const Observation& a, const Observation& b) {
                  return a.point.accuracy != b.point.accuracy
                             ? a.point.accuracy > b.point.accuracy
                             : std::tie(a.config.threshold, a.config.bitrate_kbps) <
                                   std::tie(b.config.threshold, b.config.bitrate_kbps);
              });
    for (const auto& e : by_accuracy) {
        if (static_cast<int>(manual.size()) >= n_manual) break;
        take(e.config);
    }

    std::vector<Configuration> result = manual;
    if (n_mbo > 0) {
        AcquisitionContext ctx{front, acquisition_reference(window), &model_accuracy,
                               &model_power};
        for (const auto& c : suggest_batch(ctx, n_mbo, grid))
            if (std::find(result.begin(), result.end(), c) == result.end()) result.push_back(c);
    }
    return result;
}

Configuration select_optimal(const SlidingWindow& window, double target, int current_round) {
    const Observation* best_meeting = nullptr;
    const Observation* best_accuracy = nullptr;
    for (const auto& e : window.entries()) {
        if (e.round != current_round) continue;
        if (e.point.accuracy >= target) {
            if (!best_meeting ||
                std::tie(e.point.power_w, e.config.threshold, e.config.bitrate_kbps) <
                    std::tie(best_meeting->point.power_w, best_meeting->config.threshold,
                             best_meeting->config.bitrate_kbps))
                best_meeting = &e;
        }
        // fallback track: strictly higher accuracy wins, lower knobs on ties
        if (!best_accuracy || e.point.accuracy > best_accuracy->point.accuracy ||
            (e.point.accuracy == best_accuracy->point.accuracy &&
             std::tie(e.config.threshold, e.config.bitrate_kbps) <
                 std::tie(best_accuracy->config.threshold, best_accuracy->config.bitrate_kbps)))
            best_accuracy = &e;
    }
    if (best_meeting) return best_meeting->config;
    if (best_accuracy) return best_accuracy->config;
    throw std::runtime_error("select_optimal: no entries from the current round");
}

}  // namespace ecolens
