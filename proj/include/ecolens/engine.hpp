#pragma once

#include <optional>
#include <vector>

#include "ecolens/acquisition.hpp"
#include "ecolens/core.hpp"
#include "ecolens/scene.hpp"
#include "ecolens/surrogate.hpp"

namespace ecolens {

inline constexpr int kDefaultWindowCapacity = 20;
inline constexpr int kDefaultManualPicks = 6;
inline constexpr int kDefaultMboPicks = 4;
inline constexpr double kReferencePowerFactor = 1.25;

/// Fixed-capacity recency dataset of observations, unique per configuration.
/// Entries are held oldest-first; updates move a configuration to the
/// most-recent slot, inserts evict the oldest once at capacity.
class SlidingWindow {
public:
    explicit SlidingWindow(int capacity = kDefaultWindowCapacity);

    void update(const Observation& obs);
    const Observation* find(const Configuration& config) const;
    const std::vector<Observation>& entries() const { return entries_; }
    int capacity() const { return capacity_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

private:
    int capacity_;
    std::vector<Observation> entries_;
};

/// Power lookup over the offline (1.5 GHz, pixel) profile: bilinear
/// interpolation on the (threshold, bitrate) grid. Used to attribute power
/// to configurations that were never measured.
class ProfilePowerTable {
public:
    explicit ProfilePowerTable(const std::vector<ProfileRecord>& records);
    double power_at(double threshold, double bitrate_kbps) const;

private:
    std::vector<double> taus_;
    std::vector<double> bitrates_;
    std::vector<double> grid_;  // row-major [tau][bitrate]
};

/// Window seeded with the lowest-power Pareto-optimal profile records
/// (cheapest entries inserted last, so they are evicted last). Round 0.
SlidingWindow seed_window(const std::vector<ProfileRecord>& profile, int capacity);

/// Explore-candidate assembly: up to n_manual window configurations on the
/// window's Pareto front meeting the accuracy target (lowest power first),
/// topped up with the lowest-power target-meeting entries, then with the
/// highest-accuracy ones; plus n_mbo greedy EHVI suggestions over the grid.
/// Duplicates collapse to their first occurrence.
std::vector<Configuration> assemble_candidates(const SlidingWindow& window, double target,
                                               int n_manual, int n_mbo,
                                               const GpSurrogate& model_accuracy,
                                               const GpSurrogate& model_power,
                                               const std::vector<Configuration>& grid);

/// Reference point for acquisition: zero accuracy, a factor above the
/// highest power seen in the window.
ObjectivePoint acquisition_reference(const SlidingWindow& window);

/// Minimum-power entry of the current round meeting the target (ties: lower
/// threshold, then lower bitrate); falls back to the round's highest-accuracy
/// entry when nothing meets the target. Throws without current-round entries.
Configuration select_optimal(const SlidingWindow& window, double target, int current_round);

}  // namespace ecolens
