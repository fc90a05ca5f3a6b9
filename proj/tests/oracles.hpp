// Independent reference implementations used by the test suites. These stay
// deliberately naive (quadratic scans, direct sums, Monte Carlo) so they do
// not share code with the library paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ecolens/core.hpp"

namespace oracle {

inline bool dominates(const ecolens::ObjectivePoint& p, const ecolens::ObjectivePoint& q) {
    const bool no_worse = p.accuracy >= q.accuracy && p.power_w <= q.power_w;
    const bool better = p.accuracy > q.accuracy || p.power_w < q.power_w;
    return no_worse && better;
}

inline std::vector<ecolens::ObjectivePoint> pareto_front(
    const std::vector<ecolens::ObjectivePoint>& pts) {
    std::vector<ecolens::ObjectivePoint> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        bool dom = false;
        for (std::size_t j = 0; j < pts.size() && !dom; ++j) dom = oracle::dominates(pts[j], pts[i]);
        if (!dom) out.push_back(pts[i]);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.power_w != b.power_w ? a.power_w < b.power_w : a.accuracy < b.accuracy;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Hypervolume by inclusion over a fine accuracy partition: integrate, for
// every maximal accuracy segment, the widest power extent dominated there.
inline double hypervolume_2d(std::vector<ecolens::ObjectivePoint> front,
                             const ecolens::ObjectivePoint& ref) {
    if (front.empty()) return 0.0;
    std::vector<double> cuts{ref.accuracy};
    for (const auto& p : front) cuts.push_back(p.accuracy);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        double best_power = ref.power_w;  // lowest power of a point covering this segment
        for (const auto& p : front)
            if (p.accuracy >= hi) best_power = std::min(best_power, p.power_w);
        if (best_power < ref.power_w) area += (hi - lo) * (ref.power_w - best_power);
    }
    return area;
}

inline std::vector<ecolens::ObjectivePoint> random_points(std::mt19937_64& rng, int max_n) {
    std::uniform_int_distribution<int> nd(0, max_n);
    std::uniform_real_distribution<double> acc(0.0, 1.0), pow_w(0.5, 10.0);
    std::vector<ecolens::ObjectivePoint> pts(nd(rng));
    for (auto& p : pts) p = {acc(rng), pow_w(rng)};
    return pts;
}

}  // namespace oracle
