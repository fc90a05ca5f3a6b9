#include "ecolens/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace ecolens {

const char* to_string(FilterFeature f) {
    switch (f) {
        case FilterFeature::Pixel: return "pixel";
        case FilterFeature::Area: return "area";
        case FilterFeature::Edge: return "edge";
    }
    return "?";
}

FilterFeature filter_feature_from_string(const std::string& name) {
    if (name == "pixel") return FilterFeature::Pixel;
    if (name == "area") return FilterFeature::Area;
    if (name == "edge") return FilterFeature::Edge;
    throw std::invalid_argument("unknown filter feature: " + name);
}

bool dominates(const ObjectivePoint& p, const ObjectivePoint& q) {
    return p.accuracy >= q.accuracy && p.power_w <= q.power_w &&
           (p.accuracy > q.accuracy || p.power_w < q.power_w);
}

std::vector<ObjectivePoint> pareto_front(const std::vector<ObjectivePoint>& points) {
    std::vector<ObjectivePoint> front;
    for (const auto& p : points) {
        bool dominated = false;
        for (const auto& q : points) {
            if (dominates(q, p)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.push_back(p);
    }
    std::sort(front.begin(), front.end(), [](const ObjectivePoint& a, const ObjectivePoint& b) {
        if (a.power_w != b.power_w) return a.power_w < b.power_w;
        return a.accuracy < b.accuracy;
    });
    front.erase(std::unique(front.begin(), front.end()), front.end());
    return front;
}

double hypervolume_2d(const std::vector<ObjectivePoint>& front, const ObjectivePoint& ref) {
    for (const auto& p : front) {
        if (!(p.accuracy > ref.accuracy && p.power_w < ref.power_w)) {
            throw std::invalid_argument("hypervolume_2d: front point does not strictly dominate ref");
        }
    }
    std::vector<ObjectivePoint> sorted = front;
    std::sort(sorted.begin(), sorted.end(),
              [](const ObjectivePoint& a, const ObjectivePoint& b) {
                  if (a.power_w != b.power_w) return a.power_w < b.power_w;
                  return a.accuracy < b.accuracy;
              });
    // Sweep by ascending power; each point adds the rectangle above the best
    // accuracy seen so far. Dominated points add nothing.
    double area = 0.0;
    double acc_so_far = ref.accuracy;
    for (const auto& p : sorted) {
        if (p.accuracy > acc_so_far) {
            area += (p.accuracy - acc_so_far) * (ref.power_w - p.power_w);
            acc_so_far = p.accuracy;
        }
    }
    return area;
}

double threshold_step(int i) { return static_cast<double>(i) / 100.0; }

std::vector<Configuration> offline_grid() {
    std::vector<Configuration> grid;
    grid.reserve(4 * 3 * kThresholdSteps * std::size(kBitratesKbps));
    for (double cpu : kCpuFrequencies)
        for (FilterFeature f : kFilterFeatures)
            for (int i = 0; i < kThresholdSteps; ++i)
                for (int b : kBitratesKbps)
                    grid.push_back({cpu, f, threshold_step(i), b});
    return grid;
}

std::vector<Configuration> online_grid() {
    std::vector<Configuration> grid;
    grid.reserve(kThresholdSteps * std::size(kBitratesKbps));
    for (int i = 0; i < kThresholdSteps; ++i)
        for (int b : kBitratesKbps)
            grid.push_back({1.5, FilterFeature::Pixel, threshold_step(i), b});
    return grid;
}

}  // namespace ecolens
