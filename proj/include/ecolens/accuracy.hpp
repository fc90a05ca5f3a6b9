#pragma once

#include <filesystem>
#include <map>
#include <vector>

namespace ecolens {

struct BoundingBox {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;  // x1 < x2, y1 < y2

    double area() const { return (x2 - x1) * (y2 - y1); }
    friend auto operator<=>(const BoundingBox&, const BoundingBox&) = default;
};

/// Detections per frame index. Indices are positions in the original
/// ground-truth video; lists may be empty.
struct DetectionTrack {
    std::map<int, std::vector<BoundingBox>> frames;
};

/// Intersection over union; 0 for disjoint boxes.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Greedy class-agnostic matching: repeatedly pair the globally best-IoU
/// (gt, pred) boxes, sum the IoUs, normalize by the ground-truth count.
/// Unmatched ground-truth boxes score zero; empty ground truth scores 1.
double frame_score(const std::vector<BoundingBox>& gt, const std::vector<BoundingBox>& pred);

/// Mean frame score over [0, horizon) where each index is scored against the
/// most recent kept frame at or before it. `kept` must contain frame 0.
double temporal_accuracy(const DetectionTrack& gt, const DetectionTrack& kept, int horizon);

// Detection files are JSON Lines: {"frame": n, "boxes": [[x1,y1,x2,y2], ...]}
// with strictly increasing frame indices.
DetectionTrack load_detections(const std::filesystem::path& path);
void save_detections(const DetectionTrack& track, const std::filesystem::path& path);

}  // namespace ecolens
