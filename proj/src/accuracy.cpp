#include "ecolens/accuracy.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ecolens {

double iou(const BoundingBox& a, const BoundingBox& b) {
    const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
    const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
    const double inter = ix * iy;
    if (inter <= 0.0) return 0.0;
    return inter / (a.area() + b.area() - inter);
}

double frame_score(const std::vector<BoundingBox>& gt, const std::vector<BoundingBox>& pred) {
    if (gt.empty()) return 1.0;  // nothing to miss

    std::vector<bool> gt_used(gt.size(), false), pred_used(pred.size(), false);
    double total = 0.0;
    for (std::size_t round = 0; round < std::min(gt.size(), pred.size()); ++round) {
        double best = -1.0;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < gt.size(); ++i) {
            if (gt_used[i]) continue;
            for (std::size_t j = 0; j < pred.size(); ++j) {
                if (pred_used[j]) continue;
                const double v = iou(gt[i], pred[j]);
                // deterministic tie-break on box coordinates
                if (v > best ||
                    (v == best && std::tie(gt[i], pred[j]) < std::tie(gt[bi], pred[bj]))) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best <= 0.0) break;  // remaining pairs are disjoint; they all score 0
        gt_used[bi] = true;
        pred_used[bj] = true;
        total += best;
    }
    return total / static_cast<double>(gt.size());
}

double temporal_accuracy(const DetectionTrack& gt, const DetectionTrack& kept, int horizon) {
    if (horizon <= 0) throw std::invalid_argument("temporal_accuracy: horizon must be positive");
    if (!kept.frames.count(0))
        throw std::invalid_argument("temporal_accuracy: kept track must contain frame 0");

    static const std::vector<BoundingBox> kEmpty;
    auto boxes_at = [](const DetectionTrack& t, int i) -> const std::vector<BoundingBox>& {
        auto it = t.frames.find(i);
        return it == t.frames.end() ? kEmpty : it->second;
    };

    double total = 0.0;
    auto carried = kept.frames.begin();  // most recent kept frame <= i
    for (int i = 0; i < horizon; ++i) {
        auto next = std::next(carried);
        while (next != kept.frames.end() && next->first <= i) carried = next++;
        total += frame_score(boxes_at(gt, i), carried->second);
    }
    return total / horizon;
}

DetectionTrack load_detections(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    DetectionTrack track;
    std::string line;
    int last = -1, lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        const int frame = j.at("frame").get<int>();
        if (frame <= last)
            throw std::runtime_error(path.string() + ": frame indices must strictly increase");
        last = frame;
        std::vector<BoundingBox> boxes;
        for (const auto& b : j.at("boxes")) {
            if (!b.is_array() || b.size() != 4)
                throw std::runtime_error(path.string() + ": box must be [x1,y1,x2,y2]");
            BoundingBox box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                            b[3].get<double>()};
            if (box.x1 >= box.x2 || box.y1 >= box.y2)
                throw std::runtime_error(path.string() + ": degenerate box");
            boxes.push_back(box);
        }
        track.frames[frame] = std::move(boxes);
    }
    return track;
}

void save_detections(const DetectionTrack& track, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& [frame, boxes] : track.frames) {
        nlohmann::json j;
        j["frame"] = frame;
        auto arr = nlohmann::json::array();
        for (const auto& b : boxes) arr.push_back({b.x1, b.y1, b.x2, b.y2});
        j["boxes"] = arr;
        out << j.dump() << "\n";
    }
}

}  // namespace ecolens
