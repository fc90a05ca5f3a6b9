#include "ecolens/filters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace ecolens {

namespace {

void require_same_shape(const Frame& a, const Frame& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("frame dimension mismatch");
    if (a.width <= 0 || a.height <= 0 ||
        a.pixels.size() != static_cast<std::size_t>(a.width) * a.height ||
        b.pixels.size() != static_cast<std::size_t>(b.width) * b.height) {
        throw std::invalid_argument("malformed frame");
    }
}

std::vector<std::uint8_t> sobel_edge_map(const Frame& f, double binarize_level) {
    std::vector<std::uint8_t> edges(f.pixels.size(), 0);
    const double denom = 16.0 * 255.0;
    for (int y = 1; y + 1 < f.height; ++y) {
        for (int x = 1; x + 1 < f.width; ++x) {
            const int gx = -f.at(x - 1, y - 1) + f.at(x + 1, y - 1)
                           - 2 * f.at(x - 1, y) + 2 * f.at(x + 1, y)
                           - f.at(x - 1, y + 1) + f.at(x + 1, y + 1);
            const int gy = -f.at(x - 1, y - 1) - 2 * f.at(x, y - 1) - f.at(x + 1, y - 1)
                           + f.at(x - 1, y + 1) + 2 * f.at(x, y + 1) + f.at(x + 1, y + 1);
            const double mag = (std::abs(gx) + std::abs(gy)) / denom;
            if (mag >= binarize_level) edges[static_cast<std::size_t>(y) * f.width + x] = 1;
        }
    }
    return edges;
}

}  // namespace

double pixel_diff(const Frame& prev, const Frame& curr) {
    require_same_shape(prev, curr);
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < prev.pixels.size(); ++i)
        total += static_cast<std::uint64_t>(std::abs(int(prev.pixels[i]) - int(curr.pixels[i])));
    return static_cast<double>(total) / (255.0 * static_cast<double>(prev.pixels.size()));
}

double area_diff(const Frame& prev, const Frame& curr, int change_threshold) {
    require_same_shape(prev, curr);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < prev.pixels.size(); ++i)
        if (std::abs(int(prev.pixels[i]) - int(curr.pixels[i])) > change_threshold) ++changed;
    return static_cast<double>(changed) / static_cast<double>(prev.pixels.size());
}

double edge_diff(const Frame& prev, const Frame& curr, double binarize_level) {
    require_same_shape(prev, curr);
    if (prev.width < 3 || prev.height < 3)
        throw std::invalid_argument("edge_diff requires frames of at least 3x3");
    const auto ea = sobel_edge_map(prev, binarize_level);
    const auto eb = sobel_edge_map(curr, binarize_level);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < ea.size(); ++i)
        if (ea[i] != eb[i]) ++differing;
    return static_cast<double>(differing) / static_cast<double>(ea.size());
}

double feature_diff(FilterFeature feature, const Frame& prev, const Frame& curr,
                    const FilterOptions& opts) {
    switch (feature) {
        case FilterFeature::Pixel: return pixel_diff(prev, curr);
        case FilterFeature::Area: return area_diff(prev, curr, opts.area_change_threshold);
        case FilterFeature::Edge: return edge_diff(prev, curr, opts.edge_binarize_level);
    }
    throw std::invalid_argument("unknown filter feature");
}

std::vector<FilterDecision> filter_sequence(const std::vector<Frame>& frames,
                                            FilterFeature feature, double threshold,
                                            const FilterOptions& opts) {
    if (frames.empty()) throw std::invalid_argument("filter_sequence: empty frame list");
    std::vector<FilterDecision> decisions;
    decisions.reserve(frames.size());
    decisions.push_back({0, 0.0, true});
    for (std::size_t i = 1; i < frames.size(); ++i) {
        const double v = feature_diff(feature, frames[i - 1], frames[i], opts);
        decisions.push_back({static_cast<int>(i), v, v >= threshold});
    }
    return decisions;
}

Frame load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    auto next_token = [&in, &path]() -> std::string {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') {  // comment to end of line
                while ((c = in.get()) != EOF && c != '\n') {}
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) break;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        if (tok.empty()) throw std::runtime_error("truncated PGM header in " + path.string());
        return tok;
    };

    if (next_token() != "P5") throw std::runtime_error("not a binary PGM: " + path.string());
    Frame f;
    f.width = std::stoi(next_token());
    f.height = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (f.width <= 0 || f.height <= 0 || maxval != 255)
        throw std::runtime_error("unsupported PGM geometry in " + path.string());
    f.pixels.resize(static_cast<std::size_t>(f.width) * f.height);
    in.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.pixels.size()))
        throw std::runtime_error("truncated PGM payload in " + path.string());
    return f;
}

void save_pgm(const Frame& frame, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
}

std::vector<Frame> load_frame_dir(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<Frame> frames;
    frames.reserve(files.size());
    for (const auto& p : files) frames.push_back(load_pgm(p));
    return frames;
}

}  // namespace ecolens
