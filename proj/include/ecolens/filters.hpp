#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ecolens/core.hpp"

namespace ecolens {

/// 8-bit grayscale frame, row-major.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool same_shape(const Frame& o) const { return width == o.width && height == o.height; }
};

struct FilterDecision {
    int frame_index = 0;
    double feature_value = 0.0;
    bool kept = false;
};

/// Per-pixel intensity change (in 0..255 counts) above which a pixel counts
/// as changed for the area feature, and the normalized gradient level above
/// which a pixel counts as an edge. Both are tunable from the CLI.
struct FilterOptions {
    int area_change_threshold = 25;
    double edge_binarize_level = 0.125;
};

/// Mean absolute per-pixel difference, normalized to [0, 1].
double pixel_diff(const Frame& prev, const Frame& curr);

/// Fraction of pixels whose absolute difference exceeds the change threshold.
double area_diff(const Frame& prev, const Frame& curr, int change_threshold = 25);

/// Hamming distance of the two frames' binary Sobel edge maps over pixel
/// count. Gradient magnitude is (|Gx|+|Gy|)/(16*255); border pixels are
/// never edges. Frames must be at least 3x3.
double edge_diff(const Frame& prev, const Frame& curr, double binarize_level = 0.125);

double feature_diff(FilterFeature feature, const Frame& prev, const Frame& curr,
                    const FilterOptions& opts = {});

/// Frame 0 is always kept with feature value 0; frame i is kept iff the
/// feature between frames i-1 and i is >= threshold.
std::vector<FilterDecision> filter_sequence(const std::vector<Frame>& frames,
                                            FilterFeature feature, double threshold,
                                            const FilterOptions& opts = {});

// Binary PGM ("P5", maxval 255) I/O.
Frame load_pgm(const std::filesystem::path& path);
void save_pgm(const Frame& frame, const std::filesystem::path& path);

/// All *.pgm files in a directory, lexicographic name order.
std::vector<Frame> load_frame_dir(const std::filesystem::path& dir);

}  // namespace ecolens
