#pragma once

#include <filesystem>
#include <vector>

#include "ecolens/loop.hpp"

namespace ecolens {

/// Two stacked panels (accuracy and power vs simulated time) with dashed
/// vertical markers wherever the configuration switched. Self-contained
/// polyline emission, no plotting dependency.
void write_run_plot(const std::vector<TraceEvent>& trace, double target_accuracy,
                    const std::filesystem::path& path);

}  // namespace ecolens
