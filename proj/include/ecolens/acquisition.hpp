#pragma once

#include <vector>

#include "ecolens/core.hpp"
#include "ecolens/surrogate.hpp"

namespace ecolens {

inline constexpr double kBelieverNoiseVariance = 1e-9;

/// Everything EHVI needs: the incumbent front, the reference point it is
/// measured against, and the per-objective surrogates. Front points must
/// strictly dominate the reference.
struct AcquisitionContext {
    std::vector<ObjectivePoint> front;
    ObjectivePoint ref;
    const GpSurrogate* model_accuracy = nullptr;
    const GpSurrogate* model_power = nullptr;
};

/// Exact bi-objective expected hypervolume improvement of the Gaussian
/// prediction (independent accuracy/power marginals) at normalized input x,
/// via cell decomposition over the front. Zero predictive variance reduces
/// to the plain hypervolume improvement of the predicted means.
double ehvi(const AcquisitionContext& ctx, const Eigen::Vector2d& x);

/// Same integral for explicit Gaussian marginals; the building block ehvi()
/// wraps and the one tests exercise directly.
double ehvi_gaussian(const std::vector<ObjectivePoint>& front, const ObjectivePoint& ref,
                     double accuracy_mean, double accuracy_sd, double power_mean,
                     double power_sd);

/// Greedy Kriging-believer batch: repeatedly take the EHVI argmax over the
/// remaining candidates (ties: lower threshold, then lower bitrate),
/// hallucinate it at its posterior means, refresh the working front, and
/// continue without replacement.
std::vector<Configuration> suggest_batch(const AcquisitionContext& ctx, int n,
                                         const std::vector<Configuration>& candidates);

}  // namespace ecolens
