#include "ecolens/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ecolens {

namespace {

double normal_cdf(double w) { return 0.5 * std::erfc(-w / std::numbers::sqrt2); }

double normal_pdf(double w) {
    return std::exp(-0.5 * w * w) / std::sqrt(2.0 * std::numbers::pi);
}

// E[(c - Y)^+] for Y ~ N(mu, sd^2); the sd = 0 limit is the plain hinge.
double expected_shortfall(double c, double mu, double sd) {
    if (sd <= 0.0) return std::max(c - mu, 0.0);
    const double w = (c - mu) / sd;
    return (c - mu) * normal_cdf(w) + sd * normal_pdf(w);
}

}  // namespace

double ehvi_gaussian(const std::vector<ObjectivePoint>& front_in, const ObjectivePoint& ref,
                     double accuracy_mean, double accuracy_sd, double power_mean,
                     double power_sd) {
    // reduce to the non-dominated set; EHVI only sees the staircase
    const std::vector<ObjectivePoint> front = pareto_front(front_in);
    for (const auto& p : front)
        if (!(p.accuracy > ref.accuracy && p.power_w < ref.power_w))
            throw std::invalid_argument("ehvi: front point does not strictly dominate ref");

    // Work in minimization coordinates (f1 = -accuracy, f2 = power). The
    // integral of P(Y1 <= z1) P(Y2 <= z2) over the non-dominated part of the
    // box z <= ref splits into vertical strips between consecutive front
    // points; each strip contributes a product of expected shortfalls.
    const double mu1 = -accuracy_mean, sd1 = accuracy_sd;
    const double mu2 = power_mean, sd2 = power_sd;
    const double r1 = -ref.accuracy, r2 = ref.power_w;

    // strips run over ascending f1, i.e. descending accuracy
    std::vector<ObjectivePoint> sorted = front;
    std::sort(sorted.begin(), sorted.end(),
              [](const ObjectivePoint& a, const ObjectivePoint& b) {
                  return a.accuracy > b.accuracy;
              });

    const std::size_t n = sorted.size();
    double total = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        const double upper1 = i < n ? -sorted[i].accuracy : r1;
        const double strip1 =
            expected_shortfall(upper1, mu1, sd1) -
            (i == 0 ? 0.0 : expected_shortfall(-sorted[i - 1].accuracy, mu1, sd1));
        const double c2 = i == 0 ? r2 : sorted[i - 1].power_w;
        total += strip1 * expected_shortfall(c2, mu2, sd2);
    }
    return std::max(total, 0.0);
}

double ehvi(const AcquisitionContext& ctx, const Eigen::Vector2d& x) {
    if (!ctx.model_accuracy || !ctx.model_power)
        throw std::invalid_argument("ehvi: context is missing surrogate models");
    const auto acc = ctx.model_accuracy->predict(x);
    const auto pow_w = ctx.model_power->predict(x);
    return ehvi_gaussian(ctx.front, ctx.ref, acc.mean, std::sqrt(acc.variance), pow_w.mean,
                         std::sqrt(pow_w.variance));
}

std::vector<Configuration> suggest_batch(const AcquisitionContext& ctx, int n,
                                         const std::vector<Configuration>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("suggest_batch: no candidates");
    if (n <= 0 || static_cast<std::size_t>(n) > candidates.size())
        throw std::invalid_argument("suggest_batch: n outside [1, |candidates|]");

    GpSurrogate acc_model = *ctx.model_accuracy;
    GpSurrogate pow_model = *ctx.model_power;
    std::vector<ObjectivePoint> front = ctx.front;
    std::vector<Configuration> remaining = candidates;
    std::vector<Configuration> picks;
    picks.reserve(n);

    for (int step = 0; step < n; ++step) {
        AcquisitionContext working{front, ctx.ref, &acc_model, &pow_model};
        std::size_t best_idx = 0;
        double best_value = -1.0;
        for (std::size_t i = 0; i < remaining.size(); ++i) {
            const double v = ehvi(working, normalize(remaining[i]));
            const bool wins =
                v > best_value ||
                (v == best_value &&
                 std::tie(remaining[i].threshold, remaining[i].bitrate_kbps) <
                     std::tie(remaining[best_idx].threshold, remaining[best_idx].bitrate_kbps));
            if (wins) {
                best_value = v;
                best_idx = i;
            }
        }

        const Configuration picked = remaining[best_idx];
        const Eigen::Vector2d x = normalize(picked);
        const double acc_mean = acc_model.predict(x).mean;
        const double pow_mean = pow_model.predict(x).mean;
        acc_model = acc_model.with_pseudo_observation(x, acc_mean, kBelieverNoiseVariance);
        pow_model = pow_model.with_pseudo_observation(x, pow_mean, kBelieverNoiseVariance);
        // hallucinated points outside the reference box cannot carry volume
        if (acc_mean > ctx.ref.accuracy && pow_mean < ctx.ref.power_w) {
            front.push_back({acc_mean, pow_mean});
            front = pareto_front(front);
        }
        picks.push_back(picked);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_idx));
    }
    return picks;
}

}  // namespace ecolens
