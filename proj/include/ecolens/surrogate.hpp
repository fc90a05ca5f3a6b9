#pragma once

#include <Eigen/Dense>

#include <vector>

#include "ecolens/core.hpp"

namespace ecolens {

enum class Objective { Accuracy, Power };

/// Map an online-stage configuration into the unit square:
/// threshold in [0, 0.10] and bitrate in [100, 3000]. Throws outside the box.
Eigen::Vector2d normalize(const Configuration& config);

struct GpHyperparameters {
    double lengthscale_tau = 0.5;
    double lengthscale_bitrate = 0.5;
    double signal_variance = 1.0;
    double noise_variance = 1e-2;
};

struct GpPrediction {
    double mean = 0.0;
    double variance = 0.0;  // in original output units, clamped at zero
};

inline constexpr double kGpLengthscaleGrid[] = {0.1, 0.2, 0.5, 1.0};
inline constexpr double kGpNoiseGrid[] = {1e-4, 1e-2, 1e-1};
inline constexpr double kGpJitter = 1e-8;

/// Squared-exponential GP over normalized (threshold, bitrate) inputs with
/// standardized targets. Immutable once built; cheap to copy at window sizes.
class GpSurrogate {
public:
    /// Standardizes targets and picks hyperparameters by exhaustive log
    /// marginal likelihood over the lengthscale/noise grids (sigma_f^2 fixed
    /// at 1, absorbed by standardization). Ties resolve toward larger
    /// lengthscales, then larger noise. Observations are sorted by
    /// configuration first, so the fit is order-independent.
    static GpSurrogate fit(const std::vector<Observation>& observations, Objective objective);

    /// Build directly from normalized inputs and raw targets with explicit
    /// hyperparameters (no grid search).
    static GpSurrogate fit_with(const std::vector<Eigen::Vector2d>& inputs,
                                const std::vector<double>& targets,
                                const GpHyperparameters& hp);

    GpPrediction predict(const Eigen::Vector2d& x) const;

    /// Kriging-believer update: a copy of this model with (x, y) appended as
    /// a pseudo-observation carrying its own tiny noise variance.
    /// Hyperparameters and standardization constants are kept.
    GpSurrogate with_pseudo_observation(const Eigen::Vector2d& x, double y,
                                        double noise_variance = 1e-9) const;

    const GpHyperparameters& hyperparameters() const { return hp_; }
    double log_marginal_likelihood() const { return lml_; }
    double target_mean() const { return y_mean_; }
    double target_sd() const { return y_sd_; }
    Eigen::Index size() const { return inputs_.rows(); }

private:
    GpSurrogate() = default;
    void factorize();

    Eigen::Matrix<double, Eigen::Dynamic, 2> inputs_;
    Eigen::VectorXd targets_std_;
    Eigen::VectorXd noise_diag_;  // per-point noise variance (standardized units)
    GpHyperparameters hp_;
    double y_mean_ = 0.0;
    double y_sd_ = 1.0;
    double lml_ = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::VectorXd alpha_;
};

/// Log marginal likelihood of standardized targets under an SE kernel; the
/// same quantity the grid search maximizes, exposed for direct evaluation.
double gp_log_marginal_likelihood(const Eigen::Matrix<double, Eigen::Dynamic, 2>& inputs,
                                  const Eigen::VectorXd& targets,
                                  const GpHyperparameters& hp);

}  // namespace ecolens
