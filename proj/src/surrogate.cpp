#include "ecolens/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ecolens {

namespace {

constexpr double kSdFloor = 1e-12;

double se_kernel(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                 const GpHyperparameters& hp) {
    const double dt = (a.x() - b.x()) / hp.lengthscale_tau;
    const double db = (a.y() - b.y()) / hp.lengthscale_bitrate;
    return hp.signal_variance * std::exp(-0.5 * (dt * dt + db * db));
}

Eigen::MatrixXd kernel_matrix(const Eigen::Matrix<double, Eigen::Dynamic, 2>& X,
                              const GpHyperparameters& hp) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
            K(i, j) = K(j, i) = se_kernel(X.row(i), X.row(j), hp);
    return K;
}

}  // namespace

Eigen::Vector2d normalize(const Configuration& config) {
    constexpr double eps = 1e-12;
    if (config.threshold < -eps || config.threshold > 0.10 + eps)
        throw std::invalid_argument("normalize: threshold outside [0, 0.10]");
    if (config.bitrate_kbps < 100 || config.bitrate_kbps > 3000)
        throw std::invalid_argument("normalize: bitrate outside [100, 3000]");
    return {config.threshold / 0.10, (config.bitrate_kbps - 100.0) / 2900.0};
}

double gp_log_marginal_likelihood(const Eigen::Matrix<double, Eigen::Dynamic, 2>& inputs,
                                  const Eigen::VectorXd& targets,
                                  const GpHyperparameters& hp) {
    const Eigen::Index n = inputs.rows();
    Eigen::MatrixXd K = kernel_matrix(inputs, hp);
    K.diagonal().array() += hp.noise_variance + kGpJitter;
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("gp: kernel matrix not positive definite");
    const Eigen::VectorXd alpha = llt.solve(targets);
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(llt.matrixL()(i, i));
    log_det *= 2.0;
    return -0.5 * targets.dot(alpha) - 0.5 * log_det -
           0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

void GpSurrogate::factorize() {
    Eigen::MatrixXd K = kernel_matrix(inputs_, hp_);
    K.diagonal() += noise_diag_;
    K.diagonal().array() += kGpJitter;
    llt_.compute(K);
    if (llt_.info() != Eigen::Success)
        throw std::runtime_error("gp: kernel matrix not positive definite");
    alpha_ = llt_.solve(targets_std_);
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < inputs_.rows(); ++i) log_det += std::log(llt_.matrixL()(i, i));
    lml_ = -0.5 * targets_std_.dot(alpha_) - log_det -
           0.5 * static_cast<double>(inputs_.rows()) * std::log(2.0 * std::numbers::pi);
}

GpSurrogate GpSurrogate::fit(const std::vector<Observation>& observations, Objective objective) {
    if (observations.size() < 2)
        throw std::invalid_argument("gp fit: need at least 2 observations");

    std::vector<Observation> sorted = observations;
    std::sort(sorted.begin(), sorted.end(), [](const Observation& a, const Observation& b) {
        return std::tie(a.config.threshold, a.config.bitrate_kbps, a.config.cpu_ghz,
                        a.config.filter) < std::tie(b.config.threshold, b.config.bitrate_kbps,
                                                    b.config.cpu_ghz, b.config.filter);
    });

    GpSurrogate gp;
    const Eigen::Index n = static_cast<Eigen::Index>(sorted.size());
    gp.inputs_.resize(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        gp.inputs_.row(i) = normalize(sorted[i].config).transpose();
        y(i) = objective == Objective::Accuracy ? sorted[i].point.accuracy
                                                : sorted[i].point.power_w;
    }
    gp.y_mean_ = y.mean();
    const double var = (y.array() - gp.y_mean_).square().sum() / static_cast<double>(n);
    gp.y_sd_ = std::max(std::sqrt(var), kSdFloor);
    gp.targets_std_ = (y.array() - gp.y_mean_) / gp.y_sd_;

    // exhaustive grid, ties toward larger lengthscales then larger noise
    double best = -std::numeric_limits<double>::infinity();
    GpHyperparameters best_hp;
    for (double lt : kGpLengthscaleGrid) {
        for (double lb : kGpLengthscaleGrid) {
            for (double nv : kGpNoiseGrid) {
                const GpHyperparameters hp{lt, lb, 1.0, nv};
                const double lml = gp_log_marginal_likelihood(gp.inputs_, gp.targets_std_, hp);
                if (lml >= best) {
                    best = lml;
                    best_hp = hp;
                }
            }
        }
    }
    gp.hp_ = best_hp;
    gp.noise_diag_ = Eigen::VectorXd::Constant(n, best_hp.noise_variance);
    gp.factorize();
    return gp;
}

GpSurrogate GpSurrogate::fit_with(const std::vector<Eigen::Vector2d>& inputs,
                                  const std::vector<double>& targets,
                                  const GpHyperparameters& hp) {
    if (inputs.size() != targets.size() || inputs.size() < 2)
        throw std::invalid_argument("gp fit_with: need matching inputs/targets, at least 2");
    GpSurrogate gp;
    const Eigen::Index n = static_cast<Eigen::Index>(inputs.size());
    gp.inputs_.resize(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        gp.inputs_.row(i) = inputs[i].transpose();
        y(i) = targets[i];
    }
    gp.y_mean_ = y.mean();
    const double var = (y.array() - gp.y_mean_).square().sum() / static_cast<double>(n);
    gp.y_sd_ = std::max(std::sqrt(var), kSdFloor);
    gp.targets_std_ = (y.array() - gp.y_mean_) / gp.y_sd_;
    gp.hp_ = hp;
    gp.noise_diag_ = Eigen::VectorXd::Constant(n, hp.noise_variance);
    gp.factorize();
    return gp;
}

GpPrediction GpSurrogate::predict(const Eigen::Vector2d& x) const {
    const Eigen::Index n = inputs_.rows();
    Eigen::VectorXd k_star(n);
    for (Eigen::Index i = 0; i < n; ++i) k_star(i) = se_kernel(inputs_.row(i), x, hp_);
    const double mean_std = k_star.dot(alpha_);
    const Eigen::VectorXd v = llt_.solve(k_star);
    const double var_std = std::max(hp_.signal_variance - k_star.dot(v), 0.0);
    return {y_mean_ + y_sd_ * mean_std, y_sd_ * y_sd_ * var_std};
}

GpSurrogate GpSurrogate::with_pseudo_observation(const Eigen::Vector2d& x, double y,
                                                 double noise_variance) const {
    GpSurrogate gp = *this;
    const Eigen::Index n = inputs_.rows();
    gp.inputs_.conservativeResize(n + 1, 2);
    gp.inputs_.row(n) = x.transpose();
    gp.targets_std_.conservativeResize(n + 1);
    gp.targets_std_(n) = (y - y_mean_) / y_sd_;
    gp.noise_diag_.conservativeResize(n + 1);
    gp.noise_diag_(n) = noise_variance;
    gp.factorize();
    return gp;
}

}  // namespace ecolens
