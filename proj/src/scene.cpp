#include "ecolens/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace ecolens {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double saturation(double bitrate, const RegimeAccuracyParams& r) {
    const double num = 1.0 - r.sat_c * std::exp(-bitrate / r.sat_b0);
    const double den = 1.0 - r.sat_c * std::exp(-kMaxBitrateKbps / r.sat_b0);
    return num / den;
}

double threshold_penalty(double tau, const RegimeAccuracyParams& r) {
    return sigmoid(r.dec_k * (r.dec_tau0 - tau)) / sigmoid(r.dec_k * r.dec_tau0);
}

double regime_accuracy(const Configuration& c, const RegimeAccuracyParams& r) {
    return saturation(c.bitrate_kbps, r) * threshold_penalty(c.threshold, r);
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto hi = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(hi - xs.begin());
    const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

std::size_t cpu_index(const PowerParams& p, double cpu_ghz) {
    for (std::size_t i = 0; i < p.cpu_ghz.size(); ++i)
        if (std::abs(p.cpu_ghz[i] - cpu_ghz) < 1e-9) return i;
    throw std::invalid_argument("cpu frequency not in scene model: " + std::to_string(cpu_ghz));
}

double bitrate_factor(const PowerParams& p, double bitrate) {
    return p.bitrate_floor +
           (1.0 - p.bitrate_floor) * std::pow(bitrate / kMaxBitrateKbps, p.bitrate_exp);
}

}  // namespace

double SceneModel::drift_mix(double t_s) const {
    if (drift_schedule.empty()) return 0.0;
    if (t_s <= drift_schedule.front().first)
        return std::clamp(drift_schedule.front().second, 0.0, 1.0);
    for (std::size_t i = 1; i < drift_schedule.size(); ++i) {
        const auto& [t1, p1] = drift_schedule[i];
        if (t_s <= t1) {
            const auto& [t0, p0] = drift_schedule[i - 1];
            // coincident breakpoints act as a step; the later value wins
            const double w = t1 > t0 ? (t_s - t0) / (t1 - t0) : 1.0;
            return std::clamp(p0 + w * (p1 - p0), 0.0, 1.0);
        }
    }
    return std::clamp(drift_schedule.back().second, 0.0, 1.0);
}

double true_accuracy(const SceneModel& model, const Configuration& config, double p) {
    const double a_day = regime_accuracy(config, model.day);
    const double a_night = regime_accuracy(config, model.night);
    return a_day + p * (a_night - a_day);
}

double true_power(const SceneModel& model, const Configuration& config, double p) {
    const PowerParams& pw = model.power;
    const std::size_t ci = cpu_index(pw, config.cpu_ghz);
    const double pass_day = interp(pw.pass_tau, pw.pass_day, config.threshold);
    const double pass_night = interp(pw.pass_tau, pw.pass_night, config.threshold);
    const double pass = pass_day + p * (pass_night - pass_day);
    return pw.base_w[ci] + pw.filter_w[static_cast<int>(config.filter)] * pw.filter_cpu_scale[ci] +
           pw.encode_w * pw.encode_cpu_scale[ci] * pass * bitrate_factor(pw, config.bitrate_kbps);
}

ObjectivePoint observe(const SceneModel& model, const Configuration& config, double t_s,
                       std::mt19937_64& rng) {
    if (t_s < 0.0) throw std::invalid_argument("observe: negative time");
    const double p = model.drift_mix(t_s);
    std::normal_distribution<double> acc_noise(0.0, model.noise_sd_accuracy);
    std::normal_distribution<double> pow_noise(0.0, model.noise_sd_power);
    double acc = true_accuracy(model, config, p);
    double watts = true_power(model, config, p);
    if (model.noise_sd_accuracy > 0.0) acc += acc_noise(rng);
    if (model.noise_sd_power > 0.0) watts += pow_noise(rng);
    return {std::clamp(acc, 1e-3, 1.0), std::max(watts, 1e-3)};
}

std::vector<ProfileRecord> offline_profile(const SceneModel& model,
                                           const std::vector<Configuration>& grid, double p) {
    std::vector<ProfileRecord> records;
    records.reserve(grid.size());
    for (const auto& c : grid)
        records.push_back({c, true_accuracy(model, c, p), true_power(model, c, p), p});
    return records;
}

SceneModel load_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scene file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }

    SceneModel m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.noise_sd_accuracy = j.at("noise").at("accuracy_sd").get<double>();
    m.noise_sd_power = j.at("noise").at("power_sd").get<double>();
    for (const auto& bp : j.at("drift_schedule")) {
        const double t = bp.at(0).get<double>();
        const double p = bp.at(1).get<double>();
        if (p < 0.0 || p > 1.0) throw std::runtime_error("drift mix outside [0,1]");
        if (!m.drift_schedule.empty() && t < m.drift_schedule.back().first)
            throw std::runtime_error("drift schedule times must be non-decreasing");
        m.drift_schedule.emplace_back(t, p);
    }

    auto read_regime = [&j](const char* name) {
        const auto& r = j.at("accuracy").at(name);
        return RegimeAccuracyParams{r.at("sat_c").get<double>(), r.at("sat_b0").get<double>(),
                                    r.at("dec_k").get<double>(), r.at("dec_tau0").get<double>()};
    };
    m.day = read_regime("day");
    m.night = read_regime("night");

    const auto& pj = j.at("power");
    PowerParams& pw = m.power;
    pw.cpu_ghz = pj.at("cpu_ghz").get<std::vector<double>>();
    pw.base_w = pj.at("base_w").get<std::vector<double>>();
    pw.filter_w[0] = pj.at("filter_w").at("pixel").get<double>();
    pw.filter_w[1] = pj.at("filter_w").at("area").get<double>();
    pw.filter_w[2] = pj.at("filter_w").at("edge").get<double>();
    pw.filter_cpu_scale = pj.at("filter_cpu_scale").get<std::vector<double>>();
    pw.encode_w = pj.at("encode_w").get<double>();
    pw.encode_cpu_scale = pj.at("encode_cpu_scale").get<std::vector<double>>();
    pw.bitrate_floor = pj.at("bitrate_floor").get<double>();
    pw.bitrate_exp = pj.at("bitrate_exp").get<double>();
    pw.pass_tau = pj.at("pass_tau").get<std::vector<double>>();
    pw.pass_day = pj.at("pass_day").get<std::vector<double>>();
    pw.pass_night = pj.at("pass_night").get<std::vector<double>>();

    const std::size_t n = pw.cpu_ghz.size();
    if (n == 0 || pw.base_w.size() != n || pw.filter_cpu_scale.size() != n ||
        pw.encode_cpu_scale.size() != n)
        throw std::runtime_error("power cpu tables must have matching sizes");
    if (pw.pass_tau.size() < 2 || pw.pass_day.size() != pw.pass_tau.size() ||
        pw.pass_night.size() != pw.pass_tau.size())
        throw std::runtime_error("pass-rate tables must have matching sizes");
    for (double v : pw.base_w)
        if (v <= 0.0) throw std::runtime_error("base power must be positive");
    for (double v : pw.filter_w)
        if (v <= 0.0) throw std::runtime_error("filter power must be positive");
    if (pw.encode_w <= 0.0) throw std::runtime_error("encode power must be positive");
    for (std::size_t i = 1; i < pw.pass_tau.size(); ++i) {
        if (pw.pass_day[i] > pw.pass_day[i - 1] || pw.pass_night[i] > pw.pass_night[i - 1])
            throw std::runtime_error("pass-rate curves must be non-increasing");
    }
    return m;
}

void save_profile_csv(const std::vector<ProfileRecord>& records,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "cpu_ghz,filter,threshold,bitrate_kbps,accuracy,power_w\n";
    char line[160];
    for (const auto& r : records) {
        std::snprintf(line, sizeof line, "%.1f,%s,%.4f,%d,%.6f,%.6f\n", r.config.cpu_ghz,
                      to_string(r.config.filter), r.config.threshold, r.config.bitrate_kbps,
                      r.accuracy, r.power_w);
        out << line;
    }
}

std::vector<ProfileRecord> load_profile_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("cpu_ghz,", 0) != 0)
        throw std::runtime_error(path.string() + ": missing profile CSV header");
    std::vector<ProfileRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        char filter[16];
        ProfileRecord r;
        if (std::sscanf(line.c_str(), "%lf,%15[^,],%lf,%d,%lf,%lf", &r.config.cpu_ghz, filter,
                        &r.config.threshold, &r.config.bitrate_kbps, &r.accuracy,
                        &r.power_w) != 6)
            throw std::runtime_error(path.string() + ": bad CSV row: " + line);
        r.config.filter = filter_feature_from_string(filter);
        records.push_back(r);
    }
    return records;
}

}  // namespace ecolens
