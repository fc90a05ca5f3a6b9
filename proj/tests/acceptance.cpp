// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "ecolens/accuracy.hpp"
#include "ecolens/commands.hpp"
#include "ecolens/filters.hpp"
#include "ecolens/loop.hpp"
#include "ecolens/protocol.hpp"
#include "ecolens/scene.hpp"
#include "oracles.hpp"

using namespace ecolens;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(int number, const char* name, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool pass = false;
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", number, name,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++g_failures;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const fs::path kSceneFile = ECOLENS_DATA_DIR "/default_scene.json";

double mc_ehvi(const std::vector<ObjectivePoint>& front, const ObjectivePoint& ref,
               double acc_mean, double acc_sd, double pow_mean, double pow_sd, int samples,
               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> na(acc_mean, acc_sd > 0 ? acc_sd : 1e-300);
    std::normal_distribution<double> np(pow_mean, pow_sd > 0 ? pow_sd : 1e-300);
    const double base = oracle::hypervolume_2d(front, ref);
    auto extended = front;
    double total = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double a = acc_sd > 0 ? na(rng) : acc_mean;
        const double p = pow_sd > 0 ? np(rng) : pow_mean;
        if (a <= ref.accuracy || p >= ref.power_w) continue;
        extended.push_back({a, p});
        total += oracle::hypervolume_2d(extended, ref) - base;
        extended.pop_back();
    }
    return total / samples;
}

}  // namespace

#include "ecolens/acquisition.hpp"
#include "ecolens/surrogate.hpp"

int main() {
    criterion(1, "pareto front equals the brute-force non-dominated set", [](std::string& d) {
        const auto start = std::chrono::steady_clock::now();
        std::mt19937_64 rng(1001);
        for (int it = 0; it < 1000; ++it) {
            const auto pts = oracle::random_points(rng, 100);
            if (pareto_front(pts) != oracle::pareto_front(pts)) {
                d = "mismatch at set " + std::to_string(it);
                return false;
            }
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        d = "1000 sets, " + std::to_string(secs) + " s";
        return secs < 5.0;
    });

    criterion(2, "hypervolume worked examples and monotonicity", [](std::string& d) {
        const ObjectivePoint ref{0.0, 10.0};
        if (std::abs(hypervolume_2d({{0.9, 5.0}}, ref) - 4.5) > 1e-12) {
            d = "single-rectangle example off";
            return false;
        }
        if (std::abs(hypervolume_2d({{0.9, 5.0}, {0.8, 4.0}}, ref) - 5.3) > 1e-12) {
            d = "two-point example off";
            return false;
        }
        std::mt19937_64 rng(1002);
        std::uniform_real_distribution<double> acc(0.01, 1.0), pow_w(0.5, 9.5);
        for (int it = 0; it < 500; ++it) {
            std::vector<ObjectivePoint> pts(1 + rng() % 10);
            for (auto& p : pts) p = {acc(rng), pow_w(rng)};
            const double hv = hypervolume_2d(pts, ref);
            std::vector<ObjectivePoint> plus = pts;
            plus.push_back({acc(rng), pow_w(rng)});
            bool dominated = false;
            for (const auto& q : pts) dominated |= dominates(q, plus.back());
            const double hv2 = hypervolume_2d(plus, ref);
            if (hv2 < hv - 1e-12) {
                d = "hypervolume shrank after adding a point";
                return false;
            }
            if (dominated && std::abs(hv2 - hv) > 1e-12) {
                d = "dominated point changed the hypervolume";
                return false;
            }
        }
        return true;
    });

    criterion(3, "exact EHVI matches a 2e6-sample Monte-Carlo oracle", [](std::string& d) {
        const auto start = std::chrono::steady_clock::now();
        std::mt19937_64 rng(1003);
        std::uniform_real_distribution<double> acc(0.05, 1.0), pow_w(0.5, 9.5);
        std::uniform_real_distribution<double> am(0.0, 1.2), asd(0.0, 0.3);
        std::uniform_real_distribution<double> pm(1.0, 11.0), psd(0.0, 2.0);
        const ObjectivePoint ref{0.0, 10.0};
        double worst = 0.0;
        for (int it = 0; it < 20; ++it) {
            std::vector<ObjectivePoint> pts(1 + rng() % 5);
            for (auto& p : pts) p = {acc(rng), pow_w(rng)};
            const auto front = pareto_front(pts);
            const double mean_a = am(rng), sd_a = it % 4 == 0 ? 0.0 : asd(rng);
            const double mean_p = pm(rng), sd_p = psd(rng);
            const double exact = ehvi_gaussian(front, ref, mean_a, sd_a, mean_p, sd_p);
            const double mc =
                mc_ehvi(front, ref, mean_a, sd_a, mean_p, sd_p, 2000000, 5000 + it);
            const double tol = std::max(0.02 * std::max(exact, mc), 1e-3);
            worst = std::max(worst, std::abs(exact - mc) / tol);
            if (std::abs(exact - mc) > tol) {
                d = "instance " + std::to_string(it) + ": exact " + std::to_string(exact) +
                    " vs mc " + std::to_string(mc);
                return false;
            }
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        d = "20 instances, worst margin use " + std::to_string(worst) + ", " +
            std::to_string(secs) + " s";
        return secs < 30.0;
    });

    criterion(4, "GP posterior sanity against closed forms", [](std::string& d) {
        std::mt19937_64 rng(1004);
        std::uniform_real_distribution<double> u(0.0, 1.0), yv(-2.0, 2.0);
        // near-interpolation at tiny noise
        for (int it = 0; it < 20; ++it) {
            std::vector<Eigen::Vector2d> xs;
            std::vector<double> ys;
            for (int i = 0; i < 6; ++i) {
                xs.emplace_back(u(rng), u(rng));
                ys.push_back(yv(rng));
            }
            const auto gp = GpSurrogate::fit_with(xs, ys, {0.5, 0.5, 1.0, 1e-9});
            for (std::size_t i = 0; i < xs.size(); ++i) {
                if (std::abs(gp.predict(xs[i]).mean - ys[i]) > 1e-4) {
                    d = "interpolation error above 1e-4";
                    return false;
                }
            }
        }
        // two-point closed form to 1e-10
        for (int it = 0; it < 50; ++it) {
            const Eigen::Vector2d x1(u(rng), u(rng)), x2(u(rng), u(rng));
            if ((x1 - x2).norm() < 1e-3) continue;
            const double y1 = yv(rng), y2 = yv(rng);
            const GpHyperparameters hp{0.2, 0.5, 1.0, 1e-2};
            const auto gp = GpSurrogate::fit_with({x1, x2}, {y1, y2}, hp);

            const double mean = 0.5 * (y1 + y2);
            const double sd = std::max(std::sqrt(((y1 - mean) * (y1 - mean) +
                                                  (y2 - mean) * (y2 - mean)) / 2.0), 1e-12);
            auto kern = [&hp](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
                const double dt = (a.x() - b.x()) / hp.lengthscale_tau;
                const double db = (a.y() - b.y()) / hp.lengthscale_bitrate;
                return std::exp(-0.5 * (dt * dt + db * db));
            };
            const double diag = 1.0 + hp.noise_variance + kGpJitter;
            const double off = kern(x1, x2);
            const double det = diag * diag - off * off;
            const Eigen::Vector2d at(u(rng), u(rng));
            const double k1 = kern(at, x1), k2 = kern(at, x2);
            const double z1 = (y1 - mean) / sd, z2 = (y2 - mean) / sd;
            const double m_std = k1 * (diag * z1 - off * z2) / det +
                                 k2 * (-off * z1 + diag * z2) / det;
            const double want = mean + sd * m_std;
            if (std::abs(gp.predict(at).mean - want) > 1e-10) {
                d = "two-point posterior off by more than 1e-10";
                return false;
            }
        }
        return true;
    });

    criterion(5, "filter threshold monotonicity and feature range", [](std::string& d) {
        std::mt19937_64 rng(1005);
        const FilterFeature feats[] = {FilterFeature::Pixel, FilterFeature::Area,
                                       FilterFeature::Edge};
        for (int it = 0; it < 200; ++it) {
            const int w = 3 + static_cast<int>(rng() % 8), h = 3 + static_cast<int>(rng() % 8);
            std::vector<Frame> seq;
            const int n = 2 + static_cast<int>(rng() % 8);
            for (int i = 0; i < n; ++i) {
                Frame f{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h)};
                for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng() % 256);
                seq.push_back(std::move(f));
            }
            for (auto feat : feats) {
                std::uniform_real_distribution<double> td(0.0, 1.0);
                double t1 = td(rng), t2 = td(rng);
                if (t1 > t2) std::swap(t1, t2);
                const auto lo = filter_sequence(seq, feat, t1);
                const auto hi = filter_sequence(seq, feat, t2);
                for (std::size_t i = 0; i < seq.size(); ++i) {
                    if (hi[i].kept && !lo[i].kept) {
                        d = "kept set not nested under threshold increase";
                        return false;
                    }
                    if (lo[i].feature_value < 0.0 || lo[i].feature_value > 1.0) {
                        d = "feature value outside [0, 1]";
                        return false;
                    }
                }
            }
        }
        return true;
    });

    criterion(6, "temporal accuracy carry-forward semantics", [](std::string& d) {
        // kept frame 14 scores against ground-truth frames 14, 15 and 16
        DetectionTrack gt, kept;
        const BoundingBox b14{0, 0, 10, 10}, b15{3, 0, 13, 10}, b16{6, 0, 16, 10};
        for (int i = 0; i < 14; ++i) gt.frames[i] = {};
        gt.frames[14] = {b14};
        gt.frames[15] = {b15};
        gt.frames[16] = {b16};
        kept.frames[0] = {};
        kept.frames[14] = {b14};
        const double want = (14.0 + iou(b14, b14) + iou(b15, b14) + iou(b16, b14)) / 17.0;
        if (std::abs(temporal_accuracy(gt, kept, 17) - want) > 1e-12) {
            d = "carry-forward example mismatch";
            return false;
        }

        // random tracks against the linear-scan oracle
        std::mt19937_64 rng(1006);
        auto random_box = [&rng]() {
            std::uniform_real_distribution<double> u(0.0, 60.0), s(2.0, 20.0);
            const double x = u(rng), y = u(rng);
            return BoundingBox{x, y, x + s(rng), y + s(rng)};
        };
        for (int it = 0; it < 100; ++it) {
            const int horizon = 1 + static_cast<int>(rng() % 40);
            DetectionTrack g, k;
            for (int i = 0; i < horizon; ++i) {
                std::vector<BoundingBox> boxes(rng() % 3);
                for (auto& bb : boxes) bb = random_box();
                g.frames[i] = boxes;
                if (i == 0 || rng() % 3 == 0) {
                    std::vector<BoundingBox> kb(rng() % 3);
                    for (auto& bb : kb) bb = random_box();
                    k.frames[i] = kb;
                }
            }
            double total = 0.0;
            for (int i = 0; i < horizon; ++i) {
                int j = -1;
                for (const auto& [idx, _] : k.frames)
                    if (idx <= i) j = std::max(j, idx);
                total += frame_score(g.frames.at(i), k.frames.at(j));
            }
            if (std::abs(temporal_accuracy(g, k, horizon) - total / horizon) > 1e-12) {
                d = "random track " + std::to_string(it) + " mismatch";
                return false;
            }
        }
        return true;
    });

    const fs::path out_root = fs::temp_directory_path() / "ecolens_acceptance";
    fs::remove_all(out_root);
    fs::create_directories(out_root);

    criterion(7, "offline profile: 1452 rows, front entirely 1.5 GHz pixel", [&](std::string& d) {
        cmd::ProfileOptions options{kSceneFile, 0.0, out_root / "profile.csv"};
        if (cmd::cmd_profile(options) != 0) {
            d = "cmd_profile failed";
            return false;
        }
        const auto records = load_profile_csv(out_root / "profile.csv");
        if (records.size() != 1452) {
            d = "row count " + std::to_string(records.size());
            return false;
        }
        const auto front =
            load_profile_csv(cmd::pareto_companion_path(out_root / "profile.csv"));
        if (front.empty()) {
            d = "empty front";
            return false;
        }
        for (const auto& r : front) {
            if (r.config.cpu_ghz != 1.5 || r.config.filter != FilterFeature::Pixel) {
                d = "front row off (1.5 GHz, pixel)";
                return false;
            }
        }
        d = std::to_string(front.size()) + " front rows";
        return true;
    });

    criterion(8, "anchor calibration within 0.005 / 0.05 W", [](std::string& d) {
        const SceneModel m = load_scene(kSceneFile);
        const Configuration a{1.5, FilterFeature::Pixel, 0.01, 100};
        const Configuration b{2.4, FilterFeature::Area, 0.02, 1300};
        const Configuration base{2.4, FilterFeature::Pixel, 0.0, 3000};
        struct Anchor {
            double got, want, tol;
        } anchors[] = {
            {true_accuracy(m, a, 0.0), 0.8606, 0.005}, {true_accuracy(m, a, 1.0), 0.4361, 0.005},
            {true_accuracy(m, b, 0.0), 0.8314, 0.005}, {true_accuracy(m, b, 1.0), 0.7419, 0.005},
            {true_power(m, a, 0.0), 4.97, 0.05},       {true_power(m, a, 1.0), 4.62, 0.05},
            {true_power(m, b, 0.0), 7.24, 0.05},       {true_power(m, b, 1.0), 7.37, 0.05},
            {true_power(m, base, 0.0), 7.223, 0.05},
        };
        double worst = 0.0;
        for (const auto& an : anchors) {
            worst = std::max(worst, std::abs(an.got - an.want));
            if (std::abs(an.got - an.want) > an.tol) {
                d = "anchor off: got " + std::to_string(an.got) + " want " +
                    std::to_string(an.want);
                return false;
            }
        }
        d = "worst deviation " + std::to_string(worst);
        return true;
    });

    criterion(9, "scaled end-to-end drift run", [&](std::string& d) {
        const auto start = std::chrono::steady_clock::now();
        cmd::RunOptions options;
        options.scene_file = kSceneFile;
        options.out_dir = out_root / "run_a";
        if (cmd::cmd_run(options) != 0) {
            d = "cmd_run failed";
            return false;
        }
        const auto summary = nlohmann::json::parse(slurp(out_root / "run_a/summary.json"));
        const double mean_acc = summary.at("mean_accuracy").get<double>();
        const double savings = summary.at("energy_savings_pct").get<double>();

        bool switch_after_drift = false;
        std::ifstream trace(out_root / "run_a/trace.jsonl");
        std::string line;
        while (std::getline(trace, line)) {
            const auto ev = nlohmann::json::parse(line);
            if (ev.contains("note") && ev["note"] == "config_switch" &&
                ev["t_s"].get<double>() >= 600.0)
                switch_after_drift = true;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        d = "mean accuracy " + std::to_string(mean_acc) + ", savings " + std::to_string(savings) +
            "%, switch after drift " + (switch_after_drift ? "yes" : "no") + ", " +
            std::to_string(secs) + " s";
        return mean_acc >= 0.87 && savings >= 30.0 && switch_after_drift && secs < 60.0;
    });

    criterion(10, "byte-identical reruns of cmd_run", [&](std::string& d) {
        cmd::RunOptions options;
        options.scene_file = kSceneFile;
        options.out_dir = out_root / "run_b";
        if (cmd::cmd_run(options) != 0) {
            d = "cmd_run failed";
            return false;
        }
        const bool trace_same =
            slurp(out_root / "run_a/trace.jsonl") == slurp(out_root / "run_b/trace.jsonl");
        const bool summary_same =
            slurp(out_root / "run_a/summary.json") == slurp(out_root / "run_b/summary.json");
        if (!trace_same) d = "trace differs";
        if (!summary_same) d += std::string(d.empty() ? "" : "; ") + "summary differs";
        return trace_same && summary_same;
    });

    criterion(11, "protocol round-trip and loopback trace identity", [&](std::string& d) {
        std::mt19937_64 rng(1011);
        for (int i = 0; i < 10000; ++i) {
            protocol::Message msg;
            switch (rng() % 8) {
                case 0: msg = protocol::Hello{rng() % 2 ? "camera" : "server"}; break;
                case 1:
                    msg = protocol::ConfigUpdate{(rng() % 11) / 100.0,
                                                 100 + static_cast<int>(rng() % 2901),
                                                 double(1 + rng() % 600),
                                                 static_cast<int>(rng() % 100)};
                    break;
                case 2:
                    msg = protocol::GtBurstBegin{static_cast<int>(rng() % 50),
                                                 double(rng() % 900),
                                                 static_cast<int>(rng() % 30), 3000};
                    break;
                case 3: {
                    protocol::FrameMsg f;
                    f.frame_index = static_cast<int>(rng() % 100000);
                    std::vector<std::uint8_t> payload(rng() % 64);
                    for (auto& byte : payload) byte = static_cast<std::uint8_t>(rng());
                    if (rng() % 2)
                        f.data_b64 = protocol::base64_encode(payload.data(), payload.size());
                    else
                        f.ref = "frame:" + std::to_string(rng() % 100000);
                    msg = f;
                    break;
                }
                case 4: msg = protocol::GtBurstEnd{static_cast<int>(rng() % 50)}; break;
                case 5: {
                    protocol::Detections det;
                    det.frame = static_cast<int>(rng() % 1000);
                    const std::size_t nb = rng() % 4;
                    for (std::size_t k = 0; k < nb; ++k) {
                        const double x = rng() % 100, y = rng() % 100;
                        det.boxes.push_back({x, y, x + 1.0 + rng() % 50, y + 1.0 + rng() % 50});
                    }
                    msg = det;
                    break;
                }
                case 6: {
                    nlohmann::json body;
                    body["v"] = static_cast<int>(rng() % 10000);
                    msg = protocol::SummaryMsg{body};
                    break;
                }
                default: msg = protocol::Bye{};
            }
            const auto bytes = protocol::encode(msg);
            const auto back = protocol::decode(bytes.data(), bytes.size());
            if (!back.message || !(*back.message == msg) || back.consumed != bytes.size()) {
                d = "round-trip failed at message " + std::to_string(i);
                return false;
            }
        }

        // loopback: server agent trace equals the in-process trace
        const SceneModel scene = load_scene(kSceneFile);
        LoopParams params;
        params.seed = scene.seed;
        SceneBackend backend(scene, params.seed);
        const auto profile = offline_profile(scene, offline_grid(), 0.0);
        const auto reference =
            run_online(params, backend, profile, {2.4, FilterFeature::Pixel, 0.0, 3000});
        write_trace_jsonl(reference.trace, out_root / "reference.jsonl");

        protocol::ServerOptions server;
        server.port = 0;
        server.params = params;
        server.scene = scene;
        server.trace_path = out_root / "loopback_trace.jsonl";
        server.summary_path = out_root / "loopback_summary.json";
        int port = 0, server_status = -1;
        std::thread server_thread(
            [&] { server_status = protocol::run_server_agent(server, &port); });
        while (port == 0) std::this_thread::sleep_for(std::chrono::milliseconds(1));
        protocol::CameraOptions camera;
        camera.port = port;
        const int camera_status = protocol::run_camera_agent(camera);
        server_thread.join();

        if (server_status != 0 || camera_status != 0) {
            d = "agent exit status server=" + std::to_string(server_status) +
                " camera=" + std::to_string(camera_status);
            return false;
        }
        if (slurp(out_root / "loopback_trace.jsonl") != slurp(out_root / "reference.jsonl")) {
            d = "loopback trace differs from in-process trace";
            return false;
        }
        d = "10000 messages, loopback identical";
        return true;
    });

    std::printf("%s: %d criterion(s) failed\n", g_failures ? "FAIL" : "OK", g_failures);
    return g_failures ? 1 : 0;
}
