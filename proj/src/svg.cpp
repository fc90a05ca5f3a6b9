#include "ecolens/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ecolens {

namespace {

constexpr int kWidth = 900;
constexpr int kPanelHeight = 220;
constexpr int kMarginLeft = 60;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 24;
constexpr int kPanelGap = 40;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

struct Panel {
    int y0;
    double lo, hi;
    double map_y(double v) const {
        const double frac = (v - lo) / (hi - lo);
        return y0 + kPanelHeight - frac * kPanelHeight;
    }
};

}  // namespace

void write_run_plot(const std::vector<TraceEvent>& trace, double target_accuracy,
                    const std::filesystem::path& path) {
    if (trace.empty()) throw std::invalid_argument("write_run_plot: empty trace");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());

    const double t_max = std::max(trace.back().t_s, 1.0);
    auto map_x = [t_max](double t) {
        return kMarginLeft + t / t_max * (kWidth - kMarginLeft - kMarginRight);
    };

    double pow_lo = trace[0].power_w, pow_hi = trace[0].power_w;
    for (const auto& ev : trace) {
        pow_lo = std::min(pow_lo, ev.power_w);
        pow_hi = std::max(pow_hi, ev.power_w);
    }
    pow_lo = std::max(0.0, pow_lo - 0.25);
    pow_hi += 0.25;

    const Panel acc_panel{kMarginTop, 0.0, 1.0};
    const Panel pow_panel{kMarginTop + kPanelHeight + kPanelGap, pow_lo, pow_hi};
    const int total_h = kMarginTop + 2 * kPanelHeight + kPanelGap + 40;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << total_h << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    auto panel_frame = [&](const Panel& p, const char* label) {
        out << "<rect x=\"" << kMarginLeft << "\" y=\"" << p.y0 << "\" width=\""
            << kWidth - kMarginLeft - kMarginRight << "\" height=\"" << kPanelHeight
            << "\" fill=\"none\" stroke=\"#888\"/>\n";
        out << "<text x=\"" << kMarginLeft << "\" y=\"" << p.y0 - 6 << "\">" << label
            << "</text>\n";
        for (int i = 0; i <= 4; ++i) {
            const double v = p.lo + (p.hi - p.lo) * i / 4.0;
            const double y = p.map_y(v);
            out << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << fmt(y + 3)
                << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
        }
    };
    panel_frame(acc_panel, "accuracy");
    panel_frame(pow_panel, "power (W)");

    // x ticks every 100 simulated seconds
    for (double t = 0.0; t <= t_max; t += 100.0) {
        out << "<text x=\"" << fmt(map_x(t)) << "\" y=\"" << total_h - 16
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << total_h - 2
        << "\" text-anchor=\"middle\">t (s)</text>\n";

    auto polyline = [&](const Panel& p, const char* color, auto value) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (const auto& ev : trace)
            out << fmt(map_x(ev.t_s)) << "," << fmt(p.map_y(std::clamp(value(ev), p.lo, p.hi)))
                << " ";
        out << "\"/>\n";
    };
    polyline(acc_panel, "#1f77b4", [](const TraceEvent& e) { return e.accuracy; });
    polyline(pow_panel, "#d62728", [](const TraceEvent& e) { return e.power_w; });

    // accuracy target line
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(acc_panel.map_y(target_accuracy))
        << "\" x2=\"" << kWidth - kMarginRight << "\" y2=\""
        << fmt(acc_panel.map_y(target_accuracy))
        << "\" stroke=\"#2ca02c\" stroke-dasharray=\"2,3\"/>\n";

    // vertical markers at configuration switches, labelled with the new knobs
    for (const auto& ev : trace) {
        if (ev.note != "config_switch") continue;
        const double x = map_x(ev.t_s);
        for (const Panel& p : {acc_panel, pow_panel}) {
            out << "<line x1=\"" << fmt(x) << "\" y1=\"" << p.y0 << "\" x2=\"" << fmt(x)
                << "\" y2=\"" << p.y0 + kPanelHeight
                << "\" stroke=\"#555\" stroke-dasharray=\"4,3\"/>\n";
        }
        char label[48];
        std::snprintf(label, sizeof label, "[%.2f, %d]", ev.config.threshold,
                      ev.config.bitrate_kbps);
        out << "<text x=\"" << fmt(x + 3) << "\" y=\"" << acc_panel.y0 + 12 << "\">" << label
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace ecolens
