#include "fetalink/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace fetalink {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void rect(std::string& s, double x, double y, double w, double h, const char* fill) {
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
         "\" height=\"" + num(h) + "\" fill=\"" + fill +
         "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
}

void line(std::string& s, double x1, double y1, double x2, double y2) {
    s += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
         "\" y2=\"" + num(y2) + "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
}

void text(std::string& s, double x, double y, const std::string& t, int size = 12) {
    s += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
         std::to_string(size) + "\" font-family=\"sans-serif\" text-anchor=\"middle\">" +
         t + "</text>\n";
}

}  // namespace

std::string render_phase_svg(const PhaseReport& report) {
    const double panel_w = 300, panel_h = 220, pad = 40;
    const double width = 3 * panel_w, height = panel_h + 2 * pad;
    const char* fills[3] = {"#9ecae1", "#fdae6b", "#a1d99b"};
    const char* phase_names[3] = {"pre", "during", "post"};

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (int m = 0; m < 3; ++m) {
        double x0 = m * panel_w;
        text(s, x0 + panel_w / 2, pad - 16, std::string("FHR ") + PhaseReport::metric_names[m],
             14);

        // panel data range from whiskers and outliers
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int p = 0; p < 3; ++p) {
            const auto& sm = report.summary[p][m];
            if (!sm) continue;
            lo = std::min(lo, sm->box.whisker_low);
            hi = std::max(hi, sm->box.whisker_high);
            for (double o : sm->box.outliers) {
                lo = std::min(lo, o);
                hi = std::max(hi, o);
            }
        }
        if (!(hi > lo)) {
            text(s, x0 + panel_w / 2, pad + panel_h / 2, "no data");
            continue;
        }
        double margin = 0.05 * (hi - lo);
        lo -= margin;
        hi += margin;
        auto ypix = [&](double v) { return pad + panel_h * (1.0 - (v - lo) / (hi - lo)); };

        for (int p = 0; p < 3; ++p) {
            const auto& sm = report.summary[p][m];
            double cx = x0 + panel_w * (p + 1) / 4.0;
            text(s, cx, pad + panel_h + 16, phase_names[p]);
            if (!sm) continue;
            const BoxSummary& b = sm->box;
            double bw = panel_w / 8.0;
            line(s, cx, ypix(b.whisker_low), cx, ypix(b.q1));
            line(s, cx, ypix(b.q3), cx, ypix(b.whisker_high));
            line(s, cx - bw / 2, ypix(b.whisker_low), cx + bw / 2, ypix(b.whisker_low));
            line(s, cx - bw / 2, ypix(b.whisker_high), cx + bw / 2, ypix(b.whisker_high));
            rect(s, cx - bw, ypix(b.q3), 2 * bw, ypix(b.q1) - ypix(b.q3), fills[p]);
            line(s, cx - bw, ypix(b.median), cx + bw, ypix(b.median));
            for (double o : b.outliers)
                s += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(ypix(o)) +
                     "\" r=\"2\" fill=\"none\" stroke=\"#333\"/>\n";
        }
    }
    s += "</svg>\n";
    return s;
}

}  // namespace fetalink
