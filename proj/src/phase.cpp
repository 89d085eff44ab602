#include "fetalink/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fetalink {

std::string to_string(Phase p) {
    switch (p) {
        case Phase::Pre: return "pre";
        case Phase::During: return "during";
        case Phase::Post: return "post";
    }
    return "?";
}

PhaseWindows phase_windows(const TimeSpan& event, const TimeSpan& recording_span,
                           double margin) {
    if (margin < 0.0) throw std::invalid_argument("phase margin must be >= 0");
    if (event.start < recording_span.start || event.end > recording_span.end)
        throw std::invalid_argument("event must lie within the recording span");

    PhaseWindows w;
    double pre_start = event.start - margin;
    if (pre_start < recording_span.start) {
        pre_start = recording_span.start;
        w.pre_clipped = true;
    }
    double post_end = event.end + margin;
    if (post_end > recording_span.end) {
        post_end = recording_span.end;
        w.post_clipped = true;
    }
    w.pre = TimeSpan{pre_start, event.start};
    w.during = TimeSpan{event.start, event.end};
    w.post = TimeSpan{event.end, post_end};
    if (w.pre.duration() <= 0.0) w.pre_clipped = true;
    if (w.post.duration() <= 0.0) w.post_clipped = true;
    return w;
}

PhaseStats window_stats(const Channel& fhr, const TimeSpan& window, Phase phase,
                        double min_valid_fraction, bool sample_std) {
    PhaseStats st;
    st.phase = phase;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    auto [first, last] = fhr.sample_range(window, false);
    std::size_t total = last - first;
    if (total == 0) {
        st.mean = st.std_dev = st.cv = nan;
        return st;
    }

    double sum = 0.0, sum2 = 0.0;
    int n = 0;
    for (std::size_t i = first; i < last; ++i) {
        if (!fhr.valid[i]) continue;
        double v = fhr.samples[i];
        sum += v;
        sum2 += v * v;
        ++n;
    }
    st.n_valid = n;
    st.valid_fraction = static_cast<double>(n) / static_cast<double>(total);
    if (n == 0 || st.valid_fraction < min_valid_fraction) {
        st.mean = st.std_dev = st.cv = nan;
        return st;
    }
    st.mean = sum / n;
    double var = std::max(0.0, sum2 / n - st.mean * st.mean);
    if (sample_std && n > 1) var *= static_cast<double>(n) / (n - 1);
    st.std_dev = std::sqrt(var);
    st.cv = st.mean > 0.0 ? st.std_dev / st.mean : nan;
    st.available = true;
    return st;
}

BoxSummary boxplot_summary(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("boxplot_summary: empty input");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();

    auto quantile = [&](double p) {
        double h = p * static_cast<double>(n - 1);
        auto lo = static_cast<std::size_t>(std::floor(h));
        auto hi = std::min(lo + 1, n - 1);
        return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };

    BoxSummary box;
    box.n = static_cast<int>(n);
    box.q1 = quantile(0.25);
    box.median = quantile(0.5);
    box.q3 = quantile(0.75);
    double iqr = box.q3 - box.q1;
    double lo_fence = box.q1 - 1.5 * iqr;
    double hi_fence = box.q3 + 1.5 * iqr;

    box.whisker_low = box.q1;
    box.whisker_high = box.q3;
    for (double v : values) {
        if (v >= lo_fence) {
            box.whisker_low = v;  // first (smallest) value inside the fence
            break;
        }
    }
    for (auto it = values.rbegin(); it != values.rend(); ++it) {
        if (*it <= hi_fence) {
            box.whisker_high = *it;
            break;
        }
    }
    for (double v : values)
        if (v < lo_fence || v > hi_fence) box.outliers.push_back(v);
    return box;
}

PhaseReport cohort_phase_report(
    const std::vector<const Recording*>& recordings,
    const std::vector<std::vector<EventInterval>>& events_per_recording,
    double margin, double min_valid_fraction) {
    if (recordings.size() != events_per_recording.size())
        throw std::invalid_argument("cohort_phase_report: size mismatch");

    PhaseReport rep;
    std::vector<double> metric_values[3][3];  // [phase][metric]

    for (std::size_t r = 0; r < recordings.size(); ++r) {
        const Recording& rec = *recordings[r];
        for (const auto& ev : events_per_recording[r]) {
            if (ev.span.start < rec.total_span.start || ev.span.end > rec.total_span.end)
                continue;
            ++rep.n_events_total;
            PhaseWindows w = phase_windows(ev.span, rec.total_span, margin);
            if (w.pre_clipped) ++rep.n_clipped_pre;
            if (w.post_clipped) ++rep.n_clipped_post;
            const TimeSpan* spans[3] = {&w.pre, &w.during, &w.post};
            const Phase phases[3] = {Phase::Pre, Phase::During, Phase::Post};
            for (int p = 0; p < 3; ++p) {
                PhaseStats st =
                    window_stats(rec.fhr, *spans[p], phases[p], min_valid_fraction);
                if (!st.available) continue;
                ++rep.n_events_used[p];
                metric_values[p][0].push_back(st.mean);
                metric_values[p][1].push_back(st.std_dev);
                if (std::isfinite(st.cv)) metric_values[p][2].push_back(st.cv);
            }
        }
    }

    bool any = false;
    for (int p = 0; p < 3; ++p) {
        for (int m = 0; m < 3; ++m) {
            const auto& vals = metric_values[p][m];
            if (vals.empty()) continue;
            any = true;
            PhaseMetricSummary s;
            s.box = boxplot_summary(vals);
            double sum = 0.0;
            for (double v : vals) sum += v;
            s.grand_mean = sum / static_cast<double>(vals.size());
            rep.summary[p][m] = std::move(s);
        }
    }
    if (!any) rep.reason = "no usable events (all windows empty or below valid-fraction threshold)";
    return rep;
}

}  // namespace fetalink
