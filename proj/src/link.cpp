#include "fetalink/link.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>

namespace fetalink {

std::string to_string(LinkKind k) {
    switch (k) {
        case LinkKind::None: return "none";
        case LinkKind::Acceleration: return "acc";
        case LinkKind::Deceleration: return "dec";
    }
    return "?";
}

double linked_duration(const TimeSpan& h, const TimeSpan& fhr) {
    return std::max(fhr.end - h.start, h.end - h.start);
}

std::vector<LinkedEvent> link_events(const std::vector<EventInterval>& hypoxic,
                                     const std::vector<EventInterval>& fhr_events,
                                     double window) {
    if (window < 0.0) throw std::invalid_argument("link window must be >= 0");

    std::vector<EventInterval> fhr = fhr_events;
    std::sort(fhr.begin(), fhr.end(), [](const auto& a, const auto& b) {
        return a.span.start < b.span.start;
    });

    std::vector<LinkedEvent> out;
    for (const auto& h : hypoxic) {
        if (h.kind != EventKind::Hypoxia)
            throw std::invalid_argument("link_events: non-hypoxic event in hypoxic list");
        bool any = false;
        for (const auto& e : fhr) {
            double onset = e.span.start;
            if (onset > h.span.end + window) break;
            if (onset < h.span.start) continue;
            LinkedEvent le;
            le.hypoxia = h;
            le.fhr_event = e;
            le.link_kind = e.kind == EventKind::Acceleration ? LinkKind::Acceleration
                                                             : LinkKind::Deceleration;
            le.linked_duration = linked_duration(h.span, e.span);
            out.push_back(std::move(le));
            any = true;
        }
        if (!any) {
            LinkedEvent le;
            le.hypoxia = h;
            le.link_kind = LinkKind::None;
            le.linked_duration = h.span.duration();
            out.push_back(std::move(le));
        }
    }
    return out;
}

namespace {

// S_baseline: max valid sample in [start - lookback, start); falls back to the
// first valid sample inside the event when the lookback window has none.
double event_baseline(const Channel& spo2, const TimeSpan& event,
                      double lookback, std::size_t first, std::size_t last) {
    double lb_start = std::max(0.0, event.start - lookback);
    double best = -std::numeric_limits<double>::infinity();
    if (lb_start < event.start) {
        auto [f, l] = spo2.sample_range(TimeSpan{lb_start, event.start}, false);
        for (std::size_t i = f; i < l; ++i)
            if (spo2.valid[i]) best = std::max(best, spo2.samples[i]);
    }
    if (!std::isfinite(best)) {
        for (std::size_t i = first; i < last; ++i)
            if (spo2.valid[i]) return spo2.samples[i];
    }
    return best;
}

}  // namespace

double hypoxic_burden_area(const Channel& spo2, const TimeSpan& event,
                           const BurdenOptions& opts) {
    if (spo2.kind != SignalKind::SpO2)
        throw std::invalid_argument("hypoxic_burden_area expects an SpO2 channel");
    auto [first, last] = spo2.sample_range(event, true);
    std::size_t n_valid = 0;
    for (std::size_t i = first; i < last; ++i)
        if (spo2.valid[i]) ++n_valid;
    if (n_valid < 2)
        throw std::runtime_error("hypoxic_burden_area: fewer than 2 valid samples in event");

    double baseline = opts.baseline_override
                          ? *opts.baseline_override
                          : event_baseline(spo2, event, opts.baseline_lookback, first, last);

    // deficit per grid sample; invalid samples are filled by linear
    // interpolation between surrounding valid ones (nearest at the edges)
    std::size_t n = last - first;
    std::vector<double> deficit(n);
    std::vector<bool> known(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (spo2.valid[first + i]) {
            deficit[i] = std::max(0.0, baseline - spo2.samples[first + i]);
            known[i] = true;
        }
    }
    std::size_t prev = n;  // last known index
    for (std::size_t i = 0; i < n; ++i) {
        if (known[i]) {
            if (prev == n && i > 0)
                for (std::size_t j = 0; j < i; ++j) deficit[j] = deficit[i];
            if (prev != n && i > prev + 1) {
                double d0 = deficit[prev], d1 = deficit[i];
                for (std::size_t j = prev + 1; j < i; ++j)
                    deficit[j] = d0 + (d1 - d0) * static_cast<double>(j - prev) /
                                          static_cast<double>(i - prev);
            }
            prev = i;
        }
    }
    if (prev != n)
        for (std::size_t j = prev + 1; j < n; ++j) deficit[j] = deficit[prev];

    const double h = 1.0 / spo2.sample_rate;
    std::size_t intervals = n - 1;
    if (intervals == 0) return 0.0;

    auto trapezoid = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t i = a; i < b; ++i) s += 0.5 * (deficit[i] + deficit[i + 1]);
        return s * h;
    };

    if (opts.method == BurdenOptions::Method::Trapezoid)
        return trapezoid(0, intervals);

    std::size_t even_intervals = intervals - (intervals % 2);
    double area = 0.0;
    for (std::size_t i = 0; i + 2 <= even_intervals; i += 2)
        area += (h / 3.0) * (deficit[i] + 4.0 * deficit[i + 1] + deficit[i + 2]);
    if (intervals % 2 == 1) area += trapezoid(even_intervals, intervals);
    return area;
}

HypoxicFeatures event_features(const Channel& spo2, const TimeSpan& event,
                               const BurdenOptions& opts) {
    if (spo2.kind != SignalKind::SpO2)
        throw std::invalid_argument("event_features expects an SpO2 channel");
    auto [first, last] = spo2.sample_range(event, true);
    double nadir = std::numeric_limits<double>::infinity();
    std::size_t n_valid = 0;
    for (std::size_t i = first; i < last; ++i) {
        if (!spo2.valid[i]) continue;
        ++n_valid;
        nadir = std::min(nadir, spo2.samples[i]);
    }
    if (n_valid == 0)
        throw std::runtime_error("event_features: no valid SpO2 sample in event");

    double baseline = event_baseline(spo2, event, opts.baseline_lookback, first, last);
    baseline = std::max(baseline, nadir);  // keeps drop >= 0 on mis-annotated rises

    HypoxicFeatures f;
    f.duration = event.duration();
    f.nadir = nadir;
    f.baseline = baseline;
    f.drop = baseline - nadir;
    if (n_valid >= 2) {
        BurdenOptions bo = opts;
        bo.baseline_override = baseline;  // one baseline notion per event
        f.burden_area = hypoxic_burden_area(spo2, event, bo);
    }
    return f;
}

int compute_features(std::vector<LinkedEvent>& linked, const Channel& spo2,
                     const BurdenOptions& opts) {
    std::map<std::pair<double, double>, std::optional<HypoxicFeatures>> cache;
    int unusable = 0;
    for (auto& le : linked) {
        auto key = std::make_pair(le.hypoxia.span.start, le.hypoxia.span.end);
        auto it = cache.find(key);
        if (it == cache.end()) {
            std::optional<HypoxicFeatures> f;
            try {
                f = event_features(spo2, le.hypoxia.span, opts);
            } catch (const std::runtime_error&) {
                ++unusable;
            }
            it = cache.emplace(key, std::move(f)).first;
        }
        le.features = it->second;
    }
    return unusable;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip
    (void)ec;
    return std::string(buf, p);
}

}  // namespace

void write_linked_events_csv(std::ostream& os, const std::string& participant_id,
                             const std::vector<LinkedEvent>& linked, bool header) {
    if (header)
        os << "participant_id,link_kind,h_start,h_end,fhr_start,fhr_end,"
              "linked_duration,nadir,drop,duration,burden\n";
    for (const auto& le : linked) {
        os << participant_id << ',' << to_string(le.link_kind) << ','
           << fmt(le.hypoxia.span.start) << ',' << fmt(le.hypoxia.span.end) << ',';
        if (le.fhr_event)
            os << fmt(le.fhr_event->span.start) << ',' << fmt(le.fhr_event->span.end);
        else
            os << ',';
        os << ',' << fmt(le.linked_duration) << ',';
        if (le.features) {
            os << fmt(le.features->nadir) << ',' << fmt(le.features->drop) << ','
               << fmt(le.features->duration) << ',';
            if (le.features->burden_area) os << fmt(*le.features->burden_area);
        } else {
            os << ",,,";
        }
        os << '\n';
    }
}

}  // namespace fetalink
