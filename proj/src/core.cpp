#include "fetalink/core.hpp"

#include <algorithm>
#include <cmath>

namespace fetalink {

double overlap_duration(const TimeSpan& a, const TimeSpan& b) {
    double lo = std::max(a.start, b.start);
    double hi = std::min(a.end, b.end);
    return std::max(0.0, hi - lo);
}

double union_duration(const TimeSpan& a, const TimeSpan& b) {
    return a.duration() + b.duration() - overlap_duration(a, b);
}

std::string to_string(SignalKind k) {
    return k == SignalKind::SpO2 ? "spo2" : "fhr";
}

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::Hypoxia: return "hypoxia";
        case EventKind::Acceleration: return "acc";
        case EventKind::Deceleration: return "dec";
    }
    return "?";
}

bool Channel::in_physiological_range(SignalKind kind, double v) {
    if (!std::isfinite(v)) return false;
    if (kind == SignalKind::SpO2) return v >= 50.0 && v <= 100.0;
    return v >= 50.0 && v <= 240.0;
}

Channel Channel::make(SignalKind kind, double sample_rate, double t0,
                      std::vector<double> samples) {
    if (!(sample_rate > 0.0))
        throw std::invalid_argument("Channel sample_rate must be positive");
    if (!(t0 >= 0.0))
        throw std::invalid_argument("Channel t0 must be non-negative");
    Channel ch;
    ch.kind = kind;
    ch.sample_rate = sample_rate;
    ch.t0 = t0;
    ch.valid.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        ch.valid[i] = in_physiological_range(kind, samples[i]);
    ch.samples = std::move(samples);
    return ch;
}

TimeSpan Channel::extent() const {
    if (samples.empty()) return {t0, t0};
    return {t0, t0 + static_cast<double>(samples.size()) / sample_rate};
}

std::pair<std::size_t, std::size_t> Channel::sample_range(const TimeSpan& span,
                                                          bool closed_end) const {
    // tolerate ~1e-6-sample rounding when boundaries land on sample instants
    const double eps = 1e-6;
    double lo = (span.start - t0) * sample_rate;
    double hi = (span.end - t0) * sample_rate;
    long first = static_cast<long>(std::ceil(lo - eps));
    long last = closed_end ? static_cast<long>(std::floor(hi + eps))
                           : static_cast<long>(std::ceil(hi - eps)) - 1;
    first = std::max(first, 0L);
    last = std::min(last, static_cast<long>(samples.size()) - 1);
    if (last < first) return {0, 0};
    return {static_cast<std::size_t>(first), static_cast<std::size_t>(last) + 1};
}

std::vector<EventInterval> Recording::events_of(EventKind kind) const {
    std::vector<EventInterval> out;
    for (const auto& e : annotations)
        if (e.kind == kind) out.push_back(e);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.span.start < b.span.start;
    });
    return out;
}

Recording make_recording(std::string participant_id, std::string center,
                         Channel spo2, Channel fhr,
                         std::vector<EventInterval> annotations,
                         const TimeSpan* span) {
    if (participant_id.empty())
        throw std::invalid_argument("participant_id must be non-empty");
    Recording rec;
    rec.participant_id = std::move(participant_id);
    rec.center = std::move(center);
    rec.spo2 = std::move(spo2);
    rec.fhr = std::move(fhr);
    rec.annotations = std::move(annotations);
    TimeSpan se = rec.spo2.extent(), fe = rec.fhr.extent();
    TimeSpan hull{std::min(se.start, fe.start), std::max(se.end, fe.end)};
    if (span) {
        if (span->start > hull.start || span->end < hull.end)
            throw std::invalid_argument("total_span must cover both channel extents");
        hull = *span;
    }
    rec.total_span = hull;
    return rec;
}

std::vector<EventInterval> merge_intervals(std::vector<EventInterval> events,
                                           double max_gap) {
    if (max_gap < 0.0) throw std::invalid_argument("max_gap must be >= 0");
    if (events.empty()) return events;
    for (const auto& e : events)
        if (e.kind != events.front().kind)
            throw std::invalid_argument("merge_intervals: mixed event kinds");

    std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
        return a.span.start < b.span.start;
    });
    std::vector<EventInterval> out;
    out.push_back(events.front());
    for (std::size_t i = 1; i < events.size(); ++i) {
        EventInterval& cur = out.back();
        const EventInterval& nxt = events[i];
        if (nxt.span.start - cur.span.end < max_gap) {
            cur.span.end = std::max(cur.span.end, nxt.span.end);
        } else {
            out.push_back(nxt);
        }
    }
    return out;
}

double total_duration(const std::vector<TimeSpan>& spans) {
    if (spans.empty()) return 0.0;
    std::vector<TimeSpan> s = spans;
    std::sort(s.begin(), s.end(),
              [](const TimeSpan& a, const TimeSpan& b) { return a.start < b.start; });
    double total = 0.0;
    double cs = s.front().start, ce = s.front().end;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i].start > ce) {
            total += ce - cs;
            cs = s[i].start;
            ce = s[i].end;
        } else {
            ce = std::max(ce, s[i].end);
        }
    }
    return total + (ce - cs);
}

double total_duration(const std::vector<EventInterval>& events) {
    std::vector<TimeSpan> spans;
    spans.reserve(events.size());
    for (const auto& e : events) spans.push_back(e.span);
    return total_duration(spans);
}

}  // namespace fetalink
