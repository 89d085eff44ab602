#pragma once

// Core time/signal/interval model shared by every analysis stage.
// Conventions: time is real-valued seconds from the recording epoch,
// intervals are half-open [start, end), durations are real seconds.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fetalink {

struct TimeSpan {
    double start = 0.0;
    double end = 0.0;

    TimeSpan() = default;
    TimeSpan(double s, double e) : start(s), end(e) {
        if (!(s >= 0.0) || !(e >= s))
            throw std::invalid_argument("TimeSpan requires 0 <= start <= end");
    }

    double duration() const { return end - start; }
};

/// Length of the intersection of two spans; 0 when disjoint or touching.
double overlap_duration(const TimeSpan& a, const TimeSpan& b);

/// Length of the union of two spans (measure, not hull).
double union_duration(const TimeSpan& a, const TimeSpan& b);

enum class SignalKind { SpO2, Fhr };
enum class EventKind { Hypoxia, Acceleration, Deceleration };
enum class EventSource { Annotated, Detected };

std::string to_string(SignalKind k);
std::string to_string(EventKind k);

/// One uniformly sampled signal with a validity mask. Sample i sits at
/// t0 + i / sample_rate. Out-of-physiological-range or non-finite values are
/// stored as-is but flagged invalid (SpO2 [50,100] %, FHR [50,240] bpm).
struct Channel {
    SignalKind kind = SignalKind::SpO2;
    double sample_rate = 1.0;
    double t0 = 0.0;
    std::vector<double> samples;
    std::vector<bool> valid;

    static Channel make(SignalKind kind, double sample_rate, double t0,
                        std::vector<double> samples);

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double time_at(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }

    /// [t0, t0 + n/rate): half-open extent covering all sample instants.
    TimeSpan extent() const;

    /// Indices of samples with time in [span.start, span.end] (closed) or
    /// [span.start, span.end) (half-open). Returns [first, last) index range;
    /// empty range when no sample falls inside.
    std::pair<std::size_t, std::size_t> sample_range(const TimeSpan& span,
                                                     bool closed_end) const;

    static bool in_physiological_range(SignalKind kind, double v);
};

struct EventInterval {
    EventKind kind = EventKind::Hypoxia;
    TimeSpan span;
    EventSource source = EventSource::Annotated;

    EventInterval() = default;
    EventInterval(EventKind k, TimeSpan s, EventSource src = EventSource::Annotated)
        : kind(k), span(s), source(src) {
        if (!(span.duration() > 0.0))
            throw std::invalid_argument("EventInterval requires positive duration");
    }
};

/// One time-synchronized overnight recording (SpO2 + FHR + annotations).
struct Recording {
    std::string participant_id;
    std::string center;
    Channel spo2;
    Channel fhr;
    std::vector<EventInterval> annotations;
    TimeSpan total_span;

    std::vector<EventInterval> events_of(EventKind kind) const;
};

/// Assemble and validate a recording; total_span is the hull of both
/// channel extents (or wider if `span` is given).
Recording make_recording(std::string participant_id, std::string center,
                         Channel spo2, Channel fhr,
                         std::vector<EventInterval> annotations,
                         const TimeSpan* span = nullptr);

/// Merge same-kind events whose gap is < max_gap into single events.
/// Output sorted by start; consecutive outputs have gap >= max_gap.
/// Throws on mixed kinds.
std::vector<EventInterval> merge_intervals(std::vector<EventInterval> events,
                                           double max_gap);

/// Duration of the union of the spans (overlaps counted once).
double total_duration(const std::vector<TimeSpan>& spans);
double total_duration(const std::vector<EventInterval>& events);

}  // namespace fetalink
