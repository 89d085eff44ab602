#pragma once

// Pre/during/post-event FHR statistics and box-plot summaries.

#include <optional>
#include <string>
#include <vector>

#include "fetalink/core.hpp"

namespace fetalink {

enum class Phase { Pre, During, Post };

std::string to_string(Phase p);

struct PhaseStats {
    Phase phase = Phase::During;
    double mean = 0.0;
    double std_dev = 0.0;  // population (divisor n)
    double cv = 0.0;       // std/mean; NaN when mean <= 0
    int n_valid = 0;
    double valid_fraction = 0.0;
    bool available = false;  // false when window empty or valid fraction < policy
};

struct PhaseWindows {
    TimeSpan pre;
    TimeSpan during;
    TimeSpan post;
    bool pre_clipped = false;
    bool post_clipped = false;
};

/// pre = [start-margin, start), during = [start, end), post = [end, end+margin),
/// with pre/post clipped to the recording span (clipping flagged).
/// Throws when the event is not inside the recording span.
PhaseWindows phase_windows(const TimeSpan& event, const TimeSpan& recording_span,
                           double margin = 10.0);

/// Mean/std/cv over valid samples in the half-open window. The std divisor is
/// n (population) by default; pass sample_std for n-1. Marked unavailable when
/// the window holds no samples or the valid fraction falls below
/// min_valid_fraction.
PhaseStats window_stats(const Channel& fhr, const TimeSpan& window,
                        Phase phase = Phase::During, double min_valid_fraction = 0.5,
                        bool sample_std = false);

struct BoxSummary {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    std::vector<double> outliers;
    int n = 0;
};

/// Tukey box: quartiles by linear interpolation between order statistics,
/// whiskers at the most extreme data within 1.5 IQR. Throws on empty input.
BoxSummary boxplot_summary(std::vector<double> values);

struct PhaseMetricSummary {
    BoxSummary box;
    double grand_mean = 0.0;
};

struct PhaseReport {
    // [phase][metric]; metrics: 0 = mean FHR, 1 = std FHR, 2 = cv FHR
    std::optional<PhaseMetricSummary> summary[3][3];
    int n_events_total = 0;
    int n_events_used[3] = {0, 0, 0};  // per phase
    int n_clipped_pre = 0;
    int n_clipped_post = 0;
    std::string reason;  // set when no usable event produced statistics

    static constexpr const char* metric_names[3] = {"mean", "std", "cv"};
};

/// Aggregate per-event phase statistics across a cohort. `events_per_recording`
/// holds each recording's (merged) hypoxic events.
PhaseReport cohort_phase_report(
    const std::vector<const Recording*>& recordings,
    const std::vector<std::vector<EventInterval>>& events_per_recording,
    double margin = 10.0, double min_valid_fraction = 0.5);

}  // namespace fetalink
