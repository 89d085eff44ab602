#pragma once

// Fallback event detectors for recordings without manual scoring.
// Annotated events always take precedence over detected ones downstream.

#include <vector>

#include "fetalink/core.hpp"

namespace fetalink {

struct DesatParams {
    double drop_threshold = 3.0;    // % below running baseline
    double baseline_window = 120.0; // s of lookback for the running max
    double resat_margin = 1.0;      // % from baseline counted as recovered
    double min_duration = 10.0;     // s the deficit must stay >= threshold
    double merge_gap = 30.0;        // s; closer events are merged

    void validate() const;
};

struct FhrParams {
    double baseline_window = 600.0; // s, centered rolling-median window
    double excursion = 15.0;        // bpm from baseline
    double min_duration = 15.0;     // s
    double max_duration = 600.0;    // s; longer excursions are baseline shifts

    void validate() const;
};

/// Detect SpO2 desaturations: deficit >= drop_threshold below the running
/// baseline (max of valid samples over the preceding baseline_window) for
/// >= min_duration. The core crossing is widened to the start of the decline
/// and the end of the resaturation so boundaries land on the physiological
/// event, then merged with merge_intervals(merge_gap). source = Detected.
std::vector<EventInterval> detect_desaturations(const Channel& spo2,
                                                const DesatParams& params = {});

/// Detect FHR accelerations/decelerations: excursion >= `excursion` bpm from
/// a centered rolling-median baseline for [min_duration, max_duration), with
/// the same boundary widening to the baseline departure/return.
std::vector<EventInterval> detect_fhr_events(const Channel& fhr,
                                             const FhrParams& params = {});

}  // namespace fetalink
