#pragma once

// Linked-event construction: pairing maternal hypoxic events with FHR
// accelerations/decelerations under the 30-s window rule, the linked-event
// duration, and per-event hypoxic characteristics (nadir, drop, burden area).

#include <optional>
#include <ostream>
#include <vector>

#include "fetalink/core.hpp"

namespace fetalink {

struct HypoxicFeatures {
    double duration = 0.0;             // event length, s
    double nadir = 0.0;                // minimum SpO2 during event, %
    double drop = 0.0;                 // baseline - nadir, %
    std::optional<double> burden_area; // integral of deficit below baseline, %*s
    double baseline = 0.0;             // pre-event baseline, %
};

enum class LinkKind { None, Acceleration, Deceleration };

std::string to_string(LinkKind k);

/// One hypoxic event paired with at most one FHR event. A hypoxic event that
/// links to several FHR events yields several LinkedEvents (one per pairing);
/// an unlinked hypoxic event appears once with link_kind == None.
struct LinkedEvent {
    EventInterval hypoxia;
    std::optional<EventInterval> fhr_event;
    LinkKind link_kind = LinkKind::None;
    double linked_duration = 0.0;
    std::optional<HypoxicFeatures> features;
};

/// Duration of a linked event: max(fhr.end - h.start, h.end - h.start).
double linked_duration(const TimeSpan& h, const TimeSpan& fhr);

/// Pair hypoxic events with FHR events whose onset lies in
/// [h.start, h.end + window] (bounds inclusive). `hypoxic` is expected to be
/// pre-merged with merge_intervals(window). Features are left unset; see
/// compute_features. Throws on negative window.
std::vector<LinkedEvent> link_events(const std::vector<EventInterval>& hypoxic,
                                     const std::vector<EventInterval>& fhr_events,
                                     double window = 30.0);

struct BurdenOptions {
    double baseline_lookback = 30.0;  // s before event onset used for S_baseline
    enum class Method { Simpson, Trapezoid } method = Method::Simpson;
    std::optional<double> baseline_override;  // pins S_baseline, skipping the lookback
};

/// Integral of max(0, S_baseline - S(t)) over the event, in %*s.
/// S_baseline = max valid SpO2 sample in the lookback window before onset.
/// Composite Simpson on the uniform sample grid; an odd interval count gets
/// Simpson on the leading even block plus a trapezoid on the final interval.
/// Throws when fewer than 2 valid samples fall inside the event.
double hypoxic_burden_area(const Channel& spo2, const TimeSpan& event,
                           const BurdenOptions& opts = {});

/// duration / nadir / drop / burden for one hypoxic event. Throws when no
/// valid SpO2 sample falls inside the event; burden alone degrades to
/// nullopt when it has < 2 valid samples.
HypoxicFeatures event_features(const Channel& spo2, const TimeSpan& event,
                               const BurdenOptions& opts = {});

/// Stamp features onto every pairing (computed once per distinct hypoxic
/// event). Events without any valid SpO2 sample keep features == nullopt.
/// Returns the number of unusable hypoxic events.
int compute_features(std::vector<LinkedEvent>& linked, const Channel& spo2,
                     const BurdenOptions& opts = {});

/// CSV export: participant_id, link_kind, h_start, h_end, fhr_start, fhr_end,
/// linked_duration, nadir, drop, duration, burden.
void write_linked_events_csv(std::ostream& os, const std::string& participant_id,
                             const std::vector<LinkedEvent>& linked,
                             bool header = true);

}  // namespace fetalink
