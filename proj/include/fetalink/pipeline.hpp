#pragma once

// Cohort orchestration: validate -> (detect) -> link -> analyze -> report.
// The CLI is a thin wrapper over these entry points; tests drive them
// directly as well as through files on disk.

#include <optional>
#include <string>
#include <vector>

#include "fetalink/detect.hpp"
#include "fetalink/ingest.hpp"
#include "fetalink/link.hpp"
#include "fetalink/phase.hpp"
#include "fetalink/stats.hpp"

namespace fetalink {

struct RunConfig {
    std::string manifest_path;
    std::string output_dir;
    ScreenPolicy screen;
    DesatParams desat;
    FhrParams fhr_params;
    BurdenOptions burden;
    double link_window = 30.0;
    bool from_annotations = true;  // false: run detectors for missing kinds
    bool chi_square = true;
    bool glm = true;
    bool phase = true;
    bool write_csv = true;
    bool write_svg = false;
    bool timestamp = true;  // disable for byte-identical reruns
};

struct ParticipantAnalysis {
    ManifestEntry entry;
    Recording recording;
    ScreenReport screen;
    bool has_fhr_data = false;             // any acc/dec event present
    std::vector<EventInterval> hypoxic;    // merged
    std::vector<EventInterval> fhr_events; // acc + dec, sorted
    std::vector<LinkedEvent> linked;
    int unusable_features = 0;
};

struct KindAnalysis {
    EventKind kind = EventKind::Acceleration;
    ContingencyTable aggregate;
    std::optional<TestResult> test;
    std::string test_error;
    int participants_included = 0;
    int participants_excluded = 0;  // screened out or lacking FHR data
};

struct FeatureSummary {
    std::string feature;
    // parallel to `centers` below
    std::vector<double> mean, sd;
    std::vector<int> n;
    std::optional<TestResult> welch;  // set when exactly two centers
};

struct AnalysisBundle {
    std::vector<ScreenReport> screens;
    std::vector<ParticipantAnalysis> participants;  // screened-in only
    std::vector<KindAnalysis> by_kind;              // acceleration, deceleration
    std::vector<std::pair<std::string, std::array<GlmRow, 4>>> glm;  // per outcome
    std::vector<std::string> centers;
    std::vector<FeatureSummary> features;
    PhaseReport phase;
    int n_passed = 0;
    int n_failed_screen = 0;
};

/// Screen every manifest entry. Unreadable files raise std::runtime_error
/// with per-file diagnostics; screening failures are data, not errors.
std::vector<ScreenReport> run_validate(const std::string& manifest_path,
                                       const ScreenPolicy& policy = {});

/// Full analysis of a cohort. Throws when no participant passes screening.
AnalysisBundle run_analyze(const RunConfig& config);

/// Serialize bundle artifacts into config.output_dir:
/// screen.json, chi_square.json, glm.json, features.csv, linked_events.csv,
/// phase.json and optionally phase.svg.
void write_reports(const AnalysisBundle& bundle, const RunConfig& config);

void write_screen_json(const std::vector<ScreenReport>& reports,
                       const std::string& path, bool timestamp);

}  // namespace fetalink
