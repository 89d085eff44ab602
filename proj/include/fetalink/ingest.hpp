#pragma once

// File ingestion: signal CSV, annotation CSV, cohort manifest, and the
// data-quality screen applied before any cohort statistics.
//
// Signal CSV:     `# kind=<spo2|fhr>, sample_rate=<Hz>, t0=<seconds>` then one
//                 value per line; blank line = missing sample. UTF-8, LF/CRLF.
// Annotation CSV: header `kind,start_s,end_s`; kind in {hypoxia, acc, dec}.
// Manifest:       JSON array of {participant_id, center, spo2_path, fhr_path,
//                 annotation_path}; paths resolve relative to the manifest.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fetalink/core.hpp"

namespace fetalink {

/// Parse a signal CSV stream. `name` is used in error messages; errors carry
/// the 1-based line number. Throws std::runtime_error on malformed input.
Channel parse_signal_csv(std::istream& in, SignalKind expected_kind,
                         const std::string& name = "signal");

/// Inverse of parse_signal_csv: shortest-round-trip numeric formatting,
/// blank lines for non-finite samples.
void write_signal_csv(std::ostream& os, const Channel& ch);

std::vector<EventInterval> parse_annotation_csv(std::istream& in,
                                                const std::string& name = "annotations");

void write_annotation_csv(std::ostream& os, const std::vector<EventInterval>& events);

struct ManifestEntry {
    std::string participant_id;
    std::string center;
    std::string spo2_path;
    std::string fhr_path;
    std::string annotation_path;
};

/// Load a cohort manifest; relative paths are resolved against the manifest
/// file's directory.
std::vector<ManifestEntry> load_manifest(const std::string& path);

Recording load_recording(const ManifestEntry& entry);

enum class ScreenReason {
    MissingChannel,
    ZeroSignalRun,
    ExcessInvalidFraction,
    AbnormalFluctuation,
};

std::string to_string(ScreenReason r);

struct ScreenPolicy {
    double max_invalid_run = 300.0;      // s of contiguous invalid/zero signal
    double max_invalid_fraction = 0.20;  // per channel
    double max_spo2_jump = 4.0;          // %/s between consecutive valid samples
};

struct ScreenReport {
    std::string participant_id;
    bool passed = false;
    std::vector<ScreenReason> reasons;
    std::map<std::string, double> metrics;
};

/// Deterministic data-quality screen; failures are reported, never thrown.
ScreenReport quality_screen(const Recording& rec, const ScreenPolicy& policy = {});

}  // namespace fetalink
