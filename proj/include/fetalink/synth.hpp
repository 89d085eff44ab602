#pragma once

// Deterministic synthetic cohort generator. Every pipeline stage is validated
// against cohorts whose ground truth is known by construction.
//
// Construction guarantees relied on by tests:
//  - planted hypoxic events are separated by >= merge-window + 5 s, so
//    merge_intervals(30) is the identity on the ground truth;
//  - a coupled acceleration onsets at (event start + lag) with lag <= 30 s and
//    ends at (event end + tail), tail <= 2 s, so it links to its own event and
//    to no other, and the during-event window carries the excursion while the
//    10-s post window is nearly clean;
//  - with spontaneous_acc_rate = 0 the link outcome of each event is an
//    independent Bernoulli draw of its coupling probability.

#include <cstdint>
#include <string>
#include <vector>

#include "fetalink/core.hpp"

namespace fetalink {

struct SynthConfig {
    int n_participants = 10;
    double hours = 8.0;
    double hypoxia_rate = 6.0;          // events/hour
    double duration_log_mu = 3.4012;    // ln seconds; exp(3.4012) ~ 30 s
    double duration_log_sigma = 0.5;
    double drop_range[2] = {4.0, 8.0};  // % below baseline
    double coupling_prob = 0.5;         // P(acceleration | hypoxic event)
    double coupling_lag_range[2] = {2.0, 8.0};   // s from event onset, within [0, 30]
    double acc_amplitude_range[2] = {10.0, 25.0};  // bpm
    double acc_duration_range[2] = {15.0, 60.0};   // s, spontaneous events
    double spontaneous_acc_rate = 0.0;  // events/hour
    double spontaneous_dec_rate = 0.0;  // events/hour (mirrored accelerations)
    double fhr_baseline_range[2] = {130.0, 145.0};  // bpm
    double noise_sd = 2.0;              // bpm white noise; also scales slow wander
    std::uint64_t seed = 1;

    // when true, per-event coupling probability is
    // logistic(coupling_beta0 + coupling_beta1 * duration) instead of
    // coupling_prob (generative ground truth for the GLM checks)
    bool duration_coupling = false;
    double coupling_beta0 = -1.0;
    double coupling_beta1 = 0.02;

    void validate() const;
};

struct SynthResult {
    Recording recording;
    int n_hypoxic = 0;   // planted hypoxic events
    int n_coupled = 0;   // those that triggered an acceleration
};

/// Generate one participant's recording, fully determined by
/// (config.seed, participant_index). SpO2 at 1 Hz with piecewise-linear
/// V-shaped desaturations (descend/hold/recover thirds); FHR at 4 Hz as a
/// mean-reverting baseline plus trapezoidal excursions plus white noise.
/// Ground truth is returned as Annotated events.
SynthResult generate_recording(const SynthConfig& config, int participant_index);

struct CohortSummary {
    std::string manifest_path;
    int n_participants = 0;
    int total_hypoxic = 0;
    int total_coupled = 0;
};

/// Write a full cohort (signal + annotation CSVs and manifest.json) under
/// `dir` using the ingest module's formats. Deterministic bytes.
CohortSummary write_synth_cohort(const SynthConfig& config, const std::string& dir,
                                 const std::string& center_label = "synth");

}  // namespace fetalink
