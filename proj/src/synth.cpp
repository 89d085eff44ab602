#include "fetalink/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "fetalink/ingest.hpp"
#include "fetalink/rng.hpp"

namespace fetalink {

namespace {

constexpr double kLinkWindow = 30.0;
constexpr double kMinSeparation = kLinkWindow + 5.0;  // keeps merge a no-op
constexpr double kCoupledTailMax = 2.0;               // s past the event end

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("SynthConfig: ") + msg);
}

struct Bump {  // trapezoidal FHR excursion
    double start, end, amplitude;  // amplitude < 0 for decelerations

    double value_at(double t) const {
        if (t <= start || t >= end) return 0.0;
        double ramp = std::min(3.0, (end - start) / 4.0);
        double up = std::min(t - start, ramp) / ramp;
        double down = std::min(end - t, ramp) / ramp;
        return amplitude * std::min({1.0, up, down});
    }
};

struct Desat {  // piecewise-linear V profile
    double start, end, drop;

    double deficit_at(double t) const {
        if (t <= start || t >= end) return 0.0;
        double d = end - start;
        double x = (t - start) / d;
        if (x < 1.0 / 3.0) return drop * 3.0 * x;
        if (x < 2.0 / 3.0) return drop;
        return drop * 3.0 * (1.0 - x);
    }
};

}  // namespace

void SynthConfig::validate() const {
    require(n_participants > 0, "n_participants must be positive");
    require(hours > 0.0, "hours must be positive");
    require(hypoxia_rate >= 0.0, "hypoxia_rate must be >= 0");
    require(duration_log_sigma >= 0.0, "duration_log_sigma must be >= 0");
    require(drop_range[0] <= drop_range[1] && drop_range[0] > 0, "drop_range invalid");
    require(coupling_prob >= 0.0 && coupling_prob <= 1.0, "coupling_prob in [0,1]");
    require(coupling_lag_range[0] <= coupling_lag_range[1], "coupling_lag_range ordered");
    require(coupling_lag_range[0] >= 0.0 && coupling_lag_range[1] <= kLinkWindow,
            "coupling_lag_range within [0, 30]");
    require(acc_amplitude_range[0] <= acc_amplitude_range[1] && acc_amplitude_range[0] > 0,
            "acc_amplitude_range invalid");
    require(acc_duration_range[0] <= acc_duration_range[1] && acc_duration_range[0] > 0,
            "acc_duration_range invalid");
    require(spontaneous_acc_rate >= 0.0, "spontaneous_acc_rate must be >= 0");
    require(spontaneous_dec_rate >= 0.0, "spontaneous_dec_rate must be >= 0");
    require(fhr_baseline_range[0] <= fhr_baseline_range[1] && fhr_baseline_range[0] > 0,
            "fhr_baseline_range invalid");
    require(noise_sd >= 0.0, "noise_sd must be >= 0");
}

SynthResult generate_recording(const SynthConfig& cfg, int participant_index) {
    cfg.validate();
    Rng rng(cfg.seed, static_cast<std::uint64_t>(participant_index));

    const double T = cfg.hours * 3600.0;
    const double spo2_base = rng.uniform(95.5, 97.5);
    const double fhr_base = rng.uniform(cfg.fhr_baseline_range[0], cfg.fhr_baseline_range[1]);

    // planted hypoxic events: Poisson arrivals thinned to the separation rule
    std::vector<Desat> desats;
    int coupled = 0;
    std::vector<Bump> bumps;
    if (cfg.hypoxia_rate > 0.0) {
        const double mean_gap = 3600.0 / cfg.hypoxia_rate;
        double t = rng.exponential(mean_gap);
        double last_end = -kMinSeparation;
        while (t < T) {
            double dur = rng.lognormal(cfg.duration_log_mu, cfg.duration_log_sigma);
            double drop = rng.uniform(cfg.drop_range[0], cfg.drop_range[1]);
            double p_link = cfg.duration_coupling
                                ? 1.0 / (1.0 + std::exp(-(cfg.coupling_beta0 +
                                                          cfg.coupling_beta1 * dur)))
                                : cfg.coupling_prob;
            bool link = rng.bernoulli(p_link);
            double lag = rng.uniform(cfg.coupling_lag_range[0], cfg.coupling_lag_range[1]);
            double tail = rng.uniform(0.0, kCoupledTailMax);
            double amp = rng.uniform(cfg.acc_amplitude_range[0], cfg.acc_amplitude_range[1]);
            // place only when separated from the previous event and clear of
            // the recording edges (room for baseline lookback + post window)
            if (t >= last_end + kMinSeparation && t >= kLinkWindow + 5.0 &&
                t + dur + kLinkWindow + 15.0 <= T) {
                desats.push_back({t, t + dur, drop});
                last_end = t + dur;
                if (link) {
                    double onset = t + lag;
                    double end = std::max(t + dur + tail, onset + 4.0);
                    bumps.push_back({onset, end, amp});
                    ++coupled;
                }
            }
            t += rng.exponential(mean_gap);
        }
    }

    auto poisson_bumps = [&](double rate_per_hour, double sign) {
        if (rate_per_hour <= 0.0) return;
        const double mean_gap = 3600.0 / rate_per_hour;
        double t = rng.exponential(mean_gap);
        while (t < T) {
            double dur = rng.uniform(cfg.acc_duration_range[0], cfg.acc_duration_range[1]);
            double amp = rng.uniform(cfg.acc_amplitude_range[0], cfg.acc_amplitude_range[1]);
            if (t + dur < T) bumps.push_back({t, t + dur, sign * amp});
            t += rng.exponential(mean_gap);
        }
    };
    poisson_bumps(cfg.spontaneous_acc_rate, +1.0);
    poisson_bumps(cfg.spontaneous_dec_rate, -1.0);

    // SpO2 at 1 Hz
    const double spo2_noise = cfg.noise_sd / 10.0;  // % per bpm of FHR noise
    auto n_spo2 = static_cast<std::size_t>(std::llround(T));
    std::vector<double> spo2(n_spo2);
    std::size_t di = 0;
    for (std::size_t i = 0; i < n_spo2; ++i) {
        double t = static_cast<double>(i);
        while (di < desats.size() && desats[di].end < t) ++di;
        double deficit = di < desats.size() ? desats[di].deficit_at(t) : 0.0;
        double v = spo2_base - deficit;
        if (spo2_noise > 0.0) v += rng.normal(0.0, spo2_noise);
        spo2[i] = std::min(v, 100.0);
    }

    // FHR at 4 Hz: OU baseline wander + excursions + white noise
    const double fhr_rate = 4.0;
    const double dt = 1.0 / fhr_rate;
    const double tau = 120.0;
    const double wander_sd = cfg.noise_sd;  // stationary sd of the wander
    auto n_fhr = static_cast<std::size_t>(std::llround(T * fhr_rate));
    std::vector<double> fhr(n_fhr);
    std::sort(bumps.begin(), bumps.end(),
              [](const Bump& a, const Bump& b) { return a.start < b.start; });
    double wander = 0.0;
    std::size_t bi = 0;
    for (std::size_t i = 0; i < n_fhr; ++i) {
        double t = static_cast<double>(i) * dt;
        wander += (-wander) * (dt / tau) +
                  wander_sd * std::sqrt(2.0 * dt / tau) * (wander_sd > 0 ? rng.normal() : 0.0);
        while (bi < bumps.size() && bumps[bi].end < t) ++bi;
        double exc = 0.0;
        for (std::size_t k = bi; k < bumps.size() && bumps[k].start < t; ++k)
            exc += bumps[k].value_at(t);
        double v = fhr_base + wander + exc;
        if (cfg.noise_sd > 0.0) v += rng.normal(0.0, cfg.noise_sd);
        fhr[i] = v;
    }

    // ground-truth annotations
    std::vector<EventInterval> ann;
    for (const auto& d : desats)
        ann.emplace_back(EventKind::Hypoxia, TimeSpan{d.start, d.end}, EventSource::Annotated);
    for (const auto& b : bumps)
        ann.emplace_back(b.amplitude > 0 ? EventKind::Acceleration : EventKind::Deceleration,
                         TimeSpan{b.start, b.end}, EventSource::Annotated);
    std::sort(ann.begin(), ann.end(), [](const EventInterval& a, const EventInterval& b) {
        if (a.span.start != b.span.start) return a.span.start < b.span.start;
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });

    char id[16];
    std::snprintf(id, sizeof id, "synth%03d", participant_index);

    SynthResult res;
    res.recording = make_recording(
        id, "synth", Channel::make(SignalKind::SpO2, 1.0, 0.0, std::move(spo2)),
        Channel::make(SignalKind::Fhr, fhr_rate, 0.0, std::move(fhr)), std::move(ann));
    res.n_hypoxic = static_cast<int>(desats.size());
    res.n_coupled = coupled;
    return res;
}

CohortSummary write_synth_cohort(const SynthConfig& cfg, const std::string& dir,
                                 const std::string& center_label) {
    cfg.validate();
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + dir);

    nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
    CohortSummary summary;
    summary.n_participants = cfg.n_participants;

    for (int p = 0; p < cfg.n_participants; ++p) {
        SynthResult res = generate_recording(cfg, p);
        summary.total_hypoxic += res.n_hypoxic;
        summary.total_coupled += res.n_coupled;

        char base[32];
        std::snprintf(base, sizeof base, "p%03d", p);
        std::string spo2_name = std::string(base) + ".spo2.csv";
        std::string fhr_name = std::string(base) + ".fhr.csv";
        std::string ann_name = std::string(base) + ".annot.csv";

        auto write = [&](const std::string& name, auto&& fn) {
            std::ofstream f(fs::path(dir) / name, std::ios::binary);
            if (!f) throw std::runtime_error("cannot write: " + name);
            fn(f);
        };
        write(spo2_name, [&](std::ostream& os) { write_signal_csv(os, res.recording.spo2); });
        write(fhr_name, [&](std::ostream& os) { write_signal_csv(os, res.recording.fhr); });
        write(ann_name,
              [&](std::ostream& os) { write_annotation_csv(os, res.recording.annotations); });

        manifest.push_back({{"participant_id", res.recording.participant_id},
                            {"center", center_label},
                            {"spo2_path", spo2_name},
                            {"fhr_path", fhr_name},
                            {"annotation_path", ann_name}});
    }

    auto mpath = fs::path(dir) / "manifest.json";
    std::ofstream mf(mpath, std::ios::binary);
    if (!mf) throw std::runtime_error("cannot write manifest.json");
    mf << manifest.dump(2) << "\n";
    summary.manifest_path = mpath.string();
    return summary;
}

}  // namespace fetalink
