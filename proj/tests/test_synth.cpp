#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "fetalink/ingest.hpp"
#include "fetalink/link.hpp"
#include "fetalink/synth.hpp"

using namespace fetalink;

namespace {

SynthConfig base_config() {
    SynthConfig cfg;
    cfg.n_participants = 2;
    cfg.hours = 2.0;
    cfg.hypoxia_rate = 6.0;
    cfg.coupling_prob = 0.5;
    cfg.spontaneous_acc_rate = 3.0;
    cfg.noise_sd = 2.0;
    cfg.seed = 20250809;
    return cfg;
}

double linked_fraction(const SynthConfig& cfg, int participants, double window = 30.0) {
    int linked = 0, total = 0;
    for (int p = 0; p < participants; ++p) {
        SynthResult res = generate_recording(cfg, p);
        auto hyp = merge_intervals(res.recording.events_of(EventKind::Hypoxia), window);
        std::vector<EventInterval> acc = res.recording.events_of(EventKind::Acceleration);
        auto out = link_events(hyp, acc, window);
        std::set<std::pair<double, double>> linked_events;
        for (const auto& le : out) {
            if (le.link_kind == LinkKind::Acceleration)
                linked_events.insert({le.hypoxia.span.start, le.hypoxia.span.end});
        }
        linked += static_cast<int>(linked_events.size());
        total += static_cast<int>(hyp.size());
    }
    return total > 0 ? static_cast<double>(linked) / total : 0.0;
}

}  // namespace

TEST_CASE("generation is deterministic in (seed, participant_index)") {
    SynthConfig cfg = base_config();
    SynthResult a = generate_recording(cfg, 1);
    SynthResult b = generate_recording(cfg, 1);
    CHECK(a.recording.spo2.samples == b.recording.spo2.samples);
    CHECK(a.recording.fhr.samples == b.recording.fhr.samples);
    REQUIRE(a.recording.annotations.size() == b.recording.annotations.size());
    for (std::size_t i = 0; i < a.recording.annotations.size(); ++i) {
        CHECK(a.recording.annotations[i].span.start ==
              b.recording.annotations[i].span.start);
        CHECK(a.recording.annotations[i].span.end == b.recording.annotations[i].span.end);
    }
    // different participants differ
    SynthResult c = generate_recording(cfg, 2);
    CHECK(a.recording.spo2.samples != c.recording.spo2.samples);
}

TEST_CASE("cohort files on disk are byte-identical across reruns") {
    namespace fs = std::filesystem;
    SynthConfig cfg = base_config();
    cfg.n_participants = 2;
    cfg.hours = 0.5;
    auto dir1 = fs::temp_directory_path() / "fetalink_synth_a";
    auto dir2 = fs::temp_directory_path() / "fetalink_synth_b";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    auto s1 = write_synth_cohort(cfg, dir1.string());
    auto s2 = write_synth_cohort(cfg, dir2.string());
    CHECK(s1.total_hypoxic == s2.total_hypoxic);
    for (const auto& entry : fs::directory_iterator(dir1)) {
        auto other = dir2 / entry.path().filename();
        std::ifstream f1(entry.path(), std::ios::binary);
        std::ifstream f2(other, std::ios::binary);
        std::stringstream b1, b2;
        b1 << f1.rdbuf();
        b2 << f2.rdbuf();
        CHECK(b1.str() == b2.str());
    }
    // and the files load back as a valid cohort
    auto entries = load_manifest((dir1 / "manifest.json").string());
    REQUIRE(entries.size() == 2);
    Recording rec = load_recording(entries[0]);
    CHECK(rec.spo2.size() == 1800);
    CHECK(rec.fhr.size() == 7200);
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("full coupling with no noise links every hypoxic event") {
    SynthConfig cfg = base_config();
    cfg.coupling_prob = 1.0;
    cfg.spontaneous_acc_rate = 0.0;
    cfg.noise_sd = 0.0;
    CHECK(linked_fraction(cfg, 4) == doctest::Approx(1.0));
}

TEST_CASE("zero coupling matches the analytic coincidence rate") {
    SynthConfig cfg = base_config();
    cfg.coupling_prob = 0.0;
    cfg.spontaneous_acc_rate = 8.0;
    cfg.hours = 6.0;
    cfg.seed = 31337;

    const double rate_per_s = cfg.spontaneous_acc_rate / 3600.0;
    double expected = 0.0, var = 0.0;
    int linked = 0, total = 0;
    for (int p = 0; p < 12; ++p) {
        SynthResult res = generate_recording(cfg, p);
        auto hyp = merge_intervals(res.recording.events_of(EventKind::Hypoxia), 30.0);
        auto acc = res.recording.events_of(EventKind::Acceleration);
        auto out = link_events(hyp, acc, 30.0);
        std::set<std::pair<double, double>> linked_set;
        for (const auto& le : out)
            if (le.link_kind == LinkKind::Acceleration)
                linked_set.insert({le.hypoxia.span.start, le.hypoxia.span.end});
        linked += static_cast<int>(linked_set.size());
        total += static_cast<int>(hyp.size());
        for (const auto& h : hyp) {
            // P(>=1 spontaneous onset in [start, end + 30]) for a Poisson stream
            double w = h.span.duration() + 30.0;
            double pi = 1.0 - std::exp(-rate_per_s * w);
            expected += pi;
            var += pi * (1.0 - pi);
        }
    }
    REQUIRE(total > 100);
    double sigma = std::sqrt(var);
    CHECK(std::fabs(static_cast<double>(linked) - expected) <= 3.0 * sigma);
}

TEST_CASE("planted event count tracks the Poisson mean across seeds") {
    SynthConfig cfg = base_config();
    cfg.hypoxia_rate = 2.0;  // sparse: separation thinning is negligible
    cfg.hours = 8.0;
    int total = 0;
    const int n_seeds = 30;
    for (int seed = 0; seed < n_seeds; ++seed) {
        cfg.seed = 1000 + seed;
        total += generate_recording(cfg, 0).n_hypoxic;
    }
    double lambda = cfg.hypoxia_rate * cfg.hours * n_seeds;
    CHECK(std::fabs(total - lambda) <= 3.0 * std::sqrt(lambda) + 0.02 * lambda);
}

TEST_CASE("linked fraction is monotone in coupling probability") {
    SynthConfig cfg = base_config();
    cfg.spontaneous_acc_rate = 2.0;
    cfg.hours = 3.0;
    double sum0 = 0, sum5 = 0, sum1 = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        cfg.seed = seed;
        cfg.coupling_prob = 0.0;
        sum0 += linked_fraction(cfg, 2);
        cfg.coupling_prob = 0.5;
        sum5 += linked_fraction(cfg, 2);
        cfg.coupling_prob = 1.0;
        sum1 += linked_fraction(cfg, 2);
    }
    CHECK(sum0 < sum5);
    CHECK(sum5 < sum1);
    CHECK(sum1 == doctest::Approx(20.0));  // every event linked at coupling 1
}

TEST_CASE("planted events keep the merge-window separation") {
    SynthConfig cfg = base_config();
    cfg.hypoxia_rate = 20.0;  // dense: separation rule must still hold
    cfg.hours = 4.0;
    for (int p = 0; p < 3; ++p) {
        SynthResult res = generate_recording(cfg, p);
        auto hyp = res.recording.events_of(EventKind::Hypoxia);
        for (std::size_t i = 1; i < hyp.size(); ++i)
            CHECK(hyp[i].span.start - hyp[i - 1].span.end >= 35.0 - 1e-9);
        // merge at the link window is the identity on the ground truth
        auto merged = merge_intervals(hyp, 30.0);
        CHECK(merged.size() == hyp.size());
    }
}

TEST_CASE("config validation") {
    SynthConfig cfg = base_config();
    cfg.hours = 0.0;
    CHECK_THROWS_AS(generate_recording(cfg, 0), std::invalid_argument);
    cfg = base_config();
    cfg.coupling_prob = 1.5;
    CHECK_THROWS_AS(generate_recording(cfg, 0), std::invalid_argument);
    cfg = base_config();
    cfg.coupling_lag_range[1] = 40.0;  // outside the 30-s link window
    CHECK_THROWS_AS(generate_recording(cfg, 0), std::invalid_argument);
}
