#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fetalink/phase.hpp"
#include "fetalink/synth.hpp"
#include "helpers.hpp"

using namespace fetalink;

TEST_CASE("phase_windows tiling and clipping") {
    TimeSpan span{0, 1000};
    SUBCASE("interior event") {
        PhaseWindows w = phase_windows({50, 80}, span);
        CHECK(w.pre.start == 40.0);
        CHECK(w.pre.end == 50.0);
        CHECK(w.during.start == 50.0);
        CHECK(w.during.end == 80.0);
        CHECK(w.post.start == 80.0);
        CHECK(w.post.end == 90.0);
        CHECK_FALSE(w.pre_clipped);
        CHECK_FALSE(w.post_clipped);
    }
    SUBCASE("pre clipped at the recording start") {
        PhaseWindows w = phase_windows({5, 30}, span);
        CHECK(w.pre.start == 0.0);
        CHECK(w.pre.end == 5.0);
        CHECK(w.pre_clipped);
    }
    SUBCASE("post empty at the recording end") {
        PhaseWindows w = phase_windows({990, 1000}, span);
        CHECK(w.post.duration() == 0.0);
        CHECK(w.post_clipped);
    }
    SUBCASE("event outside the span is rejected") {
        CHECK_THROWS_AS(phase_windows({990, 1001}, span), std::invalid_argument);
    }
}

TEST_CASE("phase windows never overlap") {
    Rng rng(13331);
    TimeSpan span{0, 2000};
    for (int i = 0; i < 10000; ++i) {
        TimeSpan ev = testgen::random_event_span(rng, 2000.0);
        PhaseWindows w = phase_windows(ev, span);
        CHECK(overlap_duration(w.pre, w.during) == 0.0);
        CHECK(overlap_duration(w.during, w.post) == 0.0);
        CHECK(overlap_duration(w.pre, w.post) == 0.0);
    }
}

TEST_CASE("window_stats basics") {
    SUBCASE("constant window") {
        auto ch = Channel::make(SignalKind::Fhr, 1.0, 0.0, std::vector<double>(100, 140.0));
        PhaseStats st = window_stats(ch, {10, 20});
        CHECK(st.available);
        CHECK(st.mean == doctest::Approx(140.0));
        CHECK(st.std_dev == doctest::Approx(0.0));
        CHECK(st.cv == doctest::Approx(0.0));
        CHECK(st.n_valid == 10);
    }
    SUBCASE("two-point window, population std") {
        auto ch = Channel::make(SignalKind::Fhr, 1.0, 0.0, {130, 150});
        PhaseStats st = window_stats(ch, {0, 2});
        CHECK(st.mean == doctest::Approx(140.0));
        CHECK(st.std_dev == doctest::Approx(10.0));
        CHECK(st.cv == doctest::Approx(1.0 / 14.0));
    }
    SUBCASE("60 % invalid is unavailable") {
        std::vector<double> s(10, 140.0);
        for (int i = 0; i < 6; ++i) s[i] = 0.0;
        auto ch = Channel::make(SignalKind::Fhr, 1.0, 0.0, s);
        PhaseStats st = window_stats(ch, {0, 10});
        CHECK_FALSE(st.available);
        CHECK(std::isnan(st.mean));
    }
    SUBCASE("empty window is unavailable") {
        auto ch = Channel::make(SignalKind::Fhr, 1.0, 0.0, std::vector<double>(10, 140.0));
        PhaseStats st = window_stats(ch, {5, 5});
        CHECK_FALSE(st.available);
    }
}

TEST_CASE("window_stats is order-correct: shuffled copy recomputes identically") {
    Rng rng(40302);
    for (int rep = 0; rep < 300; ++rep) {
        int n = 20 + static_cast<int>(rng.uniform(0, 60));
        std::vector<double> s;
        for (int i = 0; i < n; ++i) s.push_back(rng.uniform(100, 180));
        auto ch = Channel::make(SignalKind::Fhr, 1.0, 0.0, s);
        PhaseStats a = window_stats(ch, {0.0, static_cast<double>(n)});
        // permuting the samples leaves mean/std unchanged; this pins the
        // indexing (no off-by-one window placement)
        std::vector<double> sh = s;
        for (std::size_t k = sh.size(); k > 1; --k)
            std::swap(sh[k - 1], sh[static_cast<std::size_t>(rng.uniform(0, k))]);
        auto ch2 = Channel::make(SignalKind::Fhr, 1.0, 0.0, sh);
        PhaseStats b = window_stats(ch2, {0.0, static_cast<double>(n)});
        CHECK(a.mean == doctest::Approx(b.mean).epsilon(1e-10));
        CHECK(a.std_dev == doctest::Approx(b.std_dev).epsilon(1e-9));
        if (a.mean > 0) CHECK(a.cv == doctest::Approx(a.std_dev / a.mean).epsilon(1e-12));
    }
}

TEST_CASE("boxplot_summary examples") {
    SUBCASE("1..5") {
        BoxSummary b = boxplot_summary({1, 2, 3, 4, 5});
        CHECK(b.q1 == doctest::Approx(2.0));
        CHECK(b.median == doctest::Approx(3.0));
        CHECK(b.q3 == doctest::Approx(4.0));
        CHECK(b.whisker_low == doctest::Approx(1.0));
        CHECK(b.whisker_high == doctest::Approx(5.0));
        CHECK(b.outliers.empty());
    }
    SUBCASE("outlier flagged") {
        BoxSummary b = boxplot_summary({1, 1, 1, 1, 100});
        REQUIRE(b.outliers.size() == 1);
        CHECK(b.outliers[0] == 100.0);
        CHECK(b.whisker_high == doctest::Approx(1.0));
    }
    SUBCASE("single value degenerates") {
        BoxSummary b = boxplot_summary({7});
        CHECK(b.q1 == 7.0);
        CHECK(b.median == 7.0);
        CHECK(b.q3 == 7.0);
        CHECK(b.whisker_low == 7.0);
        CHECK(b.whisker_high == 7.0);
    }
    SUBCASE("empty input rejected") {
        CHECK_THROWS_AS(boxplot_summary({}), std::invalid_argument);
    }
}

TEST_CASE("boxplot invariants on random data") {
    Rng rng(11550);
    for (int rep = 0; rep < 2000; ++rep) {
        int n = 1 + 2 * static_cast<int>(rng.uniform(0, 25));  // odd n
        std::vector<double> v;
        for (int i = 0; i < n; ++i) v.push_back(rng.normal(0, 10));
        BoxSummary b = boxplot_summary(v);
        CHECK(b.q1 <= b.median);
        CHECK(b.median <= b.q3);
        double lo = *std::min_element(v.begin(), v.end());
        double hi = *std::max_element(v.begin(), v.end());
        CHECK(b.whisker_low >= lo);
        CHECK(b.whisker_high <= hi);
        // adding the median leaves the median unchanged for odd n
        std::vector<double> v2 = v;
        v2.push_back(b.median);
        CHECK(boxplot_summary(v2).median == doctest::Approx(b.median).epsilon(1e-12));
    }
}

// ---------------------------------------------------------------------------
// cohort phase report on synthetic cohorts
// ---------------------------------------------------------------------------

namespace {

PhaseReport synth_phase_report(double coupling, std::uint64_t seed, int participants,
                               double hours, double spont_rate) {
    SynthConfig cfg;
    cfg.n_participants = participants;
    cfg.hours = hours;
    cfg.hypoxia_rate = 6.0;
    cfg.coupling_prob = coupling;
    cfg.spontaneous_acc_rate = spont_rate;
    cfg.noise_sd = 2.5;
    cfg.seed = seed;
    std::vector<SynthResult> cohort;
    std::vector<const Recording*> recs;
    std::vector<std::vector<EventInterval>> events;
    cohort.reserve(participants);
    for (int p = 0; p < participants; ++p)
        cohort.push_back(generate_recording(cfg, p));
    for (const auto& sr : cohort) {
        recs.push_back(&sr.recording);
        events.push_back(
            merge_intervals(sr.recording.events_of(EventKind::Hypoxia), 30.0));
    }
    return cohort_phase_report(recs, events);
}

}  // namespace

TEST_CASE("coupled cohort reproduces the rise-and-return phase pattern") {
    PhaseReport rep = synth_phase_report(0.8, 4242, 12, 4.0, 2.0);
    REQUIRE(rep.summary[0][0].has_value());
    REQUIRE(rep.summary[1][0].has_value());
    REQUIRE(rep.summary[2][0].has_value());
    double pre = rep.summary[0][0]->grand_mean;
    double during = rep.summary[1][0]->grand_mean;
    double post = rep.summary[2][0]->grand_mean;
    CHECK(during - pre > 3.0);
    CHECK(std::fabs(post - pre) < 2.0);
    // variability rises during the event
    CHECK(rep.summary[1][1]->grand_mean > rep.summary[0][1]->grand_mean);
}

TEST_CASE("zero-coupling cohort shows no phase effect over 20 seeds") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        PhaseReport rep = synth_phase_report(0.0, seed, 16, 4.0, 4.0);
        REQUIRE(rep.summary[0][0].has_value());
        REQUIRE(rep.summary[1][0].has_value());
        double pre = rep.summary[0][0]->grand_mean;
        double during = rep.summary[1][0]->grand_mean;
        CHECK(std::fabs(during - pre) < 1.0);
    }
}

TEST_CASE("cohort report flags an empty cohort") {
    std::vector<const Recording*> recs;
    std::vector<std::vector<EventInterval>> events;
    PhaseReport rep = cohort_phase_report(recs, events);
    CHECK_FALSE(rep.reason.empty());
    CHECK(rep.n_events_total == 0);
}
