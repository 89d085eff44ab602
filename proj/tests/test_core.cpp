#include <doctest.h>

#include <algorithm>

#include "fetalink/core.hpp"
#include "helpers.hpp"

using namespace fetalink;

TEST_CASE("overlap_duration basic cases") {
    CHECK(overlap_duration({0, 10}, {5, 20}) == doctest::Approx(5));
    CHECK(overlap_duration({0, 10}, {10, 20}) == 0.0);  // half-open touching
    CHECK(overlap_duration({3, 7}, {0, 100}) == doctest::Approx(4));
    CHECK(overlap_duration({5, 20}, {0, 10}) == doctest::Approx(5));  // symmetric
}

TEST_CASE("TimeSpan validation") {
    CHECK_THROWS_AS(TimeSpan(5, 4), std::invalid_argument);
    CHECK_THROWS_AS(TimeSpan(-1, 4), std::invalid_argument);
    CHECK(TimeSpan(3, 3).duration() == 0.0);
}

TEST_CASE("overlap + union = sum of durations (interval algebra identity)") {
    Rng rng(20240811);
    for (int i = 0; i < 10000; ++i) {
        TimeSpan a = testgen::random_span(rng);
        TimeSpan b = testgen::random_span(rng);
        double lhs = overlap_duration(a, b) + union_duration(a, b);
        CHECK(lhs == doctest::Approx(a.duration() + b.duration()).epsilon(1e-12));
        CHECK(overlap_duration(a, b) == overlap_duration(b, a));
        CHECK(overlap_duration(a, b) >= 0.0);
    }
}

TEST_CASE("merge_intervals examples") {
    auto ev = [](double a, double b) {
        return EventInterval(EventKind::Hypoxia, {a, b});
    };
    SUBCASE("gap below threshold merges") {
        auto out = merge_intervals({ev(0, 10), ev(35, 40)}, 30.0);
        REQUIRE(out.size() == 1);
        CHECK(out[0].span.start == 0.0);
        CHECK(out[0].span.end == 40.0);
    }
    SUBCASE("gap at threshold stays") {
        auto out = merge_intervals({ev(0, 10), ev(45, 50)}, 30.0);
        REQUIRE(out.size() == 2);
        CHECK(out[1].span.start == 45.0);
    }
    SUBCASE("empty list is identity") {
        CHECK(merge_intervals({}, 30.0).empty());
    }
    SUBCASE("mixed kinds rejected") {
        std::vector<EventInterval> mixed = {
            ev(0, 10), EventInterval(EventKind::Acceleration, {20, 30})};
        CHECK_THROWS_AS(merge_intervals(mixed, 30.0), std::invalid_argument);
    }
}

TEST_CASE("merge_intervals is idempotent and covers the input") {
    Rng rng(7771);
    for (int i = 0; i < 10000; ++i) {
        auto events = testgen::random_events(rng, EventKind::Hypoxia);
        double gap = rng.uniform(0.0, 60.0);
        auto merged = merge_intervals(events, gap);
        auto twice = merge_intervals(merged, gap);
        REQUIRE(twice.size() == merged.size());
        for (std::size_t k = 0; k < merged.size(); ++k) {
            CHECK(twice[k].span.start == merged[k].span.start);
            CHECK(twice[k].span.end == merged[k].span.end);
        }
        for (std::size_t k = 1; k < merged.size(); ++k)
            CHECK(merged[k].span.start - merged[k - 1].span.end >= gap);
        CHECK(total_duration(merged) >= total_duration(events) - 1e-9);
        for (const auto& e : events) {
            bool covered = std::any_of(merged.begin(), merged.end(), [&](const auto& m) {
                return m.span.start <= e.span.start && e.span.end <= m.span.end;
            });
            CHECK(covered);
        }
    }
}

TEST_CASE("total_duration examples") {
    auto ev = [](double a, double b) {
        return EventInterval(EventKind::Acceleration, {a, b});
    };
    CHECK(total_duration({ev(0, 10), ev(20, 25)}) == doctest::Approx(15));
    CHECK(total_duration({ev(0, 10), ev(5, 12)}) == doctest::Approx(12));  // union
    CHECK(total_duration(std::vector<EventInterval>{}) == 0.0);
}

TEST_CASE("total_duration is permutation invariant") {
    Rng rng(99);
    for (int i = 0; i < 10000; ++i) {
        auto events = testgen::random_events(rng, EventKind::Acceleration);
        double d1 = total_duration(events);
        for (std::size_t k = events.size(); k > 1; --k) {
            auto j = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(k)));
            std::swap(events[k - 1], events[j]);
        }
        CHECK(total_duration(events) == doctest::Approx(d1).epsilon(1e-12));
    }
}

TEST_CASE("Channel validity mask and sample ranges") {
    auto ch = Channel::make(SignalKind::Fhr, 4.0, 0.0, {140, 300, 40, 150, 155});
    CHECK(ch.valid[0]);
    CHECK_FALSE(ch.valid[1]);       // above 240
    CHECK_FALSE(ch.valid[2]);       // below 50
    CHECK(ch.samples[1] == 300.0);  // stored as-is

    auto [f, l] = ch.sample_range(TimeSpan{0.25, 1.0}, true);
    CHECK(f == 1);
    CHECK(l == 5);  // closed end includes t = 1.0
    auto [f2, l2] = ch.sample_range(TimeSpan{0.25, 1.0}, false);
    CHECK(f2 == 1);
    CHECK(l2 == 4);  // half-open excludes t = 1.0

    CHECK_THROWS_AS(Channel::make(SignalKind::SpO2, 0.0, 0.0, {97.0}),
                    std::invalid_argument);
}

TEST_CASE("make_recording validates ids and span coverage") {
    auto spo2 = Channel::make(SignalKind::SpO2, 1.0, 0.0, {97, 97, 97});
    auto fhr = Channel::make(SignalKind::Fhr, 4.0, 0.0, std::vector<double>(12, 140.0));
    CHECK_THROWS_AS(make_recording("", "c", spo2, fhr, {}), std::invalid_argument);
    auto rec = make_recording("p1", "c", spo2, fhr, {});
    CHECK(rec.total_span.start == 0.0);
    CHECK(rec.total_span.end == doctest::Approx(3.0));
    TimeSpan narrow{0.0, 2.0};
    CHECK_THROWS_AS(make_recording("p1", "c", spo2, fhr, {}, &narrow),
                    std::invalid_argument);
}
