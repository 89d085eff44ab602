#pragma once

// Shared generators for property-style tests, built on the project RNG so
// test runs are reproducible.

#include <vector>

#include "fetalink/core.hpp"
#include "fetalink/rng.hpp"

namespace testgen {

inline fetalink::TimeSpan random_span(fetalink::Rng& rng, double max_t = 1000.0) {
    double a = rng.uniform(0.0, max_t);
    double b = rng.uniform(0.0, max_t);
    if (a > b) std::swap(a, b);
    return {a, b};
}

inline fetalink::TimeSpan random_event_span(fetalink::Rng& rng, double max_t = 1000.0) {
    double a = rng.uniform(0.0, max_t - 1.0);
    double d = rng.uniform(0.5, 60.0);
    return {a, std::min(a + d, max_t)};
}

inline std::vector<fetalink::EventInterval> random_events(fetalink::Rng& rng,
                                                          fetalink::EventKind kind,
                                                          int max_n = 12,
                                                          double max_t = 1000.0) {
    int n = static_cast<int>(rng.uniform(0.0, max_n + 1));
    std::vector<fetalink::EventInterval> out;
    for (int i = 0; i < n; ++i)
        out.emplace_back(kind, random_event_span(rng, max_t),
                         fetalink::EventSource::Annotated);
    return out;
}

}  // namespace testgen
