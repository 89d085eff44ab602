#pragma once

// Inferential statistics: duration-weighted chi-square on 2x2 contingency
// tables, t-tests from summary statistics, and univariate logistic GLM via
// iteratively reweighted least squares.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fetalink/core.hpp"
#include "fetalink/link.hpp"

namespace fetalink {

/// Duration-weighted 2x2 table, all cells in seconds.
/// a1 linked-event time, a2 hypoxia-only time, b1 FHR-event-only time,
/// b2 remainder of the recording.
struct ContingencyTable {
    double a1 = 0.0;
    double a2 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;

    double grand_total() const { return a1 + a2 + b1 + b2; }
    double odds_ratio() const { return (a1 * b2) / (a2 * b1); }
};

enum class TestKind { ChiSquare, WelchT, PooledT };

struct TestResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
    TestKind kind = TestKind::ChiSquare;
};

/// Build the per-recording table for one FHR event kind.
/// a1 = union of linked-event spans [h.start, h.start + linked_duration] over
/// pairings of that kind; a2 = hypoxic events with no pairing of that kind;
/// b1 = FHR events of that kind in no pairing; b2 = total - a1 - a2 - b1
/// (clamped at 0). `linked` is the full pairing list, `fhr_events` the
/// recording's FHR events of the given kind.
ContingencyTable contingency_from_recording(const Recording& recording,
                                            const std::vector<LinkedEvent>& linked,
                                            const std::vector<EventInterval>& fhr_events,
                                            EventKind kind);

/// Cell-wise sum; throws on an empty list.
ContingencyTable aggregate_tables(const std::vector<ContingencyTable>& tables);

/// Pearson chi-square, df = 1, no continuity correction. Throws on a
/// degenerate table (any expected cell == 0).
TestResult chi_square_test(const ContingencyTable& t);

/// Two-sided Welch t-test from group summaries (mean, sd, n per group).
TestResult welch_t_from_summary(double m1, double s1, double n1,
                                double m2, double s2, double n2);

/// Two-sided pooled-variance t-test from group summaries.
TestResult pooled_t_from_summary(double m1, double s1, double n1,
                                 double m2, double s2, double n2);

struct GlmFit {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double se0 = 0.0;
    double se1 = 0.0;
    double z1 = 0.0;
    double p1 = 1.0;
    bool converged = false;
    int iterations = 0;
    int n = 0;
};

/// Univariate logistic regression logit(p) = b0 + b1 * x, maximum likelihood
/// via IRLS. Convergence: max |delta beta| < 1e-8 within 100 iterations.
/// Standard errors from the inverse Fisher information; z = b1/se1; p
/// two-sided normal. Complete separation (|beta| > 30 or deviance < 1e-8)
/// yields converged = false with NaN se/z/p. Throws on constant x,
/// single-class y, or n < 2.
GlmFit fit_logistic_univariate(const std::vector<double>& x,
                               const std::vector<int>& y);

enum class LinkOutcome { AnyLink, AccelerationLink, DecelerationLink };

std::string to_string(LinkOutcome o);

struct GlmRow {
    std::string feature;
    std::optional<GlmFit> fit;
    std::string error;  // set when the row failed; other rows unaffected
};

/// One univariate fit per feature (duration, nadir, drop, burden_area)
/// against the chosen binary outcome. Pairings are deduplicated to one row
/// per distinct hypoxic event; events without features are skipped.
std::array<GlmRow, 4> glm_feature_screen(const std::vector<LinkedEvent>& linked,
                                         LinkOutcome outcome);

}  // namespace fetalink
