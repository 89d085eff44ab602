#include "fetalink/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "fetalink/special.hpp"

namespace fetalink {

ContingencyTable contingency_from_recording(const Recording& recording,
                                            const std::vector<LinkedEvent>& linked,
                                            const std::vector<EventInterval>& fhr_events,
                                            EventKind kind) {
    if (kind == EventKind::Hypoxia)
        throw std::invalid_argument("contingency kind must be Acceleration or Deceleration");
    const LinkKind want = kind == EventKind::Acceleration ? LinkKind::Acceleration
                                                          : LinkKind::Deceleration;

    // spans of linked events of this kind, keyed back to their hypoxic event
    std::vector<TimeSpan> linked_spans;
    std::map<std::pair<double, double>, bool> hyp_linked;  // hypoxia span -> has link of kind
    std::vector<TimeSpan> linked_fhr;                      // FHR events consumed by a pairing
    for (const auto& le : linked) {
        auto key = std::make_pair(le.hypoxia.span.start, le.hypoxia.span.end);
        hyp_linked.emplace(key, false);
        if (le.link_kind != want) continue;
        hyp_linked[key] = true;
        linked_spans.emplace_back(le.hypoxia.span.start,
                                  le.hypoxia.span.start + le.linked_duration);
        linked_fhr.push_back(le.fhr_event->span);
    }

    ContingencyTable t;
    t.a1 = total_duration(linked_spans);
    for (const auto& [key, has] : hyp_linked)
        if (!has) t.a2 += key.second - key.first;

    // FHR events of this kind not part of any pairing of this kind
    std::vector<TimeSpan> unlinked_fhr;
    for (const auto& e : fhr_events) {
        if (e.kind != kind) continue;
        bool used = std::any_of(linked_fhr.begin(), linked_fhr.end(), [&](const TimeSpan& s) {
            return s.start == e.span.start && s.end == e.span.end;
        });
        if (!used) unlinked_fhr.push_back(e.span);
    }
    t.b1 = total_duration(unlinked_fhr);
    t.b2 = std::max(0.0, recording.total_span.duration() - t.a1 - t.a2 - t.b1);
    return t;
}

ContingencyTable aggregate_tables(const std::vector<ContingencyTable>& tables) {
    if (tables.empty()) throw std::invalid_argument("aggregate_tables: empty list");
    ContingencyTable out;
    for (const auto& t : tables) {
        out.a1 += t.a1;
        out.a2 += t.a2;
        out.b1 += t.b1;
        out.b2 += t.b2;
    }
    return out;
}

TestResult chi_square_test(const ContingencyTable& t) {
    const double n = t.grand_total();
    if (!(n > 0.0)) throw std::invalid_argument("chi_square_test: empty table");
    const double r1 = t.a1 + t.a2, r2 = t.b1 + t.b2;
    const double c1 = t.a1 + t.b1, c2 = t.a2 + t.b2;
    const double e[4] = {r1 * c1 / n, r1 * c2 / n, r2 * c1 / n, r2 * c2 / n};
    const double o[4] = {t.a1, t.a2, t.b1, t.b2};
    double chi2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        if (!(e[i] > 0.0))
            throw std::runtime_error("chi_square_test: degenerate table (expected cell = 0)");
        chi2 += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
    }
    return {chi2, 1.0, chisq1_sf(chi2), TestKind::ChiSquare};
}

namespace {

TestResult t_from_summary(double m1, double s1, double n1, double m2, double s2,
                          double n2, bool welch) {
    if (!(n1 >= 2.0) || !(n2 >= 2.0))
        throw std::invalid_argument("t test requires n >= 2 per group");
    if (s1 < 0.0 || s2 < 0.0) throw std::invalid_argument("t test: negative sd");
    if (s1 == 0.0 && s2 == 0.0) {
        if (m1 == m2)
            return {0.0, n1 + n2 - 2.0, 1.0, welch ? TestKind::WelchT : TestKind::PooledT};
        throw std::runtime_error("t test: zero variance with unequal means");
    }
    double t, df;
    if (welch) {
        double v1 = s1 * s1 / n1, v2 = s2 * s2 / n2;
        t = (m1 - m2) / std::sqrt(v1 + v2);
        df = (v1 + v2) * (v1 + v2) /
             (v1 * v1 / (n1 - 1.0) + v2 * v2 / (n2 - 1.0));
    } else {
        double sp2 = ((n1 - 1.0) * s1 * s1 + (n2 - 1.0) * s2 * s2) / (n1 + n2 - 2.0);
        t = (m1 - m2) / std::sqrt(sp2 * (1.0 / n1 + 1.0 / n2));
        df = n1 + n2 - 2.0;
    }
    double p = 2.0 * student_t_sf(std::fabs(t), df);
    return {t, df, std::min(p, 1.0), welch ? TestKind::WelchT : TestKind::PooledT};
}

}  // namespace

TestResult welch_t_from_summary(double m1, double s1, double n1, double m2,
                                double s2, double n2) {
    return t_from_summary(m1, s1, n1, m2, s2, n2, true);
}

TestResult pooled_t_from_summary(double m1, double s1, double n1, double m2,
                                 double s2, double n2) {
    return t_from_summary(m1, s1, n1, m2, s2, n2, false);
}

GlmFit fit_logistic_univariate(const std::vector<double>& x,
                               const std::vector<int>& y) {
    const std::size_t n = x.size();
    if (y.size() != n) throw std::invalid_argument("glm: x and y length mismatch");
    if (n < 2) throw std::invalid_argument("glm: need at least 2 observations");

    double ymean = 0.0;
    std::size_t ones = 0;
    for (int v : y) {
        if (v != 0 && v != 1) throw std::invalid_argument("glm: y must be 0/1");
        ones += static_cast<std::size_t>(v);
    }
    if (ones == 0 || ones == n)
        throw std::runtime_error("glm: single-class outcome");
    ymean = static_cast<double>(ones) / static_cast<double>(n);

    double xmin = *std::min_element(x.begin(), x.end());
    double xmax = *std::max_element(x.begin(), x.end());
    if (!(xmax > xmin))
        throw std::runtime_error("glm: singular design (constant x)");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    GlmFit fit;
    fit.n = static_cast<int>(n);
    double b0 = std::log(ymean / (1.0 - ymean));
    b0 = std::clamp(b0, -10.0, 10.0);
    double b1 = 0.0;

    double h00 = 0, h01 = 0, h11 = 0;
    bool converged = false;
    int iter = 0;
    for (; iter < 100; ++iter) {
        double g0 = 0, g1 = 0;
        h00 = h01 = h11 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double eta = b0 + b1 * x[i];
            double p = 1.0 / (1.0 + std::exp(-eta));
            double w = std::max(p * (1.0 - p), 1e-12);
            double r = static_cast<double>(y[i]) - p;
            g0 += r;
            g1 += x[i] * r;
            h00 += w;
            h01 += w * x[i];
            h11 += w * x[i] * x[i];
        }
        double det = h00 * h11 - h01 * h01;
        if (!(std::fabs(det) > 0.0))
            throw std::runtime_error("glm: singular information matrix");
        double d0 = (h11 * g0 - h01 * g1) / det;
        double d1 = (h00 * g1 - h01 * g0) / det;
        b0 += d0;
        b1 += d1;
        if (std::max(std::fabs(d0), std::fabs(d1)) < 1e-8) {
            converged = true;
            ++iter;
            break;
        }
    }

    double deviance = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double eta = b0 + b1 * x[i];
        double p = 1.0 / (1.0 + std::exp(-eta));
        p = std::clamp(p, 1e-15, 1.0 - 1e-15);
        deviance += y[i] ? std::log(p) : std::log(1.0 - p);
    }
    deviance *= -2.0;

    fit.beta0 = b0;
    fit.beta1 = b1;
    fit.iterations = iter;

    // complete/quasi separation: diverging coefficients or vanishing deviance
    bool separated = std::max(std::fabs(b0), std::fabs(b1)) > 30.0 || deviance < 1e-8;
    if (!converged || separated) {
        fit.converged = false;
        fit.se0 = fit.se1 = fit.z1 = fit.p1 = nan;
        return fit;
    }

    double det = h00 * h11 - h01 * h01;
    fit.se0 = std::sqrt(h11 / det);
    fit.se1 = std::sqrt(h00 / det);
    fit.z1 = b1 / fit.se1;
    fit.p1 = 2.0 * normal_sf(std::fabs(fit.z1));
    fit.converged = true;
    return fit;
}

std::string to_string(LinkOutcome o) {
    switch (o) {
        case LinkOutcome::AnyLink: return "any_link";
        case LinkOutcome::AccelerationLink: return "acceleration_link";
        case LinkOutcome::DecelerationLink: return "deceleration_link";
    }
    return "?";
}

std::array<GlmRow, 4> glm_feature_screen(const std::vector<LinkedEvent>& linked,
                                         LinkOutcome outcome) {
    // one row per distinct hypoxic event
    struct EventRow {
        HypoxicFeatures f;
        int y = 0;
    };
    std::map<std::pair<double, double>, EventRow> events;
    for (const auto& le : linked) {
        auto key = std::make_pair(le.hypoxia.span.start, le.hypoxia.span.end);
        auto it = events.find(key);
        if (it == events.end()) {
            if (!le.features) continue;  // unusable event, excluded from all rows
            it = events.emplace(key, EventRow{*le.features, 0}).first;
        }
        bool hit = false;
        switch (outcome) {
            case LinkOutcome::AnyLink: hit = le.link_kind != LinkKind::None; break;
            case LinkOutcome::AccelerationLink:
                hit = le.link_kind == LinkKind::Acceleration;
                break;
            case LinkOutcome::DecelerationLink:
                hit = le.link_kind == LinkKind::Deceleration;
                break;
        }
        if (hit) it->second.y = 1;
    }

    const char* names[4] = {"duration", "nadir", "drop", "burden_area"};
    std::array<GlmRow, 4> rows;
    for (int k = 0; k < 4; ++k) {
        rows[k].feature = names[k];
        std::vector<double> x;
        std::vector<int> y;
        x.reserve(events.size());
        y.reserve(events.size());
        for (const auto& [key, row] : events) {
            double v;
            switch (k) {
                case 0: v = row.f.duration; break;
                case 1: v = row.f.nadir; break;
                case 2: v = row.f.drop; break;
                default:
                    if (!row.f.burden_area) continue;  // burden unavailable
                    v = *row.f.burden_area;
            }
            x.push_back(v);
            y.push_back(row.y);
        }
        try {
            rows[k].fit = fit_logistic_univariate(x, y);
        } catch (const std::exception& e) {
            rows[k].error = e.what();
        }
    }
    return rows;
}

}  // namespace fetalink
