#include "fetalink/detect.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <stdexcept>

namespace fetalink {

void DesatParams::validate() const {
    if (!(drop_threshold > 0) || !(baseline_window > 0) || !(resat_margin > 0) ||
        !(min_duration > 0) || merge_gap < 0)
        throw std::invalid_argument("DesatParams: all parameters must be positive");
    if (!(drop_threshold > resat_margin))
        throw std::invalid_argument("DesatParams: drop_threshold must exceed resat_margin");
}

void FhrParams::validate() const {
    if (!(baseline_window > 0) || !(excursion > 0) || !(min_duration > 0) ||
        !(max_duration > 0))
        throw std::invalid_argument("FhrParams: all parameters must be positive");
    if (!(max_duration > min_duration))
        throw std::invalid_argument("FhrParams: max_duration must exceed min_duration");
}

namespace {

// Running max of valid samples over the preceding `win` samples (exclusive of
// the current one); NaN where the lookback holds no valid sample.
std::vector<double> running_max(const Channel& ch, std::size_t win) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> out(ch.size(), nan);
    std::deque<std::size_t> dq;  // indices, values decreasing
    for (std::size_t i = 0; i < ch.size(); ++i) {
        while (!dq.empty() && dq.front() + win < i) dq.pop_front();
        if (!dq.empty()) out[i] = ch.samples[dq.front()];
        if (ch.valid[i]) {
            while (!dq.empty() && ch.samples[dq.back()] <= ch.samples[i]) dq.pop_back();
            dq.push_back(i);
        }
    }
    return out;
}

}  // namespace

std::vector<EventInterval> detect_desaturations(const Channel& spo2,
                                                const DesatParams& params) {
    if (spo2.kind != SignalKind::SpO2)
        throw std::invalid_argument("detect_desaturations expects an SpO2 channel");
    params.validate();

    const std::size_t n = spo2.size();
    const double rate = spo2.sample_rate;
    const auto win = static_cast<std::size_t>(std::lround(params.baseline_window * rate));
    std::vector<double> baseline = running_max(spo2, std::max<std::size_t>(win, 1));

    std::vector<EventInterval> events;
    std::size_t i = 0;
    while (i < n) {
        if (!spo2.valid[i] || !std::isfinite(baseline[i]) ||
            baseline[i] - spo2.samples[i] < params.drop_threshold) {
            ++i;
            continue;
        }
        // crossing found; freeze the baseline for this event
        const double b = baseline[i];
        auto deficit = [&](std::size_t k) { return b - spo2.samples[k]; };

        // core region: deficit stays >= threshold (invalid samples skipped)
        std::size_t core_end = i;
        std::size_t k = i;
        while (k + 1 < n) {
            ++k;
            if (!spo2.valid[k]) continue;
            if (deficit(k) >= params.drop_threshold)
                core_end = k;
            else if (deficit(k) <= params.resat_margin)
                break;  // recovered
        }

        // widen start back to the start of the decline
        std::size_t start = i;
        while (start > 0) {
            std::size_t p = start - 1;
            if (!spo2.valid[p]) break;
            if (!(deficit(p) < deficit(start)) || deficit(p) <= 0.0) {
                if (deficit(p) <= 0.0 && deficit(p) < deficit(start)) start = p;
                break;
            }
            start = p;
        }

        // widen end forward through the resaturation limb
        std::size_t end = core_end;
        while (end + 1 < n) {
            std::size_t q = end + 1;
            if (!spo2.valid[q]) break;
            if (deficit(q) < deficit(end) && deficit(end) > 0.0)
                end = q;
            else
                break;
        }

        double core_duration =
            static_cast<double>(core_end - i) / rate + 1.0 / rate;  // inclusive span
        if (core_duration >= params.min_duration && end > start) {
            events.emplace_back(EventKind::Hypoxia,
                                TimeSpan{spo2.time_at(start), spo2.time_at(end)},
                                EventSource::Detected);
        }
        i = std::max(end, core_end) + 1;
    }
    return merge_intervals(std::move(events), params.merge_gap);
}

namespace {

// Sliding median of valid samples over a centered window, via two multisets.
class SlidingMedian {
public:
    void insert(double v) {
        if (low_.empty() || v <= *low_.rbegin())
            low_.insert(v);
        else
            high_.insert(v);
        rebalance();
    }
    void erase(double v) {
        auto it = low_.find(v);
        if (it != low_.end())
            low_.erase(it);
        else
            high_.erase(high_.find(v));
        rebalance();
    }
    bool empty() const { return low_.empty(); }
    double median() const {
        // lower median for even counts; exact value is not critical here
        return *low_.rbegin();
    }

private:
    void rebalance() {
        while (low_.size() > high_.size() + 1) {
            auto it = std::prev(low_.end());
            high_.insert(*it);
            low_.erase(it);
        }
        while (high_.size() > low_.size()) {
            auto it = high_.begin();
            low_.insert(*it);
            high_.erase(it);
        }
    }
    std::multiset<double> low_, high_;
};

std::vector<double> rolling_median(const Channel& ch, std::size_t half_win) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> out(ch.size(), nan);
    SlidingMedian med;
    std::size_t added_hi = 0;  // samples [0, added_hi) considered for insertion
    for (std::size_t i = 0; i < ch.size(); ++i) {
        std::size_t lo = i > half_win ? i - half_win : 0;
        std::size_t hi = std::min(ch.size(), i + half_win + 1);
        while (added_hi < hi) {
            if (ch.valid[added_hi]) med.insert(ch.samples[added_hi]);
            ++added_hi;
        }
        if (i > half_win && ch.valid[lo - 1]) med.erase(ch.samples[lo - 1]);
        if (!med.empty()) out[i] = med.median();
    }
    return out;
}

}  // namespace

std::vector<EventInterval> detect_fhr_events(const Channel& fhr,
                                             const FhrParams& params) {
    if (fhr.kind != SignalKind::Fhr)
        throw std::invalid_argument("detect_fhr_events expects an FHR channel");
    params.validate();

    const std::size_t n = fhr.size();
    const double rate = fhr.sample_rate;
    const auto half_win =
        static_cast<std::size_t>(std::lround(params.baseline_window * rate / 2.0));
    std::vector<double> baseline = rolling_median(fhr, std::max<std::size_t>(half_win, 1));

    std::vector<EventInterval> events;
    std::size_t i = 0;
    while (i < n) {
        double exc = fhr.valid[i] && std::isfinite(baseline[i])
                         ? fhr.samples[i] - baseline[i]
                         : 0.0;
        int dir = 0;
        if (exc >= params.excursion)
            dir = +1;
        else if (exc <= -params.excursion)
            dir = -1;
        if (dir == 0) {
            ++i;
            continue;
        }

        auto dev = [&](std::size_t k) { return dir * (fhr.samples[k] - baseline[k]); };

        // core region: deviation stays >= excursion
        std::size_t core_end = i;
        std::size_t k = i;
        while (k + 1 < n) {
            ++k;
            if (!fhr.valid[k] || !std::isfinite(baseline[k])) break;
            if (dev(k) >= params.excursion)
                core_end = k;
            else if (dev(k) <= 0.0)
                break;
        }

        // widen to the baseline departure / return
        std::size_t start = i;
        while (start > 0) {
            std::size_t p = start - 1;
            if (!fhr.valid[p] || !std::isfinite(baseline[p])) break;
            if (dev(p) < dev(start) && dev(p) > 0.0)
                start = p;
            else
                break;
        }
        std::size_t end = core_end;
        while (end + 1 < n) {
            std::size_t q = end + 1;
            if (!fhr.valid[q] || !std::isfinite(baseline[q])) break;
            if (dev(q) < dev(end) && dev(end) > 0.0)
                end = q;
            else
                break;
        }

        double core_duration = static_cast<double>(core_end - i) / rate + 1.0 / rate;
        if (core_duration >= params.min_duration && core_duration < params.max_duration &&
            end > start) {
            events.emplace_back(dir > 0 ? EventKind::Acceleration : EventKind::Deceleration,
                                TimeSpan{fhr.time_at(start), fhr.time_at(end)},
                                EventSource::Detected);
        }
        i = std::max(end, core_end) + 1;
    }
    return events;
}

}  // namespace fetalink
