#include "fetalink/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace fetalink {

namespace {

std::string trim(std::string s) {
    auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

// getline that strips CR and, on the first line, a UTF-8 BOM
bool next_line(std::istream& in, std::string& line, int& lineno) {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.size() >= 3 && line[0] == '\xef' && line[1] == '\xbb' &&
        line[2] == '\xbf')
        line.erase(0, 3);
    return true;
}

double parse_double(const std::string& s, const std::string& name, int lineno) {
    double v;
    auto first = s.data();
    auto last = s.data() + s.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || p != last)
        throw std::runtime_error(name + " line " + std::to_string(lineno) +
                                 ": not a number: '" + s + "'");
    return v;
}

std::string fmt_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace

Channel parse_signal_csv(std::istream& in, SignalKind expected_kind,
                         const std::string& name) {
    std::string line;
    int lineno = 0;
    if (!next_line(in, line, lineno))
        throw std::runtime_error(name + ": empty file");
    line = trim(line);
    if (line.empty() || line[0] != '#')
        throw std::runtime_error(name + " line 1: missing '# kind=..., sample_rate=...' header");

    std::string kind_str;
    double rate = std::numeric_limits<double>::quiet_NaN();
    double t0 = 0.0;
    std::stringstream hs(line.substr(1));
    std::string field;
    while (std::getline(hs, field, ',')) {
        auto eq = field.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(name + " line 1: malformed header field '" +
                                     trim(field) + "'");
        std::string key = trim(field.substr(0, eq));
        std::string val = trim(field.substr(eq + 1));
        if (key == "kind")
            kind_str = val;
        else if (key == "sample_rate")
            rate = parse_double(val, name, 1);
        else if (key == "t0")
            t0 = parse_double(val, name, 1);
        else
            throw std::runtime_error(name + " line 1: unknown header key '" + key + "'");
    }
    SignalKind kind;
    if (kind_str == "spo2")
        kind = SignalKind::SpO2;
    else if (kind_str == "fhr")
        kind = SignalKind::Fhr;
    else
        throw std::runtime_error(name + " line 1: unknown kind '" + kind_str + "'");
    if (kind != expected_kind)
        throw std::runtime_error(name + " line 1: kind '" + kind_str +
                                 "' does not match expected '" + to_string(expected_kind) + "'");
    if (!(rate > 0.0))
        throw std::runtime_error(name + " line 1: sample_rate must be positive");
    if (t0 < 0.0)
        throw std::runtime_error(name + " line 1: t0 must be non-negative");

    std::vector<double> samples;
    while (next_line(in, line, lineno)) {
        std::string v = trim(line);
        if (v.empty()) {
            samples.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        samples.push_back(parse_double(v, name, lineno));
    }
    return Channel::make(kind, rate, t0, std::move(samples));
}

void write_signal_csv(std::ostream& os, const Channel& ch) {
    os << "# kind=" << to_string(ch.kind) << ", sample_rate=" << fmt_double(ch.sample_rate)
       << ", t0=" << fmt_double(ch.t0) << "\n";
    for (double v : ch.samples) {
        if (std::isfinite(v)) os << fmt_double(v);
        os << "\n";
    }
}

std::vector<EventInterval> parse_annotation_csv(std::istream& in,
                                                const std::string& name) {
    std::string line;
    int lineno = 0;
    if (!next_line(in, line, lineno))
        throw std::runtime_error(name + ": empty file");
    {
        std::string h = trim(line);
        h.erase(std::remove_if(h.begin(), h.end(),
                               [](unsigned char c) { return std::isspace(c); }),
                h.end());
        if (h != "kind,start_s,end_s")
            throw std::runtime_error(name + " line 1: expected header 'kind,start_s,end_s'");
    }

    std::vector<EventInterval> events;
    int row = 0;
    while (next_line(in, line, lineno)) {
        if (trim(line).empty()) continue;
        ++row;
        std::stringstream ls(line);
        std::string kind_s, start_s, end_s, extra;
        if (!std::getline(ls, kind_s, ',') || !std::getline(ls, start_s, ',') ||
            !std::getline(ls, end_s, ','))
            throw std::runtime_error(name + " row " + std::to_string(row) +
                                     ": expected 3 fields");
        if (std::getline(ls, extra, ','))
            throw std::runtime_error(name + " row " + std::to_string(row) +
                                     ": too many fields");
        kind_s = trim(kind_s);
        EventKind kind;
        if (kind_s == "hypoxia")
            kind = EventKind::Hypoxia;
        else if (kind_s == "acc")
            kind = EventKind::Acceleration;
        else if (kind_s == "dec")
            kind = EventKind::Deceleration;
        else
            throw std::runtime_error(name + " row " + std::to_string(row) +
                                     ": unknown kind '" + kind_s + "'");
        double start = parse_double(trim(start_s), name, lineno);
        double end = parse_double(trim(end_s), name, lineno);
        if (!(end > start))
            throw std::runtime_error(name + " row " + std::to_string(row) +
                                     ": end must be greater than start");
        if (start < 0.0)
            throw std::runtime_error(name + " row " + std::to_string(row) +
                                     ": negative start time");
        events.emplace_back(kind, TimeSpan{start, end}, EventSource::Annotated);
    }
    return events;
}

void write_annotation_csv(std::ostream& os, const std::vector<EventInterval>& events) {
    os << "kind,start_s,end_s\n";
    for (const auto& e : events)
        os << to_string(e.kind) << ',' << fmt_double(e.span.start) << ','
           << fmt_double(e.span.end) << "\n";
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("manifest " + path + ": " + e.what());
    }
    if (!j.is_array()) throw std::runtime_error("manifest " + path + ": expected a JSON array");

    auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    std::vector<ManifestEntry> entries;
    for (const auto& item : j) {
        ManifestEntry e;
        try {
            e.participant_id = item.at("participant_id").get<std::string>();
            e.center = item.value("center", std::string{});
            e.spo2_path = resolve(item.at("spo2_path").get<std::string>());
            e.fhr_path = resolve(item.at("fhr_path").get<std::string>());
            e.annotation_path = resolve(item.at("annotation_path").get<std::string>());
        } catch (const nlohmann::json::exception& ex) {
            throw std::runtime_error("manifest " + path + ": bad entry: " + ex.what());
        }
        if (e.participant_id.empty())
            throw std::runtime_error("manifest " + path + ": empty participant_id");
        entries.push_back(std::move(e));
    }
    return entries;
}

Recording load_recording(const ManifestEntry& entry) {
    auto open = [](const std::string& p) {
        std::ifstream f(p);
        if (!f) throw std::runtime_error("cannot open: " + p);
        return f;
    };
    auto spo2_f = open(entry.spo2_path);
    Channel spo2 = parse_signal_csv(spo2_f, SignalKind::SpO2, entry.spo2_path);
    auto fhr_f = open(entry.fhr_path);
    Channel fhr = parse_signal_csv(fhr_f, SignalKind::Fhr, entry.fhr_path);
    auto ann_f = open(entry.annotation_path);
    auto annotations = parse_annotation_csv(ann_f, entry.annotation_path);
    return make_recording(entry.participant_id, entry.center, std::move(spo2),
                          std::move(fhr), std::move(annotations));
}

std::string to_string(ScreenReason r) {
    switch (r) {
        case ScreenReason::MissingChannel: return "missing_channel";
        case ScreenReason::ZeroSignalRun: return "zero_signal_run";
        case ScreenReason::ExcessInvalidFraction: return "excess_invalid_fraction";
        case ScreenReason::AbnormalFluctuation: return "abnormal_fluctuation";
    }
    return "?";
}

namespace {

struct ChannelQuality {
    double longest_invalid_run = 0.0;  // seconds
    double invalid_fraction = 0.0;
    double max_jump_per_s = 0.0;  // between consecutive valid samples
};

ChannelQuality channel_quality(const Channel& ch) {
    ChannelQuality q;
    if (ch.empty()) return q;
    std::size_t run = 0, longest = 0, invalid = 0;
    std::ptrdiff_t last_valid = -1;
    for (std::size_t i = 0; i < ch.size(); ++i) {
        if (!ch.valid[i]) {
            ++invalid;
            ++run;
            longest = std::max(longest, run);
            continue;
        }
        run = 0;
        if (last_valid >= 0) {
            double dt = static_cast<double>(i - last_valid) / ch.sample_rate;
            double dv = std::fabs(ch.samples[i] - ch.samples[last_valid]);
            q.max_jump_per_s = std::max(q.max_jump_per_s, dv / dt);
        }
        last_valid = static_cast<std::ptrdiff_t>(i);
    }
    q.longest_invalid_run = static_cast<double>(longest) / ch.sample_rate;
    q.invalid_fraction = static_cast<double>(invalid) / static_cast<double>(ch.size());
    return q;
}

}  // namespace

ScreenReport quality_screen(const Recording& rec, const ScreenPolicy& policy) {
    ScreenReport rep;
    rep.participant_id = rec.participant_id;

    auto add = [&](ScreenReason r) {
        if (std::find(rep.reasons.begin(), rep.reasons.end(), r) == rep.reasons.end())
            rep.reasons.push_back(r);
    };

    const Channel* chans[2] = {&rec.spo2, &rec.fhr};
    const char* names[2] = {"spo2", "fhr"};
    for (int c = 0; c < 2; ++c) {
        const Channel& ch = *chans[c];
        if (ch.empty()) {
            add(ScreenReason::MissingChannel);
            continue;
        }
        ChannelQuality q = channel_quality(ch);
        rep.metrics[std::string(names[c]) + "_longest_invalid_run_s"] = q.longest_invalid_run;
        rep.metrics[std::string(names[c]) + "_invalid_fraction"] = q.invalid_fraction;
        if (q.longest_invalid_run > policy.max_invalid_run) add(ScreenReason::ZeroSignalRun);
        if (q.invalid_fraction > policy.max_invalid_fraction)
            add(ScreenReason::ExcessInvalidFraction);
        if (c == 0) {
            rep.metrics["spo2_max_jump_per_s"] = q.max_jump_per_s;
            if (q.max_jump_per_s > policy.max_spo2_jump) add(ScreenReason::AbnormalFluctuation);
        }
    }
    rep.passed = rep.reasons.empty();
    return rep;
}

}  // namespace fetalink
