#include "fetalink/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fetalink/svg.hpp"

namespace fetalink {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string now_iso8601() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
    return buf;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write: " + path);
    f << content;
}

ordered_json json_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

ordered_json test_result_json(const TestResult& r) {
    return {{"statistic", r.statistic}, {"df", r.df}, {"p_value", r.p_value}};
}

ordered_json glm_row_json(const GlmRow& row) {
    ordered_json j;
    j["feature"] = row.feature;
    if (row.fit) {
        const GlmFit& f = *row.fit;
        j["coef"] = f.beta1;
        j["std_err"] = json_or_null(f.se1);
        j["z"] = json_or_null(f.z1);
        j["p_value"] = json_or_null(f.p1);
        j["intercept"] = f.beta0;
        j["intercept_std_err"] = json_or_null(f.se0);
        j["converged"] = f.converged;
        j["iterations"] = f.iterations;
        j["n"] = f.n;
    } else {
        j["error"] = row.error;
    }
    return j;
}

ordered_json box_json(const BoxSummary& b) {
    return {{"q1", b.q1},
            {"median", b.median},
            {"q3", b.q3},
            {"whisker_low", b.whisker_low},
            {"whisker_high", b.whisker_high},
            {"n_outliers", static_cast<int>(b.outliers.size())},
            {"n", b.n}};
}

std::string fmt_csv(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// A nonexistent file is a data condition (missing channel / no annotations),
// reported by the screen; a file that exists but fails to parse is an error.
Recording load_recording_lenient(const ManifestEntry& entry) {
    namespace fs = std::filesystem;
    auto load_channel = [](const std::string& path, SignalKind kind) {
        if (!fs::exists(path)) return Channel::make(kind, 1.0, 0.0, {});
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open: " + path);
        return parse_signal_csv(f, kind, path);
    };
    Channel spo2 = load_channel(entry.spo2_path, SignalKind::SpO2);
    Channel fhr = load_channel(entry.fhr_path, SignalKind::Fhr);
    std::vector<EventInterval> annotations;
    if (fs::exists(entry.annotation_path)) {
        std::ifstream f(entry.annotation_path);
        if (!f) throw std::runtime_error("cannot open: " + entry.annotation_path);
        annotations = parse_annotation_csv(f, entry.annotation_path);
    }
    return make_recording(entry.participant_id, entry.center, std::move(spo2),
                          std::move(fhr), std::move(annotations));
}

ParticipantAnalysis analyze_participant(const ManifestEntry& entry, Recording rec,
                                        ScreenReport screen, const RunConfig& cfg) {
    ParticipantAnalysis pa;
    pa.entry = entry;
    pa.screen = std::move(screen);

    std::vector<EventInterval> hyp = rec.events_of(EventKind::Hypoxia);
    std::vector<EventInterval> acc = rec.events_of(EventKind::Acceleration);
    std::vector<EventInterval> dec = rec.events_of(EventKind::Deceleration);
    pa.has_fhr_data = !acc.empty() || !dec.empty();

    if (!cfg.from_annotations) {
        // detectors fill in kinds that carry no manual annotations
        if (hyp.empty()) hyp = detect_desaturations(rec.spo2, cfg.desat);
        if (acc.empty() && dec.empty()) {
            auto detected = detect_fhr_events(rec.fhr, cfg.fhr_params);
            for (auto& e : detected)
                (e.kind == EventKind::Acceleration ? acc : dec).push_back(e);
            pa.has_fhr_data = !acc.empty() || !dec.empty();
        }
    }

    pa.hypoxic = merge_intervals(std::move(hyp), cfg.link_window);
    pa.fhr_events = std::move(acc);
    pa.fhr_events.insert(pa.fhr_events.end(), dec.begin(), dec.end());
    std::sort(pa.fhr_events.begin(), pa.fhr_events.end(),
              [](const auto& a, const auto& b) { return a.span.start < b.span.start; });

    pa.linked = link_events(pa.hypoxic, pa.fhr_events, cfg.link_window);
    pa.unusable_features = compute_features(pa.linked, rec.spo2, cfg.burden);
    pa.recording = std::move(rec);
    return pa;
}

}  // namespace

std::vector<ScreenReport> run_validate(const std::string& manifest_path,
                                       const ScreenPolicy& policy) {
    auto entries = load_manifest(manifest_path);
    if (entries.empty()) throw std::runtime_error("manifest lists no participants");

    std::vector<ScreenReport> reports;
    std::vector<std::string> file_errors;
    for (const auto& e : entries) {
        try {
            Recording rec = load_recording_lenient(e);
            reports.push_back(quality_screen(rec, policy));
        } catch (const std::exception& ex) {
            file_errors.push_back(e.participant_id + ": " + ex.what());
        }
    }
    if (!file_errors.empty()) {
        std::string msg = "unreadable participant files:";
        for (const auto& fe : file_errors) msg += "\n  " + fe;
        throw std::runtime_error(msg);
    }
    return reports;
}

AnalysisBundle run_analyze(const RunConfig& cfg) {
    auto entries = load_manifest(cfg.manifest_path);
    if (entries.empty()) throw std::runtime_error("manifest lists no participants");

    AnalysisBundle bundle;
    std::vector<std::string> file_errors;
    for (const auto& e : entries) {
        Recording rec;
        try {
            rec = load_recording_lenient(e);
        } catch (const std::exception& ex) {
            file_errors.push_back(e.participant_id + ": " + ex.what());
            continue;
        }
        ScreenReport sr = quality_screen(rec, cfg.screen);
        bundle.screens.push_back(sr);
        if (!sr.passed) {
            ++bundle.n_failed_screen;
            continue;
        }
        bundle.participants.push_back(
            analyze_participant(e, std::move(rec), std::move(sr), cfg));
        ++bundle.n_passed;
    }
    if (!file_errors.empty()) {
        std::string msg = "unreadable participant files:";
        for (const auto& fe : file_errors) msg += "\n  " + fe;
        throw std::runtime_error(msg);
    }
    if (bundle.n_passed == 0)
        throw std::runtime_error("no participant passed the quality screen");

    // chi-square per kind over participants with FHR data
    if (cfg.chi_square) {
        for (EventKind kind : {EventKind::Acceleration, EventKind::Deceleration}) {
            KindAnalysis ka;
            ka.kind = kind;
            std::vector<ContingencyTable> tables;
            for (const auto& pa : bundle.participants) {
                if (!pa.has_fhr_data) {
                    ++ka.participants_excluded;
                    continue;
                }
                tables.push_back(contingency_from_recording(pa.recording, pa.linked,
                                                            pa.fhr_events, kind));
                ++ka.participants_included;
            }
            ka.participants_excluded += bundle.n_failed_screen;
            if (!tables.empty()) {
                ka.aggregate = aggregate_tables(tables);
                try {
                    ka.test = chi_square_test(ka.aggregate);
                } catch (const std::exception& ex) {
                    ka.test_error = ex.what();
                }
            } else {
                ka.test_error = "no participant with FHR event data";
            }
            bundle.by_kind.push_back(std::move(ka));
        }
    }

    // pooled-event GLM screens
    if (cfg.glm) {
        std::vector<LinkedEvent> all;
        for (const auto& pa : bundle.participants)
            all.insert(all.end(), pa.linked.begin(), pa.linked.end());
        for (LinkOutcome o : {LinkOutcome::AnyLink, LinkOutcome::AccelerationLink,
                              LinkOutcome::DecelerationLink})
            bundle.glm.emplace_back(to_string(o), glm_feature_screen(all, o));
    }

    // per-center feature summaries (Table-3 layout)
    {
        std::set<std::string> center_set;
        for (const auto& pa : bundle.participants) center_set.insert(pa.entry.center);
        bundle.centers.assign(center_set.begin(), center_set.end());

        const char* names[4] = {"duration", "nadir", "drop", "burden_area"};
        for (int k = 0; k < 4; ++k) {
            FeatureSummary fs;
            fs.feature = names[k];
            for (const auto& center : bundle.centers) {
                std::vector<double> vals;
                for (const auto& pa : bundle.participants) {
                    if (pa.entry.center != center) continue;
                    std::set<std::pair<double, double>> seen;
                    for (const auto& le : pa.linked) {
                        auto key = std::make_pair(le.hypoxia.span.start, le.hypoxia.span.end);
                        if (!seen.insert(key).second) continue;
                        if (!le.features) continue;
                        const auto& f = *le.features;
                        switch (k) {
                            case 0: vals.push_back(f.duration); break;
                            case 1: vals.push_back(f.nadir); break;
                            case 2: vals.push_back(f.drop); break;
                            default:
                                if (f.burden_area) vals.push_back(*f.burden_area);
                        }
                    }
                }
                double n = static_cast<double>(vals.size());
                double mean = 0.0, sd = 0.0;
                if (n > 0) {
                    for (double v : vals) mean += v;
                    mean /= n;
                    if (n > 1) {
                        for (double v : vals) sd += (v - mean) * (v - mean);
                        sd = std::sqrt(sd / (n - 1.0));  // sample SD, descriptive
                    }
                }
                fs.mean.push_back(mean);
                fs.sd.push_back(sd);
                fs.n.push_back(static_cast<int>(n));
            }
            if (bundle.centers.size() == 2 && fs.n[0] >= 2 && fs.n[1] >= 2 &&
                fs.sd[0] > 0 && fs.sd[1] > 0) {
                fs.welch = welch_t_from_summary(fs.mean[0], fs.sd[0], fs.n[0], fs.mean[1],
                                                fs.sd[1], fs.n[1]);
            }
            bundle.features.push_back(std::move(fs));
        }
    }

    if (cfg.phase) {
        std::vector<const Recording*> recs;
        std::vector<std::vector<EventInterval>> events;
        for (const auto& pa : bundle.participants) {
            recs.push_back(&pa.recording);
            events.push_back(pa.hypoxic);
        }
        bundle.phase = cohort_phase_report(recs, events);
    }

    return bundle;
}

void write_screen_json(const std::vector<ScreenReport>& reports, const std::string& path,
                       bool timestamp) {
    ordered_json j;
    if (timestamp) j["generated_at"] = now_iso8601();
    int passed = 0;
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) {
        ordered_json item;
        item["participant_id"] = r.participant_id;
        item["passed"] = r.passed;
        ordered_json reasons = ordered_json::array();
        for (auto reason : r.reasons) reasons.push_back(to_string(reason));
        item["reasons"] = reasons;
        ordered_json metrics;
        for (const auto& [k, v] : r.metrics) metrics[k] = json_or_null(v);
        item["metrics"] = metrics;
        arr.push_back(item);
        passed += r.passed ? 1 : 0;
    }
    j["summary"] = {{"total", static_cast<int>(reports.size())},
                    {"passed", passed},
                    {"failed", static_cast<int>(reports.size()) - passed}};
    j["participants"] = arr;
    write_text(path, j.dump(2) + "\n");
}

void write_reports(const AnalysisBundle& bundle, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + cfg.output_dir);
    auto path = [&](const char* name) { return (fs::path(cfg.output_dir) / name).string(); };

    write_screen_json(bundle.screens, path("screen.json"), cfg.timestamp);

    if (cfg.chi_square) {
        ordered_json j;
        if (cfg.timestamp) j["generated_at"] = now_iso8601();
        j["note"] =
            "cells are event durations in seconds used directly as chi-square counts; "
            "treat significance with care, seconds within one event are not "
            "independent observations";
        for (const auto& ka : bundle.by_kind) {
            ordered_json kj;
            kj["table"] = {{"a1", ka.aggregate.a1},
                           {"a2", ka.aggregate.a2},
                           {"b1", ka.aggregate.b1},
                           {"b2", ka.aggregate.b2}};
            if (ka.test) {
                kj["chi_square"] = test_result_json(*ka.test);
                kj["odds_ratio"] = json_or_null(ka.aggregate.odds_ratio());
            } else {
                kj["error"] = ka.test_error;
            }
            kj["participants_included"] = ka.participants_included;
            kj["participants_excluded"] = ka.participants_excluded;
            j[ka.kind == EventKind::Acceleration ? "acceleration" : "deceleration"] = kj;
        }
        write_text(path("chi_square.json"), j.dump(2) + "\n");
    }

    if (cfg.glm) {
        ordered_json j;
        if (cfg.timestamp) j["generated_at"] = now_iso8601();
        for (const auto& [outcome, rows] : bundle.glm) {
            ordered_json rj = ordered_json::array();
            for (const auto& row : rows) rj.push_back(glm_row_json(row));
            j[outcome] = rj;
        }
        write_text(path("glm.json"), j.dump(2) + "\n");
    }

    if (cfg.write_csv) {
        // features.csv: Table-3 layout, one row per feature
        std::ostringstream os;
        os << "feature";
        for (const auto& c : bundle.centers)
            os << ",mean_" << c << ",sd_" << c << ",n_" << c;
        if (bundle.centers.size() == 2) os << ",welch_t,welch_df,welch_p";
        os << "\n";
        for (const auto& f : bundle.features) {
            os << f.feature;
            for (std::size_t c = 0; c < bundle.centers.size(); ++c)
                os << ',' << fmt_csv(f.mean[c]) << ',' << fmt_csv(f.sd[c]) << ',' << f.n[c];
            if (bundle.centers.size() == 2) {
                if (f.welch)
                    os << ',' << fmt_csv(f.welch->statistic) << ',' << fmt_csv(f.welch->df)
                       << ',' << fmt_csv(f.welch->p_value);
                else
                    os << ",,,";
            }
            os << "\n";
        }
        write_text(path("features.csv"), os.str());

        std::ostringstream lcsv;
        bool header = true;
        for (const auto& pa : bundle.participants) {
            write_linked_events_csv(lcsv, pa.entry.participant_id, pa.linked, header);
            header = false;
        }
        write_text(path("linked_events.csv"), lcsv.str());
    }

    if (cfg.phase) {
        ordered_json j;
        if (cfg.timestamp) j["generated_at"] = now_iso8601();
        const char* phase_names[3] = {"pre", "during", "post"};
        for (int p = 0; p < 3; ++p) {
            ordered_json pj;
            for (int m = 0; m < 3; ++m) {
                const auto& sm = bundle.phase.summary[p][m];
                if (!sm) continue;
                pj[PhaseReport::metric_names[m]] = {{"box", box_json(sm->box)},
                                                    {"grand_mean", sm->grand_mean}};
            }
            pj["n_events_used"] = bundle.phase.n_events_used[p];
            j[phase_names[p]] = pj;
        }
        j["n_events_total"] = bundle.phase.n_events_total;
        j["n_clipped_pre"] = bundle.phase.n_clipped_pre;
        j["n_clipped_post"] = bundle.phase.n_clipped_post;
        if (!bundle.phase.reason.empty()) j["reason"] = bundle.phase.reason;
        write_text(path("phase.json"), j.dump(2) + "\n");

        if (cfg.write_svg) write_text(path("phase.svg"), render_phase_svg(bundle.phase));
    }
}

}  // namespace fetalink
