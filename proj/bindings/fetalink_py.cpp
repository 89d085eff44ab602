#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "fetalink/detect.hpp"
#include "fetalink/ingest.hpp"
#include "fetalink/link.hpp"
#include "fetalink/phase.hpp"
#include "fetalink/pipeline.hpp"
#include "fetalink/special.hpp"
#include "fetalink/stats.hpp"
#include "fetalink/synth.hpp"

namespace py = pybind11;
using namespace fetalink;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Temporal analysis of maternal SpO2 desaturations and fetal heart rate";

    py::enum_<SignalKind>(m, "SignalKind")
        .value("SpO2", SignalKind::SpO2)
        .value("Fhr", SignalKind::Fhr);
    py::enum_<EventKind>(m, "EventKind")
        .value("Hypoxia", EventKind::Hypoxia)
        .value("Acceleration", EventKind::Acceleration)
        .value("Deceleration", EventKind::Deceleration);
    py::enum_<EventSource>(m, "EventSource")
        .value("Annotated", EventSource::Annotated)
        .value("Detected", EventSource::Detected);
    py::enum_<LinkKind>(m, "LinkKind")
        .value("NoLink", LinkKind::None)
        .value("Acceleration", LinkKind::Acceleration)
        .value("Deceleration", LinkKind::Deceleration);
    py::enum_<LinkOutcome>(m, "LinkOutcome")
        .value("AnyLink", LinkOutcome::AnyLink)
        .value("AccelerationLink", LinkOutcome::AccelerationLink)
        .value("DecelerationLink", LinkOutcome::DecelerationLink);
    py::enum_<Phase>(m, "Phase")
        .value("Pre", Phase::Pre)
        .value("During", Phase::During)
        .value("Post", Phase::Post);

    py::class_<TimeSpan>(m, "TimeSpan")
        .def(py::init<double, double>(), py::arg("start"), py::arg("end"))
        .def_readonly("start", &TimeSpan::start)
        .def_readonly("end", &TimeSpan::end)
        .def("duration", &TimeSpan::duration)
        .def("__repr__", [](const TimeSpan& s) {
            std::ostringstream os;
            os << "TimeSpan(" << s.start << ", " << s.end << ")";
            return os.str();
        });

    py::class_<EventInterval>(m, "EventInterval")
        .def(py::init<EventKind, TimeSpan, EventSource>(), py::arg("kind"),
             py::arg("span"), py::arg("source") = EventSource::Annotated)
        .def_readonly("kind", &EventInterval::kind)
        .def_readonly("span", &EventInterval::span)
        .def_readonly("source", &EventInterval::source);

    py::class_<Channel>(m, "Channel")
        .def_static("make", &Channel::make, py::arg("kind"), py::arg("sample_rate"),
                    py::arg("t0"), py::arg("samples"))
        .def_readonly("kind", &Channel::kind)
        .def_readonly("sample_rate", &Channel::sample_rate)
        .def_readonly("t0", &Channel::t0)
        .def_readonly("samples", &Channel::samples)
        .def_readonly("valid", &Channel::valid)
        .def("extent", &Channel::extent)
        .def("__len__", &Channel::size);

    py::class_<Recording>(m, "Recording")
        .def_readonly("participant_id", &Recording::participant_id)
        .def_readonly("center", &Recording::center)
        .def_readonly("spo2", &Recording::spo2)
        .def_readonly("fhr", &Recording::fhr)
        .def_readonly("annotations", &Recording::annotations)
        .def_readonly("total_span", &Recording::total_span)
        .def("events_of", &Recording::events_of);

    m.def("overlap_duration", &overlap_duration);
    m.def("union_duration", &union_duration);
    m.def("merge_intervals", &merge_intervals, py::arg("events"), py::arg("max_gap"));
    m.def("total_duration",
          py::overload_cast<const std::vector<EventInterval>&>(&total_duration));

    // link
    py::class_<HypoxicFeatures>(m, "HypoxicFeatures")
        .def_readonly("duration", &HypoxicFeatures::duration)
        .def_readonly("nadir", &HypoxicFeatures::nadir)
        .def_readonly("drop", &HypoxicFeatures::drop)
        .def_readonly("burden_area", &HypoxicFeatures::burden_area)
        .def_readonly("baseline", &HypoxicFeatures::baseline);

    py::class_<LinkedEvent>(m, "LinkedEvent")
        .def_readonly("hypoxia", &LinkedEvent::hypoxia)
        .def_readonly("fhr_event", &LinkedEvent::fhr_event)
        .def_readonly("link_kind", &LinkedEvent::link_kind)
        .def_readonly("linked_duration", &LinkedEvent::linked_duration)
        .def_readonly("features", &LinkedEvent::features);

    m.def("linked_duration", &linked_duration, py::arg("hypoxia"), py::arg("fhr"));
    m.def("link_events", &link_events, py::arg("hypoxic"), py::arg("fhr_events"),
          py::arg("window") = 30.0);
    m.def(
        "hypoxic_burden_area",
        [](const Channel& spo2, const TimeSpan& ev, double lookback, bool trapezoid) {
            BurdenOptions o;
            o.baseline_lookback = lookback;
            o.method = trapezoid ? BurdenOptions::Method::Trapezoid
                                 : BurdenOptions::Method::Simpson;
            return hypoxic_burden_area(spo2, ev, o);
        },
        py::arg("spo2"), py::arg("event"), py::arg("baseline_lookback") = 30.0,
        py::arg("trapezoid") = false);
    m.def(
        "event_features",
        [](const Channel& spo2, const TimeSpan& ev) { return event_features(spo2, ev); },
        py::arg("spo2"), py::arg("event"));
    m.def(
        "compute_features",
        [](std::vector<LinkedEvent> linked, const Channel& spo2) {
            compute_features(linked, spo2);
            return linked;
        },
        py::arg("linked"), py::arg("spo2"));

    // stats
    py::class_<ContingencyTable>(m, "ContingencyTable")
        .def(py::init([](double a1, double a2, double b1, double b2) {
                 return ContingencyTable{a1, a2, b1, b2};
             }),
             py::arg("a1"), py::arg("a2"), py::arg("b1"), py::arg("b2"))
        .def_readonly("a1", &ContingencyTable::a1)
        .def_readonly("a2", &ContingencyTable::a2)
        .def_readonly("b1", &ContingencyTable::b1)
        .def_readonly("b2", &ContingencyTable::b2)
        .def("grand_total", &ContingencyTable::grand_total)
        .def("odds_ratio", &ContingencyTable::odds_ratio);

    py::class_<TestResult>(m, "TestResult")
        .def_readonly("statistic", &TestResult::statistic)
        .def_readonly("df", &TestResult::df)
        .def_readonly("p_value", &TestResult::p_value);

    py::class_<GlmFit>(m, "GlmFit")
        .def_readonly("beta0", &GlmFit::beta0)
        .def_readonly("beta1", &GlmFit::beta1)
        .def_readonly("se0", &GlmFit::se0)
        .def_readonly("se1", &GlmFit::se1)
        .def_readonly("z1", &GlmFit::z1)
        .def_readonly("p1", &GlmFit::p1)
        .def_readonly("converged", &GlmFit::converged)
        .def_readonly("iterations", &GlmFit::iterations)
        .def_readonly("n", &GlmFit::n);

    py::class_<GlmRow>(m, "GlmRow")
        .def_readonly("feature", &GlmRow::feature)
        .def_readonly("fit", &GlmRow::fit)
        .def_readonly("error", &GlmRow::error);

    m.def("contingency_from_recording", &contingency_from_recording);
    m.def("aggregate_tables", &aggregate_tables);
    m.def("chi_square_test", &chi_square_test);
    m.def("welch_t_from_summary", &welch_t_from_summary, py::arg("m1"), py::arg("s1"),
          py::arg("n1"), py::arg("m2"), py::arg("s2"), py::arg("n2"));
    m.def("pooled_t_from_summary", &pooled_t_from_summary, py::arg("m1"), py::arg("s1"),
          py::arg("n1"), py::arg("m2"), py::arg("s2"), py::arg("n2"));
    m.def("fit_logistic_univariate", &fit_logistic_univariate, py::arg("x"), py::arg("y"));
    m.def("glm_feature_screen", &glm_feature_screen, py::arg("linked"), py::arg("outcome"));
    m.def("normal_sf", &normal_sf);
    m.def("chisq1_sf", &chisq1_sf);
    m.def("student_t_sf", &student_t_sf, py::arg("x"), py::arg("df"));

    // detect
    py::class_<DesatParams>(m, "DesatParams")
        .def(py::init<>())
        .def_readwrite("drop_threshold", &DesatParams::drop_threshold)
        .def_readwrite("baseline_window", &DesatParams::baseline_window)
        .def_readwrite("resat_margin", &DesatParams::resat_margin)
        .def_readwrite("min_duration", &DesatParams::min_duration)
        .def_readwrite("merge_gap", &DesatParams::merge_gap);
    py::class_<FhrParams>(m, "FhrParams")
        .def(py::init<>())
        .def_readwrite("baseline_window", &FhrParams::baseline_window)
        .def_readwrite("excursion", &FhrParams::excursion)
        .def_readwrite("min_duration", &FhrParams::min_duration)
        .def_readwrite("max_duration", &FhrParams::max_duration);
    m.def("detect_desaturations", &detect_desaturations, py::arg("spo2"),
          py::arg("params") = DesatParams{});
    m.def("detect_fhr_events", &detect_fhr_events, py::arg("fhr"),
          py::arg("params") = FhrParams{});

    // phase
    py::class_<PhaseStats>(m, "PhaseStats")
        .def_readonly("phase", &PhaseStats::phase)
        .def_readonly("mean", &PhaseStats::mean)
        .def_readonly("std_dev", &PhaseStats::std_dev)
        .def_readonly("cv", &PhaseStats::cv)
        .def_readonly("n_valid", &PhaseStats::n_valid)
        .def_readonly("valid_fraction", &PhaseStats::valid_fraction)
        .def_readonly("available", &PhaseStats::available);
    py::class_<PhaseWindows>(m, "PhaseWindows")
        .def_readonly("pre", &PhaseWindows::pre)
        .def_readonly("during_event", &PhaseWindows::during)
        .def_readonly("post", &PhaseWindows::post)
        .def_readonly("pre_clipped", &PhaseWindows::pre_clipped)
        .def_readonly("post_clipped", &PhaseWindows::post_clipped);
    py::class_<BoxSummary>(m, "BoxSummary")
        .def_readonly("q1", &BoxSummary::q1)
        .def_readonly("median", &BoxSummary::median)
        .def_readonly("q3", &BoxSummary::q3)
        .def_readonly("whisker_low", &BoxSummary::whisker_low)
        .def_readonly("whisker_high", &BoxSummary::whisker_high)
        .def_readonly("outliers", &BoxSummary::outliers)
        .def_readonly("n", &BoxSummary::n);
    m.def("phase_windows", &phase_windows, py::arg("event"), py::arg("recording_span"),
          py::arg("margin") = 10.0);
    m.def("window_stats", &window_stats, py::arg("fhr"), py::arg("window"),
          py::arg("phase") = Phase::During, py::arg("min_valid_fraction") = 0.5,
          py::arg("sample_std") = false);
    m.def("boxplot_summary", &boxplot_summary, py::arg("values"));

    // ingest
    py::class_<ScreenReport>(m, "ScreenReport")
        .def_readonly("participant_id", &ScreenReport::participant_id)
        .def_readonly("passed", &ScreenReport::passed)
        .def_property_readonly("reasons",
                               [](const ScreenReport& r) {
                                   std::vector<std::string> out;
                                   for (auto reason : r.reasons)
                                       out.push_back(to_string(reason));
                                   return out;
                               })
        .def_readonly("metrics", &ScreenReport::metrics);
    m.def(
        "quality_screen",
        [](const Recording& rec) { return quality_screen(rec); }, py::arg("recording"));
    m.def(
        "parse_signal_csv",
        [](const std::string& text, SignalKind kind) {
            std::istringstream in(text);
            return parse_signal_csv(in, kind);
        },
        py::arg("text"), py::arg("kind"));
    m.def(
        "parse_annotation_csv",
        [](const std::string& text) {
            std::istringstream in(text);
            return parse_annotation_csv(in);
        },
        py::arg("text"));
    m.def("load_manifest_recordings", [](const std::string& path) {
        std::vector<Recording> out;
        for (const auto& e : load_manifest(path)) out.push_back(load_recording(e));
        return out;
    });

    // synth
    py::class_<SynthConfig>(m, "SynthConfig")
        .def(py::init<>())
        .def_readwrite("n_participants", &SynthConfig::n_participants)
        .def_readwrite("hours", &SynthConfig::hours)
        .def_readwrite("hypoxia_rate", &SynthConfig::hypoxia_rate)
        .def_readwrite("duration_log_mu", &SynthConfig::duration_log_mu)
        .def_readwrite("duration_log_sigma", &SynthConfig::duration_log_sigma)
        .def_readwrite("coupling_prob", &SynthConfig::coupling_prob)
        .def_readwrite("spontaneous_acc_rate", &SynthConfig::spontaneous_acc_rate)
        .def_readwrite("spontaneous_dec_rate", &SynthConfig::spontaneous_dec_rate)
        .def_readwrite("noise_sd", &SynthConfig::noise_sd)
        .def_readwrite("seed", &SynthConfig::seed)
        .def_readwrite("duration_coupling", &SynthConfig::duration_coupling)
        .def_readwrite("coupling_beta0", &SynthConfig::coupling_beta0)
        .def_readwrite("coupling_beta1", &SynthConfig::coupling_beta1);
    py::class_<SynthResult>(m, "SynthResult")
        .def_readonly("recording", &SynthResult::recording)
        .def_readonly("n_hypoxic", &SynthResult::n_hypoxic)
        .def_readonly("n_coupled", &SynthResult::n_coupled);
    m.def("generate_recording", &generate_recording, py::arg("config"),
          py::arg("participant_index"));
    m.def("write_synth_cohort",
          [](const SynthConfig& cfg, const std::string& dir, const std::string& center) {
              auto s = write_synth_cohort(cfg, dir, center);
              return py::make_tuple(s.manifest_path, s.n_participants, s.total_hypoxic,
                                    s.total_coupled);
          },
          py::arg("config"), py::arg("dir"), py::arg("center") = "synth");

    // pipeline
    m.def(
        "analyze_cohort",
        [](const std::string& manifest, const std::string& outdir, bool svg,
           bool timestamp) {
            RunConfig cfg;
            cfg.manifest_path = manifest;
            cfg.output_dir = outdir;
            cfg.write_svg = svg;
            cfg.timestamp = timestamp;
            AnalysisBundle bundle = run_analyze(cfg);
            write_reports(bundle, cfg);
            py::dict out;
            out["n_passed"] = bundle.n_passed;
            out["n_failed_screen"] = bundle.n_failed_screen;
            for (const auto& ka : bundle.by_kind) {
                py::dict kj;
                kj["a1"] = ka.aggregate.a1;
                kj["a2"] = ka.aggregate.a2;
                kj["b1"] = ka.aggregate.b1;
                kj["b2"] = ka.aggregate.b2;
                if (ka.test) {
                    kj["chi2"] = ka.test->statistic;
                    kj["p"] = ka.test->p_value;
                }
                out[ka.kind == EventKind::Acceleration ? "acceleration" : "deceleration"] =
                    kj;
            }
            return out;
        },
        py::arg("manifest"), py::arg("outdir"), py::arg("svg") = false,
        py::arg("timestamp") = false);
}
