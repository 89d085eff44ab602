// fetalink CLI: validate | detect | link | analyze | synth | report
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fetalink/pipeline.hpp"
#include "fetalink/svg.hpp"
#include "fetalink/synth.hpp"

namespace fs = std::filesystem;
using namespace fetalink;

namespace {

std::string trim_ws(std::string s) {
    auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && sp(s.front())) s.erase(s.begin());
    while (!s.empty() && sp(s.back())) s.pop_back();
    return s;
}

// `key = value` config file; keys are the long option names of the invoked
// subcommand. Values given on the command line win over file values.
std::vector<std::string> apply_config_file(std::vector<std::string> args) {
    std::string path;
    for (auto it = args.begin(); it != args.end();) {
        if (*it == "--config") {
            if (std::next(it) == args.end())
                throw std::runtime_error("--config requires a file path");
            path = *std::next(it);
            it = args.erase(it, std::next(it, 2));
        } else if (it->rfind("--config=", 0) == 0) {
            path = it->substr(9);
            it = args.erase(it);
        } else {
            ++it;
        }
    }
    if (path.empty()) return args;

    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim_ws(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + " line " + std::to_string(lineno) +
                                     ": expected key=value");
        std::string key = trim_ws(line.substr(0, eq));
        std::string value = trim_ws(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        if (key.empty())
            throw std::runtime_error(path + " line " + std::to_string(lineno) +
                                     ": empty key");
        std::string flag = "--" + key;
        bool present = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (!present) args.push_back(flag + "=" + value);
    }
    return args;
}

void add_screen_flags(CLI::App* cmd, ScreenPolicy& p) {
    cmd->add_option("--max-invalid-run", p.max_invalid_run,
                    "Max contiguous invalid/zero signal, seconds");
    cmd->add_option("--max-invalid-fraction", p.max_invalid_fraction,
                    "Max invalid sample fraction per channel");
    cmd->add_option("--max-spo2-jump", p.max_spo2_jump,
                    "Max |dSpO2| between valid samples, %/s");
}

void add_detector_flags(CLI::App* cmd, DesatParams& d, FhrParams& f) {
    cmd->add_option("--desat-drop", d.drop_threshold, "Desaturation threshold, %");
    cmd->add_option("--desat-baseline-window", d.baseline_window,
                    "Desaturation baseline lookback, s");
    cmd->add_option("--desat-resat-margin", d.resat_margin, "Resaturation margin, %");
    cmd->add_option("--desat-min-duration", d.min_duration, "Min desaturation, s");
    cmd->add_option("--desat-merge-gap", d.merge_gap, "Merge gap for desaturations, s");
    cmd->add_option("--fhr-baseline-window", f.baseline_window,
                    "FHR rolling-median window, s");
    cmd->add_option("--fhr-excursion", f.excursion, "FHR excursion threshold, bpm");
    cmd->add_option("--fhr-min-duration", f.min_duration, "Min FHR event, s");
    cmd->add_option("--fhr-max-duration", f.max_duration, "Max FHR event, s");
}

int run_validate_cmd(const std::string& manifest, const ScreenPolicy& policy,
                     const std::string& out) {
    auto reports = run_validate(manifest, policy);
    int passed = 0;
    for (const auto& r : reports) passed += r.passed ? 1 : 0;
    if (!out.empty()) {
        fs::create_directories(out);
        write_screen_json(reports, (fs::path(out) / "screen.json").string(), true);
    }
    std::cout << "screened " << reports.size() << " participants: " << passed
              << " passed, " << reports.size() - passed << " failed\n";
    for (const auto& r : reports) {
        if (r.passed) continue;
        std::cout << "  " << r.participant_id << ":";
        for (auto reason : r.reasons) std::cout << ' ' << to_string(reason);
        std::cout << "\n";
    }
    return 0;
}

int run_detect_cmd(const std::string& manifest, const DesatParams& d, const FhrParams& f,
                   const std::string& out) {
    auto entries = load_manifest(manifest);
    if (entries.empty()) throw std::runtime_error("manifest lists no participants");
    fs::create_directories(out);
    for (const auto& e : entries) {
        Recording rec = load_recording(e);
        auto events = detect_desaturations(rec.spo2, d);
        auto fhr_events = detect_fhr_events(rec.fhr, f);
        events.insert(events.end(), fhr_events.begin(), fhr_events.end());
        std::sort(events.begin(), events.end(),
                  [](const auto& a, const auto& b) { return a.span.start < b.span.start; });
        std::ofstream os(fs::path(out) / (e.participant_id + ".detected.csv"),
                         std::ios::binary);
        write_annotation_csv(os, events);
        std::cout << e.participant_id << ": " << events.size() << " events detected\n";
    }
    return 0;
}

int run_link_cmd(RunConfig cfg) {
    cfg.chi_square = cfg.glm = cfg.phase = false;  // linking only
    AnalysisBundle bundle = run_analyze(cfg);
    fs::create_directories(cfg.output_dir);
    std::ofstream os(fs::path(cfg.output_dir) / "linked_events.csv", std::ios::binary);
    bool header = true;
    int pairings = 0;
    for (const auto& pa : bundle.participants) {
        write_linked_events_csv(os, pa.entry.participant_id, pa.linked, header);
        header = false;
        for (const auto& le : pa.linked) pairings += le.link_kind != LinkKind::None;
    }
    std::cout << "wrote linked_events.csv (" << pairings << " linked pairings, "
              << bundle.n_passed << " participants)\n";
    return 0;
}

int run_analyze_cmd(const RunConfig& cfg) {
    AnalysisBundle bundle = run_analyze(cfg);
    write_reports(bundle, cfg);
    for (const auto& ka : bundle.by_kind) {
        std::cout << (ka.kind == EventKind::Acceleration ? "acceleration" : "deceleration");
        if (ka.test)
            std::cout << ": chi2 = " << ka.test->statistic << ", p = " << ka.test->p_value
                      << "\n";
        else
            std::cout << ": " << ka.test_error << "\n";
    }
    std::cout << "reports written to " << cfg.output_dir << "\n";
    return 0;
}

int run_synth_cmd(const SynthConfig& cfg, const std::string& out,
                  const std::string& center) {
    auto summary = write_synth_cohort(cfg, out, center);
    std::cout << "wrote " << summary.n_participants << " participants to " << out << "\n"
              << "planted hypoxic events: " << summary.total_hypoxic
              << ", coupled accelerations: " << summary.total_coupled << "\n"
              << "manifest: " << summary.manifest_path << "\n";
    return 0;
}

int run_report_cmd(const std::string& bundle_dir, bool svg) {
    // re-render derived artifacts from phase.json
    std::ifstream f(fs::path(bundle_dir) / "phase.json");
    if (!f) throw std::runtime_error("cannot open phase.json under " + bundle_dir);
    nlohmann::json j;
    f >> j;

    PhaseReport rep;
    const char* phase_names[3] = {"pre", "during", "post"};
    for (int p = 0; p < 3; ++p) {
        if (!j.contains(phase_names[p])) continue;
        const auto& pj = j[phase_names[p]];
        for (int m = 0; m < 3; ++m) {
            const char* name = PhaseReport::metric_names[m];
            if (!pj.contains(name)) continue;
            PhaseMetricSummary sm;
            const auto& bx = pj[name]["box"];
            sm.box.q1 = bx["q1"];
            sm.box.median = bx["median"];
            sm.box.q3 = bx["q3"];
            sm.box.whisker_low = bx["whisker_low"];
            sm.box.whisker_high = bx["whisker_high"];
            sm.box.n = bx["n"];
            sm.grand_mean = pj[name]["grand_mean"];
            rep.summary[p][m] = sm;
        }
    }
    if (svg) {
        std::ofstream out(fs::path(bundle_dir) / "phase.svg", std::ios::binary);
        out << render_phase_svg(rep);
        std::cout << "wrote phase.svg\n";
    }
    std::cout << "report bundle " << bundle_dir << " ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal analysis of maternal SpO2 desaturations and fetal heart rate"};
    app.require_subcommand(1);
    app.footer("Every subcommand also accepts --config <file>: one key=value per line,\n"
               "keys are the subcommand's long option names, flags override the file.");

    // validate
    auto* v = app.add_subcommand("validate", "Screen a cohort manifest for data quality");
    std::string v_manifest, v_out;
    ScreenPolicy v_policy;
    v->add_option("manifest", v_manifest, "Cohort manifest JSON")->required();
    v->add_option("-o,--out", v_out, "Directory for screen.json");
    add_screen_flags(v, v_policy);

    // detect
    auto* d = app.add_subcommand("detect", "Run event detectors, write annotation CSVs");
    std::string d_manifest, d_out = "detected";
    DesatParams d_desat;
    FhrParams d_fhr;
    d->add_option("manifest", d_manifest, "Cohort manifest JSON")->required();
    d->add_option("-o,--out", d_out, "Output directory");
    add_detector_flags(d, d_desat, d_fhr);

    // link / analyze share RunConfig
    RunConfig l_cfg, a_cfg;
    auto* l = app.add_subcommand("link", "Link hypoxic events to FHR events, export CSV");
    l->add_option("manifest", l_cfg.manifest_path, "Cohort manifest JSON")->required();
    l->add_option("-o,--out", l_cfg.output_dir, "Output directory")->required();
    l->add_option("--window", l_cfg.link_window, "Link window, s");
    l->add_flag("!--no-from-annotations", l_cfg.from_annotations,
                "Run detectors when annotations are missing");
    add_detector_flags(l, l_cfg.desat, l_cfg.fhr_params);
    add_screen_flags(l, l_cfg.screen);

    auto* a = app.add_subcommand("analyze", "Full analysis: chi-square, GLM, features, phases");
    a->add_option("manifest", a_cfg.manifest_path, "Cohort manifest JSON")->required();
    a->add_option("-o,--out", a_cfg.output_dir, "Output directory")->required();
    a->add_option("--window", a_cfg.link_window, "Link window, s");
    a->add_flag("!--no-from-annotations", a_cfg.from_annotations,
                "Run detectors when annotations are missing");
    a->add_flag("!--no-chi-square", a_cfg.chi_square, "Skip the chi-square analysis");
    a->add_flag("!--no-glm", a_cfg.glm, "Skip the GLM screens");
    a->add_flag("!--no-phase", a_cfg.phase, "Skip the phase report");
    a->add_flag("!--no-csv", a_cfg.write_csv, "Skip CSV mirrors");
    a->add_flag("--svg", a_cfg.write_svg, "Render phase.svg");
    a->add_flag("!--no-timestamp", a_cfg.timestamp,
                "Omit generated_at for byte-identical reruns");
    a->add_option("--baseline-lookback", a_cfg.burden.baseline_lookback,
                  "Burden baseline lookback before event onset, s");
    add_detector_flags(a, a_cfg.desat, a_cfg.fhr_params);
    add_screen_flags(a, a_cfg.screen);

    // synth
    auto* s = app.add_subcommand("synth", "Generate a synthetic cohort on disk");
    SynthConfig s_cfg;
    std::string s_out = "synth_cohort", s_center = "synth";
    s->add_option("-o,--out", s_out, "Output directory");
    s->add_option("--participants", s_cfg.n_participants, "Number of participants");
    s->add_option("--hours", s_cfg.hours, "Recording length, hours");
    s->add_option("--seed", s_cfg.seed, "RNG seed");
    s->add_option("--hypoxia-rate", s_cfg.hypoxia_rate, "Hypoxic events per hour");
    s->add_option("--duration-log-mu", s_cfg.duration_log_mu, "ln-seconds location");
    s->add_option("--duration-log-sigma", s_cfg.duration_log_sigma, "ln-seconds scale");
    s->add_option("--coupling", s_cfg.coupling_prob, "P(acceleration | hypoxic event)");
    s->add_option("--spontaneous-acc-rate", s_cfg.spontaneous_acc_rate,
                  "Spontaneous accelerations per hour");
    s->add_option("--spontaneous-dec-rate", s_cfg.spontaneous_dec_rate,
                  "Spontaneous decelerations per hour");
    s->add_option("--noise-sd", s_cfg.noise_sd, "FHR white-noise sd, bpm");
    s->add_option("--center", s_center, "Center label stored in the manifest");

    // report
    auto* r = app.add_subcommand("report", "Re-render derived artifacts from a bundle");
    std::string r_dir;
    bool r_svg = false;
    r->add_option("bundle", r_dir, "Directory holding analyze output")->required();
    r->add_flag("--svg", r_svg, "Render phase.svg from phase.json");

    try {
        // --config is stripped before CLI11 sees the args; flags override it
        std::vector<std::string> args(argv + 1, argv + argc);
        args = apply_config_file(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (v->parsed()) return run_validate_cmd(v_manifest, v_policy, v_out);
        if (d->parsed()) return run_detect_cmd(d_manifest, d_desat, d_fhr, d_out);
        if (l->parsed()) return run_link_cmd(l_cfg);
        if (a->parsed()) return run_analyze_cmd(a_cfg);
        if (s->parsed()) return run_synth_cmd(s_cfg, s_out, s_center);
        if (r->parsed()) return run_report_cmd(r_dir, r_svg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
