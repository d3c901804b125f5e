#include "ladderkit/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "ladderkit/admittance_csv.hpp"
#include "ladderkit/fitting.hpp"
#include "ladderkit/json_io.hpp"
#include "ladderkit/ladder.hpp"
#include "ladderkit/touchstone.hpp"
#include "text.hpp"

namespace ladderkit {

namespace {

// Bad flag values or unreadable inputs; reported with exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Outputs are collected first and written only after every computation
// succeeded, so a failing command leaves no partial files behind.
class Outputs {
public:
    void add(const std::string& path, std::string content) { files_.emplace_back(path, std::move(content)); }

    void commit(std::ostream& out) const {
        for (const auto& [path, content] : files_) {
            if (path.empty() || path == "-") {
                out << content;
                continue;
            }
            std::ofstream f(path, std::ios::binary);
            if (!f || !(f << content)) throw Error("cannot write '" + path + "'");
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> files_;
};

std::pair<double, double> parse_band(const std::string& text) {
    const auto parts = split_char(text, ':');
    if (parts.size() != 2) throw UsageError("band must look like LO:HI in Hz, got '" + text + "'");
    const auto lo = parse_double(trim(parts[0]));
    const auto hi = parse_double(trim(parts[1]));
    if (!lo || !hi || !(*lo > 0.0) || !(*hi >= *lo)) throw UsageError("invalid band '" + text + "'");
    return {*lo, *hi};
}

bool ends_with_ci(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && lower(s.substr(s.size() - suffix.size())) == suffix;
}

Json metrics_or_null(const std::optional<FilterMetrics>& m) { return m ? to_json(*m) : Json(nullptr); }

Json port_json(const PortImpedance& z) { return Json{{"r_ohm", z.r()}, {"x_ohm", z.x()}}; }

double gain_db(double g) { return 10.0 * std::log10(g); }

// --- subcommands -----------------------------------------------------------

struct SimulateArgs {
    std::string config, out, metrics;
    std::string unit = "GHz";
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const DesignConfig cfg = read_design_config(read_file(a.config));
    const LadderDesign design = cfg.design();
    const SSweep s = simulate(design, cfg.grid.frequencies());
    TouchstoneHeader h;
    h.format = DataFormat::RI;
    h.unit = a.unit == "Hz" ? FreqUnit::Hz : a.unit == "kHz" ? FreqUnit::kHz
                            : a.unit == "MHz" ? FreqUnit::MHz : FreqUnit::GHz;
    h.reference = design.port1.r();
    Outputs files;
    if (!a.metrics.empty()) files.add(a.metrics, to_json(extract_metrics(s, cfg.guard_fraction)).dump(2) + "\n");
    files.add(a.out, write_touchstone(h, s));
    files.commit(out);
}

struct FitArgs {
    std::string data, out, config;
    std::uint64_t seed = 1;
    int restarts = 0;
    bool no_parasitics = false;
};

void cmd_fit(const FitArgs& a, std::ostream& out) {
    FitOptions opts;
    if (!a.config.empty()) opts = read_design_config(read_file(a.config)).fit;
    opts.seed = a.seed;
    if (a.restarts > 0) opts.restarts = a.restarts;
    if (a.no_parasitics) opts.fit_parasitics = false;

    const std::string text = read_file(a.data);
    AdmittanceData d;
    if (ends_with_ci(a.data, ".s1p")) {
        const TouchstoneData ts = read_touchstone(text, 1);
        for (std::size_t i = 0; i < ts.sweep.size(); ++i) {
            d.freqs.push_back(ts.sweep.freq(i));
            d.y.push_back(s11_to_admittance(ts.sweep[i].s11, ts.header.reference));
        }
    } else {
        d = read_admittance_csv(text);
    }
    FitResult r;
    try {
        r = fit_mbvd(d.freqs, d.y, opts);
    } catch (const InitError& e) {
        throw InitError(std::string(e.what()) + "; the sweep must contain fs and fp");
    }
    Outputs files;
    files.add(a.out, to_json(r).dump(2) + "\n");
    files.commit(out);
}

struct SynthesizeArgs {
    std::string config, band, out;
    std::uint64_t seed = 1;
    double min_rejection = NAN;
};

void cmd_synthesize(const SynthesizeArgs& a, std::ostream& out) {
    DesignConfig cfg = read_design_config(read_file(a.config));
    if (!a.band.empty()) {
        const auto [lo, hi] = parse_band(a.band);
        cfg.band_lo_hz = lo;
        cfg.band_hi_hz = hi;
    }
    if (!cfg.band_lo_hz) throw UsageError("no target band: pass --band LO:HI or set synthesis.band_lo_hz/band_hi_hz");
    if (!std::isnan(a.min_rejection)) cfg.synthesis.min_rejection_db = a.min_rejection;
    const auto tmpl = cfg.ladder_template();
    const auto grid = cfg.grid.frequencies();
    const SynthesisResult r = optimize_static_caps(tmpl, *cfg.band_lo_hz, *cfg.band_hi_hz, grid, cfg.synthesis);
    apply_static_caps(cfg, r.c0_shunt, r.c0_series);
    cfg.synthesis_result = {{"c0_shunt_f", r.c0_shunt},
                            {"c0_series_f", r.c0_series},
                            {"objective_db", r.objective},
                            {"metrics", to_json(r.metrics)},
                            {"seed", a.seed}};
    Outputs files;
    files.add(a.out, write_design_config(cfg));
    files.commit(out);
}

struct MatchArgs {
    std::string in, config, out, band;
    bool independent = false;
};

void cmd_match(const MatchArgs& a, std::ostream& out) {
    if (a.in.empty() == a.config.empty()) throw UsageError("pass exactly one of --in or --config");
    MatchOptions opts;
    AbcdSweep abcd;
    if (!a.config.empty()) {
        const DesignConfig cfg = read_design_config(read_file(a.config));
        opts = cfg.match;
        abcd = ladder_abcd_sweep(cfg.design(), cfg.grid.frequencies());
    } else {
        const TouchstoneData ts = read_touchstone(read_file(a.in), 2);
        abcd = s_sweep_to_abcd(ts.sweep, ts.header.reference);
    }
    if (a.independent) opts.independent_ports = true;
    if (!a.band.empty()) {
        const auto [lo, hi] = parse_band(a.band);
        opts.band_lo = lo;
        opts.band_hi = hi;
    }
    const MatchResult r = find_complex_match(abcd, opts);
    Json j;
    j["z_opt"] = {{"port1", port_json(r.z1)}, {"port2", port_json(r.z2)}};
    j["matched_peak_gain_db"] = gain_db(r.peak_gain);
    j["reference_peak_gain_db"] = gain_db(r.reference_gain);
    j["window_lo_hz"] = r.window_lo ? Json(*r.window_lo) : Json(nullptr);
    j["window_hi_hz"] = r.window_hi ? Json(*r.window_hi) : Json(nullptr);
    j["matched"] = metrics_or_null(r.matched_metrics);
    j["unmatched_50ohm"] = metrics_or_null(r.reference_metrics);
    Outputs files;
    files.add(a.out, j.dump(2) + "\n");
    files.commit(out);
}

struct MetricsArgs {
    std::string in, out, trace;
    double guard = 0.25;
};

void cmd_metrics(const MetricsArgs& a, std::ostream& out) {
    if (!(a.guard >= 0.0)) throw UsageError("--guard must be >= 0");
    const TouchstoneData ts = read_touchstone(read_file(a.in), 2);
    const FilterMetrics m = extract_metrics(ts.sweep, a.guard);
    Outputs files;
    if (!a.trace.empty()) {
        std::string csv = "freq_hz,s21_db,s11_db\n";
        char buf[128];
        for (std::size_t i = 0; i < ts.sweep.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.15g,%.9g,%.9g\n", ts.sweep.freq(i), db20(ts.sweep[i].s21),
                          db20(ts.sweep[i].s11));
            csv += buf;
        }
        files.add(a.trace, std::move(csv));
    }
    files.add(a.out, to_json(m).dump(2) + "\n");
    files.commit(out);
}

struct SynthDataArgs {
    std::string spec, grid = "30e9:60e9:3001", noise = "0,0", out;
    std::uint64_t seed = 1;
    double f_em = 0.0;
};

ResonatorSpec parse_spec_flag(const std::string& text) {
    ResonatorSpec s;
    bool seen_fs = false, seen_k2 = false, seen_q = false, seen_c0 = false;
    for (auto item : split_char(text, ',')) {
        const auto kv = split_char(trim(item), '=');
        if (kv.size() != 2) throw UsageError("--spec entries look like key=value, got '" + std::string(item) + "'");
        const std::string key = lower(trim(kv[0]));
        const auto v = parse_double(trim(kv[1]));
        if (!v) throw UsageError("--spec value for '" + key + "' is not a number");
        if (key == "fs_hz") { s.fs = *v; seen_fs = true; }
        else if (key == "k2") { s.k2 = *v; seen_k2 = true; }
        else if (key == "q") { s.q = *v; seen_q = true; }
        else if (key == "c0_f") { s.c0 = *v; seen_c0 = true; }
        else if (key == "rs_ohm") s.rs = *v;
        else if (key == "ls_h") s.ls = *v;
        else throw UsageError("unknown --spec key '" + key + "'");
    }
    if (!(seen_fs && seen_k2 && seen_q && seen_c0)) throw UsageError("--spec needs fs_hz, k2, q and c0_f");
    s.validate();
    return s;
}

void cmd_synth_data(const SynthDataArgs& a, std::ostream& out) {
    ResonatorSpec spec = parse_spec_flag(a.spec);
    if (a.f_em > 0.0) {
        const double w = 2.0 * std::numbers::pi * a.f_em;
        spec.ls = 1.0 / (w * w * spec.c0);
    }
    const MbvdParams p = mbvd_from_spec(spec);

    const auto g = split_char(a.grid, ':');
    if (g.size() != 3) throw UsageError("--grid must look like START:STOP:POINTS");
    const auto start = parse_double(trim(g[0]));
    const auto stop = parse_double(trim(g[1]));
    const auto pts = parse_double(trim(g[2]));
    if (!start || !stop || !pts || !(*start > 0.0) || !(*stop > *start) || !(*pts >= 2.0) ||
        std::floor(*pts) != *pts) {
        throw UsageError("invalid --grid '" + a.grid + "'");
    }
    const auto noise = split_char(a.noise, ',');
    if (noise.size() != 2) throw UsageError("--noise must look like MAG_FRACTION,PHASE_DEG");
    const auto sm = parse_double(trim(noise[0]));
    const auto sp = parse_double(trim(noise[1]));
    if (!sm || !sp || *sm < 0.0 || *sp < 0.0) throw UsageError("invalid --noise '" + a.noise + "'");

    const auto freqs = linspace(*start, *stop, static_cast<std::size_t>(*pts));
    std::vector<Complex> y(freqs.size());
    std::mt19937_64 rng(a.seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        y[i] = admittance(p, freqs[i]);
        if (*sm > 0.0 || *sp > 0.0) {
            const double mag = std::abs(y[i]) * (1.0 + *sm * unit(rng));
            const double ph = std::arg(y[i]) + *sp * std::numbers::pi / 180.0 * unit(rng);
            y[i] = std::polar(mag, ph);
        }
    }
    Outputs files;
    files.add(a.out, write_admittance_csv(freqs, y));
    files.commit(out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"ladderkit: acoustic-resonator ladder filter modeling, synthesis and fitting"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a ladder design to Touchstone and metrics");
    simulate_cmd->add_option("--config", sim.config, "Design config JSON")->required();
    simulate_cmd->add_option("--out", sim.out, "Output .s2p (standard output when omitted)");
    simulate_cmd->add_option("--metrics", sim.metrics, "Filter metrics JSON output");
    simulate_cmd->add_option("--unit", sim.unit, "Frequency unit of the Touchstone output")
        ->check(CLI::IsMember({"Hz", "kHz", "MHz", "GHz"}));

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit MBVD parameters to an admittance sweep");
    fit_cmd->add_option("--data", fit.data, "Admittance CSV or one-port .s1p")->required();
    fit_cmd->add_option("--out", fit.out, "Fit result JSON (standard output when omitted)");
    fit_cmd->add_option("--config", fit.config, "Config JSON whose \"fit\" section sets the options");
    fit_cmd->add_option("--seed", fit.seed, "Seed for restart perturbations");
    fit_cmd->add_option("--restarts", fit.restarts, "Number of optimizer restarts");
    fit_cmd->add_flag("--no-parasitics", fit.no_parasitics, "Hold rs and ls at zero");

    SynthesizeArgs syn;
    auto* syn_cmd = app.add_subcommand("synthesize", "Choose static capacitances for minimum insertion loss");
    syn_cmd->add_option("--config", syn.config, "Template config JSON")->required();
    syn_cmd->add_option("--band", syn.band, "Target band LO:HI in Hz");
    syn_cmd->add_option("--out", syn.out, "Completed design config (standard output when omitted)");
    syn_cmd->add_option("--seed", syn.seed, "Recorded in the output; the search itself is deterministic");
    syn_cmd->add_option("--min-rejection", syn.min_rejection, "Out-of-band rejection floor in dB");

    MatchArgs mat;
    auto* match_cmd = app.add_subcommand("match", "Find the complex port impedance that minimizes IL");
    match_cmd->add_option("--in", mat.in, "Two-port .s2p response");
    match_cmd->add_option("--config", mat.config, "Design config JSON");
    match_cmd->add_option("--out", mat.out, "Result JSON (standard output when omitted)");
    match_cmd->add_option("--band", mat.band, "Restrict the peak search to LO:HI in Hz");
    match_cmd->add_flag("--independent", mat.independent, "Search port 1 and port 2 impedances separately");

    MetricsArgs met;
    auto* metrics_cmd = app.add_subcommand("metrics", "Extract passband metrics from an .s2p file");
    metrics_cmd->add_option("--in", met.in, "Two-port .s2p response")->required();
    metrics_cmd->add_option("--guard", met.guard, "Out-of-band guard as a fraction of the 3-dB bandwidth");
    metrics_cmd->add_option("--out", met.out, "Metrics JSON (standard output when omitted)");
    metrics_cmd->add_option("--dump-trace", met.trace, "Write freq_hz,s21_db,s11_db CSV here");

    SynthDataArgs sd;
    auto* sd_cmd = app.add_subcommand("synth-data", "Generate a (noisy) MBVD admittance sweep as CSV");
    sd_cmd->add_option("--spec", sd.spec, "fs_hz=..,k2=..,q=..,c0_f=..[,rs_ohm=..][,ls_h=..]")->required();
    sd_cmd->add_option("--f-em", sd.f_em, "Set ls so the routing resonance sits at this frequency (Hz)");
    sd_cmd->add_option("--grid", sd.grid, "START:STOP:POINTS in Hz");
    sd_cmd->add_option("--noise", sd.noise, "Gaussian sigma: MAG_FRACTION,PHASE_DEG");
    sd_cmd->add_option("--seed", sd.seed, "Noise seed");
    sd_cmd->add_option("--out", sd.out, "CSV output (standard output when omitted)");

    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.emplace_back("ladderkit");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*simulate_cmd) cmd_simulate(sim, out);
        else if (*fit_cmd) cmd_fit(fit, out);
        else if (*syn_cmd) cmd_synthesize(syn, out);
        else if (*match_cmd) cmd_match(mat, out);
        else if (*metrics_cmd) cmd_metrics(met, out);
        else if (*sd_cmd) cmd_synth_data(sd, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitOk;
}

}  // namespace ladderkit
