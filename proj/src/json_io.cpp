#include "ladderkit/json_io.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>

namespace ladderkit {

namespace {

// Schema reader over one JSON object; every lookup reports its full path.
class Obj {
public:
    Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw SchemaError(path_, "expected an object");
    }

    void allow_only(std::initializer_list<const char*> keys) const {
        const std::set<std::string> ok(keys.begin(), keys.end());
        for (const auto& item : j_.items()) {
            if (!ok.count(item.key())) throw SchemaError(at(item.key()), "unknown field");
        }
    }

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
    std::string at(const std::string& key) const { return path_ + "/" + key; }
    const Json& raw(const char* key) const { return j_.at(key); }

    double number(const char* key) const {
        if (!j_.contains(key)) throw SchemaError(at(key), "missing required field");
        const Json& v = j_.at(key);
        if (!v.is_number()) throw SchemaError(at(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw SchemaError(at(key), "must be finite");
        return d;
    }

    double number_or(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

    long long integer_or(const char* key, long long fallback) const {
        if (!has(key)) return fallback;
        const Json& v = j_.at(key);
        if (!v.is_number_integer()) throw SchemaError(at(key), "expected an integer");
        return v.get<long long>();
    }

    bool boolean_or(const char* key, bool fallback) const {
        if (!has(key)) return fallback;
        const Json& v = j_.at(key);
        if (!v.is_boolean()) throw SchemaError(at(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const char* key) const {
        if (!j_.contains(key)) throw SchemaError(at(key), "missing required field");
        const Json& v = j_.at(key);
        if (!v.is_string()) throw SchemaError(at(key), "expected a string");
        return v.get<std::string>();
    }

private:
    const Json& j_;
    std::string path_;
};

PortImpedance read_port(const Json& j, const std::string& path) {
    Obj o(j, path);
    o.allow_only({"r_ohm", "x_ohm"});
    const double r = o.number("r_ohm");
    if (!(r > 0.0)) throw SchemaError(o.at("r_ohm"), "must be > 0");
    return PortImpedance(r, o.number_or("x_ohm", 0.0));
}

Json port_json(const PortImpedance& z) { return Json{{"r_ohm", z.r()}, {"x_ohm", z.x()}}; }

ResonatorSpec read_spec(const Obj& o, bool& c0_given) {
    o.allow_only({"fs_hz", "k2", "q", "c0_f", "rs_ohm", "ls_h"});
    ResonatorSpec s;
    s.fs = o.number("fs_hz");
    s.k2 = o.number("k2");
    s.q = o.number("q");
    c0_given = o.has("c0_f");
    s.c0 = o.number_or("c0_f", 1.0);  // placeholder keeps validate() meaningful
    s.rs = o.number_or("rs_ohm", 0.0);
    s.ls = o.number_or("ls_h", 0.0);
    if (!(s.fs > 0.0)) throw SchemaError(o.at("fs_hz"), "must be > 0");
    if (!(s.k2 > 0.0 && s.k2 < 1.0)) throw SchemaError(o.at("k2"), "must lie in (0, 1)");
    if (!(s.q > 0.0)) throw SchemaError(o.at("q"), "must be > 0");
    if (!(s.c0 > 0.0)) throw SchemaError(o.at("c0_f"), "must be > 0");
    if (!(s.rs >= 0.0)) throw SchemaError(o.at("rs_ohm"), "must be >= 0");
    if (!(s.ls >= 0.0)) throw SchemaError(o.at("ls_h"), "must be >= 0");
    if (!c0_given) s.c0 = 0.0;
    return s;
}

MbvdParams read_params(const Obj& o) {
    o.allow_only({"c0_f", "rm_ohm", "lm_h", "cm_f", "rs_ohm", "ls_h"});
    MbvdParams p;
    p.c0 = o.number("c0_f");
    p.rm = o.number("rm_ohm");
    p.lm = o.number("lm_h");
    p.cm = o.number("cm_f");
    p.rs = o.number_or("rs_ohm", 0.0);
    p.ls = o.number_or("ls_h", 0.0);
    using Field = std::pair<const char*, double>;
    for (auto [key, v] : std::initializer_list<Field>{{"c0_f", p.c0}, {"lm_h", p.lm}, {"cm_f", p.cm}}) {
        if (!(v > 0.0)) throw SchemaError(o.at(key), "must be > 0");
    }
    for (auto [key, v] : std::initializer_list<Field>{{"rm_ohm", p.rm}, {"rs_ohm", p.rs}, {"ls_h", p.ls}}) {
        if (!(v >= 0.0)) throw SchemaError(o.at(key), "must be >= 0");
    }
    return p;
}

StageConfig read_stage(const Json& j, const std::string& path) {
    Obj o(j, path);
    o.allow_only({"placement", "spec", "params"});
    StageConfig st;
    const std::string placement = o.string("placement");
    if (placement == "shunt") st.placement = Placement::Shunt;
    else if (placement == "series") st.placement = Placement::Series;
    else throw SchemaError(o.at("placement"), "expected \"shunt\" or \"series\"");
    if (!o.has("spec") && !o.has("params")) throw SchemaError(path, "stage needs \"spec\" or \"params\"");
    if (o.has("spec")) {
        bool c0_given = false;
        st.spec = read_spec(Obj(o.raw("spec"), o.at("spec")), c0_given);
        if (c0_given && !o.has("params")) st.params = mbvd_from_spec(*st.spec);
    }
    if (o.has("params")) st.params = read_params(Obj(o.raw("params"), o.at("params")));
    return st;
}

Json stage_json(const StageConfig& st) {
    Json j{{"placement", st.placement == Placement::Shunt ? "shunt" : "series"}};
    if (st.spec) {
        Json s = to_json(*st.spec);
        if (st.spec->c0 == 0.0) s.erase("c0_f");
        j["spec"] = s;
    }
    if (st.params) j["params"] = to_json(*st.params);
    return j;
}

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

LadderDesign DesignConfig::design() const {
    LadderDesign d{{}, port1, port2};
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (!stages[i].params) {
            throw SchemaError("/stages/" + std::to_string(i) + "/spec/c0_f",
                              "stage has no static capacitance; run synthesize first");
        }
        d.stages.push_back({stages[i].placement, *stages[i].params});
    }
    if (d.stages.empty()) throw SchemaError("/stages", "at least one stage is required");
    return d;
}

LadderTemplate DesignConfig::ladder_template() const {
    LadderTemplate t{{}, port1, port2};
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (!stages[i].spec) {
            throw SchemaError("/stages/" + std::to_string(i) + "/spec", "synthesis needs a resonator spec");
        }
        t.stages.push_back({stages[i].placement, *stages[i].spec});
    }
    if (t.stages.empty()) throw SchemaError("/stages", "at least one stage is required");
    return t;
}

DesignConfig read_design_config(std::string_view text) {
    Json root;
    try {
        root = Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::exception& e) {
        // Syntax errors and out-of-range numbers alike.
        throw ParseError(0, std::string("invalid JSON: ") + e.what());
    }
    Obj o(root, "");
    o.allow_only({"ports", "grid", "stages", "synthesis", "fit", "match", "metrics", "synthesis_result"});
    DesignConfig cfg;

    if (o.has("ports")) {
        const Json& p = o.raw("ports");
        if (!p.is_array() || p.size() != 2) throw SchemaError("/ports", "expected an array of two ports");
        cfg.port1 = read_port(p[0], "/ports/0");
        cfg.port2 = read_port(p[1], "/ports/1");
    }

    if (!o.has("grid")) throw SchemaError("/grid", "missing required field");
    {
        Obj g(o.raw("grid"), "/grid");
        g.allow_only({"start_hz", "stop_hz", "points"});
        cfg.grid.start_hz = g.number("start_hz");
        cfg.grid.stop_hz = g.number("stop_hz");
        const long long n = g.integer_or("points", 0);
        if (n < 2) throw SchemaError("/grid/points", "need at least 2 points");
        cfg.grid.points = static_cast<std::size_t>(n);
        if (!(cfg.grid.start_hz > 0.0)) throw SchemaError("/grid/start_hz", "must be > 0");
        if (!(cfg.grid.stop_hz > cfg.grid.start_hz)) throw SchemaError("/grid/stop_hz", "must exceed start_hz");
    }

    if (!root.contains("stages")) throw SchemaError("/stages", "missing required field");
    const Json& stages = root.at("stages");
    if (!stages.is_array() || stages.empty()) throw SchemaError("/stages", "expected a non-empty array");
    for (std::size_t i = 0; i < stages.size(); ++i) {
        cfg.stages.push_back(read_stage(stages[i], "/stages/" + std::to_string(i)));
    }

    if (o.has("synthesis")) {
        Obj s(o.raw("synthesis"), "/synthesis");
        s.allow_only({"band_lo_hz", "band_hi_hz", "min_rejection_db", "guard_fraction", "band_points",
                      "penalty_weight", "log10_c0_min", "log10_c0_max", "starts_per_axis", "max_iter"});
        auto& so = cfg.synthesis;
        if (s.has("band_lo_hz")) cfg.band_lo_hz = s.number("band_lo_hz");
        if (s.has("band_hi_hz")) cfg.band_hi_hz = s.number("band_hi_hz");
        if (cfg.band_lo_hz.has_value() != cfg.band_hi_hz.has_value()) {
            throw SchemaError("/synthesis", "band_lo_hz and band_hi_hz go together");
        }
        if (cfg.band_lo_hz && !(*cfg.band_hi_hz >= *cfg.band_lo_hz && *cfg.band_lo_hz > 0.0)) {
            throw SchemaError("/synthesis/band_hi_hz", "band must be non-empty and positive");
        }
        so.min_rejection_db = s.number_or("min_rejection_db", so.min_rejection_db);
        so.guard_fraction = s.number_or("guard_fraction", so.guard_fraction);
        const long long bp = s.integer_or("band_points", static_cast<long long>(so.band_points));
        if (bp < 1) throw SchemaError("/synthesis/band_points", "must be >= 1");
        so.band_points = static_cast<std::size_t>(bp);
        so.penalty_weight = s.number_or("penalty_weight", so.penalty_weight);
        so.log10_c0_min = s.number_or("log10_c0_min", so.log10_c0_min);
        so.log10_c0_max = s.number_or("log10_c0_max", so.log10_c0_max);
        if (!(so.log10_c0_max > so.log10_c0_min)) throw SchemaError("/synthesis/log10_c0_max", "empty c0 box");
        so.starts_per_axis = static_cast<int>(s.integer_or("starts_per_axis", so.starts_per_axis));
        if (so.starts_per_axis < 1) throw SchemaError("/synthesis/starts_per_axis", "must be >= 1");
        so.max_iter = static_cast<int>(s.integer_or("max_iter", so.max_iter));
        if (so.max_iter < 1) throw SchemaError("/synthesis/max_iter", "must be >= 1");
    }

    if (o.has("fit")) {
        Obj f(o.raw("fit"), "/fit");
        f.allow_only({"max_iter", "restarts", "tol", "w_mag", "w_phase", "fit_parasitics", "seed",
                      "perturbation_decades"});
        auto& fo = cfg.fit;
        fo.max_iter = static_cast<int>(f.integer_or("max_iter", fo.max_iter));
        if (fo.max_iter < 1) throw SchemaError("/fit/max_iter", "must be >= 1");
        fo.restarts = static_cast<int>(f.integer_or("restarts", fo.restarts));
        if (fo.restarts < 1) throw SchemaError("/fit/restarts", "must be >= 1");
        fo.tol = f.number_or("tol", fo.tol);
        if (!(fo.tol > 0.0)) throw SchemaError("/fit/tol", "must be > 0");
        fo.w_mag = f.number_or("w_mag", fo.w_mag);
        fo.w_phase = f.number_or("w_phase", fo.w_phase);
        fo.fit_parasitics = f.boolean_or("fit_parasitics", fo.fit_parasitics);
        const long long seed = f.integer_or("seed", static_cast<long long>(fo.seed));
        if (seed < 0) throw SchemaError("/fit/seed", "must be >= 0");
        fo.seed = static_cast<std::uint64_t>(seed);
        fo.perturbation_decades = f.number_or("perturbation_decades", fo.perturbation_decades);
    }

    if (o.has("match")) {
        Obj m(o.raw("match"), "/match");
        m.allow_only({"r_min_ohm", "r_max_ohm", "x_min_ohm", "x_max_ohm", "coarse_step_ohm",
                      "independent_ports"});
        auto& mo = cfg.match;
        mo.r_min = m.number_or("r_min_ohm", mo.r_min);
        mo.r_max = m.number_or("r_max_ohm", mo.r_max);
        mo.x_min = m.number_or("x_min_ohm", mo.x_min);
        mo.x_max = m.number_or("x_max_ohm", mo.x_max);
        mo.coarse_step = m.number_or("coarse_step_ohm", mo.coarse_step);
        mo.independent_ports = m.boolean_or("independent_ports", mo.independent_ports);
        if (!(mo.r_min > 0.0 && mo.r_max >= mo.r_min)) throw SchemaError("/match/r_min_ohm", "need 0 < r_min <= r_max");
        if (!(mo.x_max >= mo.x_min)) throw SchemaError("/match/x_max_ohm", "need x_min <= x_max");
        if (!(mo.coarse_step > 0.0)) throw SchemaError("/match/coarse_step_ohm", "must be > 0");
    }

    if (o.has("metrics")) {
        Obj m(o.raw("metrics"), "/metrics");
        m.allow_only({"guard_fraction"});
        cfg.guard_fraction = m.number_or("guard_fraction", cfg.guard_fraction);
        if (!(cfg.guard_fraction >= 0.0)) throw SchemaError("/metrics/guard_fraction", "must be >= 0");
    }
    cfg.match.guard_fraction = cfg.guard_fraction;

    if (o.has("synthesis_result")) cfg.synthesis_result = o.raw("synthesis_result");
    return cfg;
}

std::string write_design_config(const DesignConfig& cfg) {
    Json root;
    root["ports"] = Json::array({port_json(cfg.port1), port_json(cfg.port2)});
    root["grid"] = {{"start_hz", cfg.grid.start_hz}, {"stop_hz", cfg.grid.stop_hz}, {"points", cfg.grid.points}};
    Json stages = Json::array();
    for (const auto& st : cfg.stages) stages.push_back(stage_json(st));
    root["stages"] = stages;

    const auto& so = cfg.synthesis;
    Json synth;
    if (cfg.band_lo_hz) {
        synth["band_lo_hz"] = *cfg.band_lo_hz;
        synth["band_hi_hz"] = *cfg.band_hi_hz;
    }
    synth["min_rejection_db"] = so.min_rejection_db;
    synth["guard_fraction"] = so.guard_fraction;
    synth["band_points"] = so.band_points;
    synth["penalty_weight"] = so.penalty_weight;
    synth["log10_c0_min"] = so.log10_c0_min;
    synth["log10_c0_max"] = so.log10_c0_max;
    synth["starts_per_axis"] = so.starts_per_axis;
    synth["max_iter"] = so.max_iter;
    root["synthesis"] = synth;

    const auto& fo = cfg.fit;
    root["fit"] = {{"max_iter", fo.max_iter},   {"restarts", fo.restarts},
                   {"tol", fo.tol},             {"w_mag", fo.w_mag},
                   {"w_phase", fo.w_phase},     {"fit_parasitics", fo.fit_parasitics},
                   {"seed", fo.seed},           {"perturbation_decades", fo.perturbation_decades}};
    const auto& mo = cfg.match;
    root["match"] = {{"r_min_ohm", mo.r_min},         {"r_max_ohm", mo.r_max},
                     {"x_min_ohm", mo.x_min},         {"x_max_ohm", mo.x_max},
                     {"coarse_step_ohm", mo.coarse_step}, {"independent_ports", mo.independent_ports}};
    root["metrics"] = {{"guard_fraction", cfg.guard_fraction}};
    if (!cfg.synthesis_result.is_null()) root["synthesis_result"] = cfg.synthesis_result;
    return root.dump(2) + "\n";
}

void apply_static_caps(DesignConfig& cfg, double c0_shunt, double c0_series) {
    for (auto& st : cfg.stages) {
        if (!st.spec) continue;
        st.spec->c0 = st.placement == Placement::Shunt ? c0_shunt : c0_series;
        st.params = mbvd_from_spec(*st.spec);
    }
}

Json to_json(const MbvdParams& p) {
    return {{"c0_f", p.c0}, {"rm_ohm", p.rm}, {"lm_h", p.lm}, {"cm_f", p.cm}, {"rs_ohm", p.rs}, {"ls_h", p.ls}};
}

Json to_json(const ResonatorSpec& s) {
    return {{"fs_hz", s.fs}, {"k2", s.k2}, {"q", s.q}, {"c0_f", s.c0}, {"rs_ohm", s.rs}, {"ls_h", s.ls}};
}

Json to_json(const FilterMetrics& m) {
    return {{"f_center_hz", m.f_center}, {"il_db", m.il_db},
            {"fbw_3db_pct", m.fbw_3db},  {"oob_rejection_db", m.oob_rejection_db},
            {"band_lo_hz", m.band_lo},   {"band_hi_hz", m.band_hi}};
}

Json to_json(const ResonatorMetrics& m) {
    // An infinite Q (rm == 0) is written as null.
    return {{"fs_eff_hz", m.fs_eff}, {"fp_eff_hz", m.fp_eff}, {"k2", m.k2},
            {"q", nullable(m.q)},    {"fom", nullable(m.fom)},
            {"f_em_hz", m.f_em ? Json(*m.f_em) : Json(nullptr)}};
}

Json to_json(const FitResult& r) {
    return {{"params", to_json(r.params)},
            {"metrics", to_json(r.metrics)},
            {"residual", r.residual},
            {"converged", r.converged},
            {"seed", r.seed}};
}

}  // namespace ladderkit
