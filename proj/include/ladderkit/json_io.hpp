#pragma once

// JSON documents: the design config (ports, grid, stages and options) and the
// result reports written by the command-line tool. Every physical quantity key
// carries its SI unit suffix (_hz, _f, _ohm, _h).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ladderkit/fitting.hpp"
#include "ladderkit/ladder.hpp"

namespace ladderkit {

using Json = nlohmann::ordered_json;

struct StageConfig {
    Placement placement = Placement::Shunt;
    // When the stage was given as a spec it is kept verbatim next to the
    // expanded params. A spec without c0_f is a synthesis template stage.
    std::optional<ResonatorSpec> spec;
    std::optional<MbvdParams> params;

    bool c0_free() const { return spec && !params; }
};

struct GridConfig {
    double start_hz = 0.0;
    double stop_hz = 0.0;
    std::size_t points = 0;

    std::vector<double> frequencies() const { return linspace(start_hz, stop_hz, points); }
};

struct DesignConfig {
    PortImpedance port1{50.0};
    PortImpedance port2{50.0};
    GridConfig grid;
    std::vector<StageConfig> stages;
    std::optional<double> band_lo_hz;
    std::optional<double> band_hi_hz;
    SynthesisOptions synthesis;
    FitOptions fit;
    MatchOptions match;
    double guard_fraction = 0.25;
    Json synthesis_result;  // carried through untouched; null when absent

    // Throws SchemaError naming the first stage that has no c0.
    LadderDesign design() const;
    // Throws SchemaError for stages given only as raw params.
    LadderTemplate ladder_template() const;
};

// Throws ParseError for malformed JSON and SchemaError for schema violations.
DesignConfig read_design_config(std::string_view text);
std::string write_design_config(const DesignConfig& cfg);

// Replace every spec stage's c0 by the synthesized value for its placement.
void apply_static_caps(DesignConfig& cfg, double c0_shunt, double c0_series);

Json to_json(const MbvdParams& p);
Json to_json(const ResonatorSpec& s);
Json to_json(const FilterMetrics& m);
Json to_json(const ResonatorMetrics& m);
Json to_json(const FitResult& r);

}  // namespace ladderkit
