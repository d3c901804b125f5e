#pragma once

// Ladder filters built from MBVD resonators: simulation, passband metrics,
// static-capacitance synthesis and complex port matching.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ladderkit/mbvd.hpp"
#include "ladderkit/network.hpp"

namespace ladderkit {

enum class Placement { Shunt, Series };

struct Stage {
    Placement placement;
    MbvdParams resonator;
};

struct LadderDesign {
    std::vector<Stage> stages;
    PortImpedance port1{50.0};
    PortImpedance port2{50.0};

    void validate() const;
};

struct FilterMetrics {
    double f_center = 0.0;          // Hz, midpoint of the 3-dB edges
    double il_db = 0.0;             // -max |S21| in dB
    double fbw_3db = 0.0;           // percent of f_center
    double oob_rejection_db = 0.0;  // -max |S21| in dB outside the guarded band
    double band_lo = 0.0;
    double band_hi = 0.0;
};

// ABCD of the cascaded ladder at one frequency. A series stage whose
// admittance is exactly zero throws SingularNetworkError.
Abcd build_ladder(const LadderDesign& design, double f);

// Per-frequency ABCD of the ladder; singular points are flagged.
AbcdSweep ladder_abcd_sweep(const LadderDesign& design, std::span<const double> grid);

// S-parameters of the ladder. Equal real ports use voltage-wave S at that
// reference; anything else uses power-wave S at (port1, port2).
SSweep simulate(const LadderDesign& design, std::span<const double> grid);

// S-parameters for arbitrary references from a precomputed ABCD sweep.
SSweep s_from_abcd_sweep(const AbcdSweep& abcd, const PortImpedance& zs, const PortImpedance& zl);

// Passband metrics from |S21|. Flagged points are skipped.
FilterMetrics extract_metrics(const SSweep& s, double guard_fraction = 0.25);

// Same extraction from raw frequencies and |S21| in dB.
FilterMetrics extract_metrics_db(std::span<const double> freqs, std::span<const double> s21_db,
                                 double guard_fraction = 0.25);

// ---------------------------------------------------------------------------
// Static-capacitance synthesis

struct StageTemplate {
    Placement placement;
    ResonatorSpec spec;  // spec.c0 is ignored; it is chosen per placement class
};

struct LadderTemplate {
    std::vector<StageTemplate> stages;
    PortImpedance port1{50.0};
    PortImpedance port2{50.0};
};

struct SynthesisOptions {
    // Points sampled across the target band for the max-min objective.
    std::size_t band_points = 201;
    // Minimum out-of-band rejection enforced through a penalty; the window is
    // the target band widened by guard_fraction of its width on each side.
    double min_rejection_db = 10.0;
    double guard_fraction = 0.25;
    double penalty_weight = 100.0;
    // Search box for c0 on a log10 scale.
    double log10_c0_min = -15.0;  // 1 fF
    double log10_c0_max = -12.0;  // 1 pF
    int starts_per_axis = 4;
    int max_iter = 2000;
    double tol = 1e-10;
};

struct SynthesisResult {
    double c0_shunt = 0.0;
    double c0_series = 0.0;
    double objective = 0.0;  // penalized min in-band |S21| in dB
    FilterMetrics metrics;
    LadderDesign design;
};

LadderDesign instantiate(const LadderTemplate& tmpl, double c0_shunt, double c0_series);

// Objective maximized by optimize_static_caps (higher is better).
class StaticCapObjective {
public:
    StaticCapObjective(LadderTemplate tmpl, double band_lo, double band_hi,
                       std::span<const double> metrics_grid, const SynthesisOptions& opts);

    double operator()(double c0_shunt, double c0_series) const;

    const std::vector<double>& band_grid() const { return band_; }
    const std::vector<double>& reject_grid() const { return reject_; }

private:
    LadderTemplate tmpl_;
    std::vector<double> band_;
    std::vector<double> reject_;
    SynthesisOptions opts_;
};

// Chooses one c0 for all shunt stages and one for all series stages so the
// worst in-band |S21| is as high as possible while out-of-band rejection
// stays above opts.min_rejection_db. metrics_grid is used for the returned
// FilterMetrics and for the rejection window. Throws SynthesisError when no
// start yields a passband overlapping the target band.
SynthesisResult optimize_static_caps(const LadderTemplate& tmpl, double band_lo, double band_hi,
                                     std::span<const double> metrics_grid,
                                     const SynthesisOptions& opts = {});

// ---------------------------------------------------------------------------
// Complex port matching

struct MatchOptions {
    double r_min = 5.0, r_max = 200.0;
    double x_min = -100.0, x_max = 100.0;
    double coarse_step = 2.0;  // ohm
    bool independent_ports = false;
    // Optional frequency window for the peak search. When empty the 50 ohm
    // 3-dB passband is used, or the whole sweep if that has no passband.
    std::optional<double> band_lo, band_hi;
    double guard_fraction = 0.25;
    int max_iter = 2000;
};

struct MatchResult {
    PortImpedance z1{50.0};
    PortImpedance z2{50.0};
    double peak_gain = 0.0;  // max transducer gain over the window
    double reference_gain = 0.0;  // same at 50 ohm
    std::optional<FilterMetrics> matched_metrics;
    std::optional<FilterMetrics> reference_metrics;
    std::optional<double> window_lo, window_hi;  // peak-search window actually used
};

// Peak transducer gain over opts' window (whole sweep when unset).
double peak_gain(const AbcdSweep& abcd, const PortImpedance& zs, const PortImpedance& zl,
                 const MatchOptions& opts = {});

// Maximizes the peak power-wave |S21|^2 over port impedances in the search box:
// coarse grid, then Nelder-Mead refinement. The result is never worse than 50 ohm.
MatchResult find_complex_match(const AbcdSweep& abcd, const MatchOptions& opts = {});

}  // namespace ladderkit
