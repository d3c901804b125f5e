#pragma once

// Modified Butterworth-Van Dyke resonator: a motional branch (rm, lm, cm) in
// parallel with the static capacitance c0, behind series routing parasitics
// (rs, ls). Also hosts the resonator metric extraction.

#include <optional>
#include <span>
#include <vector>

#include "ladderkit/network.hpp"

namespace ladderkit {

struct MbvdParams {
    double c0 = 0.0;  // F
    double rm = 0.0;  // ohm
    double lm = 0.0;  // H
    double cm = 0.0;  // F
    double rs = 0.0;  // ohm
    double ls = 0.0;  // H

    // Throws InputError when an element is out of range or non-finite.
    void validate() const;

    friend bool operator==(const MbvdParams&, const MbvdParams&) = default;
};

struct ResonatorSpec {
    double fs = 0.0;  // Hz
    double k2 = 0.0;  // fraction
    double q = 0.0;
    double c0 = 0.0;  // F
    double rs = 0.0;  // ohm
    double ls = 0.0;  // H

    void validate() const;

    friend bool operator==(const ResonatorSpec&, const ResonatorSpec&) = default;
};

struct ResonatorMetrics {
    double fs_eff = 0.0;
    double fp_eff = 0.0;
    double k2 = 0.0;
    double q = 0.0;  // +inf when rm == 0
    double fom = 0.0;
    std::optional<double> f_em;
};

// Coupling from the series/parallel resonance pair: (pi^2 / 8) (fp^2 / fs^2 - 1).
double k2_from_freqs(double fs, double fp);

// Inverse of k2_from_freqs for a given fs.
double fp_from_k2(double fs, double k2);

MbvdParams mbvd_from_spec(const ResonatorSpec& spec);

// Impedance and admittance of the full model. Both stay finite away from the
// lossless poles; use whichever is regular where you evaluate it.
Complex impedance(const MbvdParams& p, double f);
Complex admittance(const MbvdParams& p, double f);

// Same model with rm and rs removed (the reactive network that sets resonance
// locations).
MbvdParams lossless(const MbvdParams& p);

struct Extrema {
    double fs_eff;
    double fp_eff;
};

// Series (|Y| maximum) and parallel (|Y| minimum above it) resonances of p,
// located on the reactive network and refined to machine precision by
// bracketed root solving of its reactance/susceptance. Throws
// BoundaryExtremumError when the grid does not bracket both.
Extrema resonance_extrema(const MbvdParams& p, std::span<const double> grid);

enum class ResonanceKind { Series, Parallel };

struct Resonance {
    double f;
    ResonanceKind kind;
};

// Every reactance zero (series) and pole (parallel) of the reactive network
// inside the grid, in increasing frequency.
std::vector<Resonance> reactive_resonances(const MbvdParams& p, std::span<const double> grid);

// Perceived extrema of sampled |Y| data: argmax |Y| and argmin |Y| above it,
// each refined by a three-point parabola in log|Y|. This is what a VNA trace
// shows; for lossy resonators it sits below fs and above fp. Non-finite
// magnitudes count as +inf.
Extrema perceived_extrema(std::span<const double> freqs, std::span<const double> mag);

// First-order routing LC estimate 1 / (2 pi sqrt(ls c0)); empty when ls == 0.
std::optional<double> em_resonance_freq(const MbvdParams& p);

ResonatorMetrics resonator_metrics(const MbvdParams& p, std::span<const double> grid);

}  // namespace ladderkit
