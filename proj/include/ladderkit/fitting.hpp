#pragma once

// Least-squares extraction of MBVD element values from a one-port admittance
// sweep, including the routing parasitics rs and ls.

#include <cstdint>
#include <span>

#include "ladderkit/mbvd.hpp"

namespace ladderkit {

struct FitOptions {
    int max_iter = 2000;
    int restarts = 8;
    double tol = 1e-10;
    double w_mag = 1.0;
    double w_phase = 1.0;
    bool fit_parasitics = true;
    std::uint64_t seed = 1;
    // Half-width of the uniform log10 perturbation applied to restarts 1..n-1.
    double perturbation_decades = 0.3;
};

struct FitResult {
    MbvdParams params;
    double residual = 0.0;  // mean objective per frequency point
    ResonatorMetrics metrics;  // NaN entries when the fitted model has no resonance pair
    bool converged = false;
    std::uint64_t seed = 0;
};

// Mean of w_mag (log10|Ym| - log10|Yd|)^2 + w_phase (wrapped phase difference)^2.
double fit_objective(const MbvdParams& p, std::span<const double> freqs,
                     std::span<const Complex> y, double w_mag = 1.0, double w_phase = 1.0);

// Starting point: fp0 at the global resistance peak, fs0 at the conductance
// peak below it, c0 from the low-frequency capacitance, q0 = 5, rs = 0.5 ohm
// and ls placing the routing resonance at 1.3 fp0. Throws InitError without
// an interior pair.
MbvdParams init_guess(std::span<const double> freqs, std::span<const Complex> y);

FitResult fit_mbvd(std::span<const double> freqs, std::span<const Complex> y,
                   const FitOptions& opts = {});

}  // namespace ladderkit
