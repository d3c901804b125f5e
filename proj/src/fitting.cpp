#include "ladderkit/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "ladderkit/nelder_mead.hpp"
#include "ladderkit/parallel.hpp"

namespace ladderkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double d) {
    d = std::remainder(d, kTwoPi);  // [-pi, pi]
    return d <= -std::numbers::pi ? d + kTwoPi : d;
}

// Parameter vector layout: log10 of c0, cm, lm, rm[, rs, ls].
std::vector<double> to_log(const MbvdParams& p, bool parasitics) {
    std::vector<double> v{std::log10(p.c0), std::log10(p.cm), std::log10(p.lm), std::log10(p.rm)};
    if (parasitics) {
        v.push_back(std::log10(p.rs));
        v.push_back(std::log10(p.ls));
    }
    return v;
}

MbvdParams from_log(std::span<const double> v) {
    MbvdParams p;
    p.c0 = std::pow(10.0, v[0]);
    p.cm = std::pow(10.0, v[1]);
    p.lm = std::pow(10.0, v[2]);
    p.rm = std::pow(10.0, v[3]);
    if (v.size() == 6) {
        p.rs = std::pow(10.0, v[4]);
        p.ls = std::pow(10.0, v[5]);
    }
    return p;
}

void check_sweep(std::span<const double> freqs, std::span<const Complex> y) {
    if (freqs.size() != y.size()) throw InputError("frequency and admittance lengths differ");
    validate_grid(freqs);
    for (const auto& v : y) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) == 0.0) {
            throw InputError("admittance data must be finite and non-zero");
        }
    }
}

ResonatorMetrics metrics_for(const MbvdParams& p, std::span<const double> freqs, bool& ok) {
    try {
        return resonator_metrics(p, freqs);
    } catch (const BoundaryExtremumError&) {
        ok = false;
    }
    // Fall back to a wide grid so a result is still reported.
    std::vector<double> wide(20000);
    const double lo = std::log10(freqs.front() / 10.0);
    const double hi = std::log10(freqs.back() * 10.0);
    for (std::size_t i = 0; i < wide.size(); ++i) {
        wide[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / (wide.size() - 1));
    }
    try {
        return resonator_metrics(p, wide);
    } catch (const BoundaryExtremumError&) {
    }
    ResonatorMetrics m;
    m.fs_eff = m.fp_eff = m.k2 = m.q = m.fom = std::numeric_limits<double>::quiet_NaN();
    m.f_em = em_resonance_freq(p);
    return m;
}

// Data side of the objective, precomputed once per fit. With c = Ym conj(Yd),
// log|Ym| - log|Yd| = log|c| - 2 log|Yd| and arg(Ym) - arg(Yd) = arg(c).
class FitTarget {
public:
    FitTarget(std::span<const double> freqs, std::span<const Complex> y) : freqs_(freqs) {
        conj_.reserve(y.size());
        log_norm_.reserve(y.size());
        for (const Complex& v : y) {
            conj_.push_back(std::conj(v));
            log_norm_.push_back(std::log10(std::norm(v)));
        }
    }

    double objective(const MbvdParams& p, double w_mag, double w_phase) const {
        if (freqs_.empty()) return 0.0;
        double sum = 0.0;
        for (std::size_t i = 0; i < freqs_.size(); ++i) {
            const Complex c = admittance(p, freqs_[i]) * conj_[i];
            const double dm = 0.5 * std::log10(std::norm(c)) - log_norm_[i];
            const double dp = wrap_phase(std::atan2(c.imag(), c.real()));
            sum += w_mag * dm * dm + w_phase * dp * dp;
        }
        return sum / static_cast<double>(freqs_.size());
    }

private:
    std::span<const double> freqs_;
    std::vector<Complex> conj_;
    std::vector<double> log_norm_;
};

}  // namespace

double fit_objective(const MbvdParams& p, std::span<const double> freqs,
                     std::span<const Complex> y, double w_mag, double w_phase) {
    if (freqs.size() != y.size()) throw InputError("frequency and admittance lengths differ");
    return FitTarget(freqs, y).objective(p, w_mag, w_phase);
}

MbvdParams init_guess(std::span<const double> freqs, std::span<const Complex> y) {
    check_sweep(freqs, y);
    const std::size_t n = freqs.size();
    if (n < 3) throw InitError("sweep must contain fs and fp");

    // The antiresonance is the global resistance peak: at the routing
    // resonance Z falls to about rs, whereas |Y| and Re(Y) may peak there
    // instead of at fs when it lies inside the sweep.
    std::size_t ip = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if ((1.0 / y[i]).real() > (1.0 / y[ip]).real()) ip = i;
    }
    if (ip == 0 || ip + 1 >= n) throw InitError("sweep must contain fs and fp (no interior resistance peak)");
    std::size_t is = 0;
    for (std::size_t i = 1; i < ip; ++i) {
        if (y[i].real() > y[is].real()) is = i;
    }
    if (is == 0) throw InitError("sweep must contain fs and fp (no conductance peak below fp)");

    const double fs0 = freqs[is];
    const double fp0 = freqs[ip];
    const double k2 = std::clamp(k2_from_freqs(fs0, fp0), 1e-4, 0.95);

    std::vector<double> caps;
    for (std::size_t i = 0; i < n && freqs[i] <= 10.0 * freqs.front(); ++i) {
        caps.push_back(y[i].imag() / (kTwoPi * freqs[i]));
    }
    std::nth_element(caps.begin(), caps.begin() + caps.size() / 2, caps.end());
    double ctotal = std::abs(caps[caps.size() / 2]);
    if (!(ctotal > 0.0)) throw InitError("cannot estimate static capacitance from the sweep");

    ResonatorSpec spec;
    spec.fs = fs0;
    spec.k2 = k2;
    spec.q = 5.0;
    spec.c0 = ctotal / (1.0 + k2 * 8.0 / (std::numbers::pi * std::numbers::pi));
    spec.rs = 0.5;
    const double w_em = kTwoPi * 1.3 * fp0;
    spec.ls = 1.0 / (w_em * w_em * spec.c0);
    return mbvd_from_spec(spec);
}

FitResult fit_mbvd(std::span<const double> freqs, std::span<const Complex> y, const FitOptions& opts) {
    if (opts.max_iter < 1) throw InputError("max_iter must be >= 1");
    if (!(opts.tol > 0.0)) throw InputError("tol must be > 0");
    if (opts.restarts < 1) throw InputError("restarts must be >= 1");
    MbvdParams init = init_guess(freqs, y);
    if (!opts.fit_parasitics) init.rs = init.ls = 0.0;

    const bool para = opts.fit_parasitics;
    const FitTarget target(freqs, y);
    Objective cost = [&](std::span<const double> v) {
        return target.objective(from_log(v), opts.w_mag, opts.w_phase);
    };
    const std::vector<double> x_init = to_log(init, para);

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> jitter(-opts.perturbation_decades, opts.perturbation_decades);
    std::vector<std::vector<double>> starts(static_cast<std::size_t>(opts.restarts), x_init);
    for (std::size_t k = 1; k < starts.size(); ++k) {
        for (double& v : starts[k]) v += jitter(rng);
    }

    std::vector<NelderMeadResult> results(starts.size());
    parallel_for(starts.size(), [&](std::size_t k) {
        NelderMeadOptions nm;
        nm.max_iter = opts.max_iter;
        nm.tol = opts.tol;
        nm.step = {0.1};
        NelderMeadResult r = nelder_mead(cost, starts[k], nm);
        // Re-seeding the simplex at the current optimum until it stops improving
        // lets the search escape a prematurely flattened simplex.
        bool settled = false;
        for (int round = 0; round < 20 && !settled; ++round) {
            NelderMeadResult again = nelder_mead(cost, r.x, nm);
            settled = !(again.f < r.f - opts.tol * (1.0 + std::abs(r.f)));
            if (again.f <= r.f) r = std::move(again);
        }
        r.converged = r.converged && settled;
        results[k] = std::move(r);
    });

    const auto best = std::min_element(results.begin(), results.end(),
                                       [](const auto& a, const auto& b) { return a.f < b.f; });
    FitResult out;
    out.params = from_log(best->x);
    out.residual = best->f;
    out.converged = best->converged;
    out.seed = opts.seed;
    bool ok = true;
    out.metrics = metrics_for(out.params, freqs, ok);
    out.converged = out.converged && ok;
    return out;
}

}  // namespace ladderkit
