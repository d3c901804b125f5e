#include "ladderkit/mbvd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ladderkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPi2Over8 = std::numbers::pi * std::numbers::pi / 8.0;

bool nonneg_finite(double v) { return std::isfinite(v) && v >= 0.0; }
bool pos_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Reactive network written as X = n / d (reactance) so that both n and d are
// continuous for f > 0: zeros of n are series resonances, zeros of d parallel.
struct ReactiveParts {
    double n;
    double d;
};

ReactiveParts reactive_parts(const MbvdParams& p, double f) {
    const double w = kTwoPi * f;
    const double xm = w * p.lm - 1.0 / (w * p.cm);
    const double d = 1.0 - w * p.c0 * xm;
    return {w * p.ls * d + xm, d};
}

template <class Fn>
double bisect_root(Fn&& g, double lo, double hi) {
    double glo = g(lo);
    if (glo == 0.0) return lo;
    if (g(hi) == 0.0) return hi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Vertex of the parabola through three points (non-uniform spacing allowed).
// Returns x1 when the points do not describe an interior extremum.
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double u0 = x0 - x1;
    const double u2 = x2 - x1;
    const double d0 = y0 - y1;
    const double d2 = y2 - y1;
    // y - y1 = a u^2 + b u through (u0, d0) and (u2, d2).
    const double den = u0 * u2 * (u0 - u2);
    if (den == 0.0) return x1;
    const double a = (d0 * u2 - d2 * u0) / den;
    const double b = (d2 * u0 * u0 - d0 * u2 * u2) / den;
    if (a == 0.0 || !std::isfinite(a) || !std::isfinite(b)) return x1;
    const double u = -b / (2.0 * a);
    if (!(u > u0 && u < u2)) return x1;
    return x1 + u;
}

double log_mag(double m) { return std::isfinite(m) ? std::log(m) : std::numeric_limits<double>::infinity(); }

}  // namespace

void MbvdParams::validate() const {
    if (!pos_finite(c0) || !pos_finite(cm) || !pos_finite(lm)) {
        throw InputError("MBVD c0, cm and lm must be positive and finite");
    }
    if (!nonneg_finite(rm) || !nonneg_finite(rs) || !nonneg_finite(ls)) {
        throw InputError("MBVD rm, rs and ls must be non-negative and finite");
    }
}

void ResonatorSpec::validate() const {
    if (!pos_finite(fs)) throw InputError("resonator fs must be positive");
    if (!(k2 > 0.0 && k2 < 1.0)) throw InputError("resonator k2 must lie in (0, 1)");
    if (!(q > 0.0)) throw InputError("resonator q must be positive");
    if (!pos_finite(c0)) throw InputError("resonator c0 must be positive");
    if (!nonneg_finite(rs) || !nonneg_finite(ls)) {
        throw InputError("resonator rs and ls must be non-negative");
    }
}

double k2_from_freqs(double fs, double fp) {
    if (!(fs > 0.0) || !std::isfinite(fs) || !std::isfinite(fp)) {
        throw InputError("fs must be positive and finite");
    }
    if (fs > fp) throw InputError("fs must not exceed fp");
    const double r = fp / fs;
    return kPi2Over8 * (r * r - 1.0);
}

double fp_from_k2(double fs, double k2) {
    if (!(fs > 0.0) || !(k2 >= 0.0)) throw InputError("fs must be positive and k2 non-negative");
    return fs * std::sqrt(1.0 + k2 / kPi2Over8);
}

MbvdParams mbvd_from_spec(const ResonatorSpec& spec) {
    spec.validate();
    MbvdParams p;
    p.c0 = spec.c0;
    p.cm = spec.c0 * spec.k2 / kPi2Over8;
    const double ws = kTwoPi * spec.fs;
    p.lm = 1.0 / (ws * ws * p.cm);
    p.rm = std::isinf(spec.q) ? 0.0 : ws * p.lm / spec.q;
    p.rs = spec.rs;
    p.ls = spec.ls;
    return p;
}

Complex impedance(const MbvdParams& p, double f) {
    if (!(f > 0.0)) throw InputError("frequency must be positive");
    const double w = kTwoPi * f;
    const Complex zm{p.rm, w * p.lm - 1.0 / (w * p.cm)};
    const Complex zcore = zm / (1.0 + Complex{0.0, w * p.c0} * zm);
    return Complex{p.rs, w * p.ls} + zcore;
}

Complex admittance(const MbvdParams& p, double f) {
    if (!(f > 0.0)) throw InputError("frequency must be positive");
    const double w = kTwoPi * f;
    const Complex zm{p.rm, w * p.lm - 1.0 / (w * p.cm)};
    const Complex ycore = Complex{0.0, w * p.c0} + 1.0 / zm;
    if (p.rs == 0.0 && p.ls == 0.0) return ycore;
    return ycore / (1.0 + Complex{p.rs, w * p.ls} * ycore);
}

MbvdParams lossless(const MbvdParams& p) {
    MbvdParams out = p;
    out.rm = 0.0;
    out.rs = 0.0;
    return out;
}

std::vector<Resonance> reactive_resonances(const MbvdParams& p, std::span<const double> grid) {
    p.validate();
    validate_grid(grid);
    std::vector<Resonance> out;
    if (grid.size() < 2) return out;
    auto n_at = [&](double f) { return reactive_parts(p, f).n; };
    auto d_at = [&](double f) { return reactive_parts(p, f).d; };
    ReactiveParts prev = reactive_parts(p, grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const ReactiveParts cur = reactive_parts(p, grid[i]);
        if ((prev.n < 0.0) != (cur.n < 0.0)) {
            out.push_back({bisect_root(n_at, grid[i - 1], grid[i]), ResonanceKind::Series});
        }
        if ((prev.d < 0.0) != (cur.d < 0.0)) {
            out.push_back({bisect_root(d_at, grid[i - 1], grid[i]), ResonanceKind::Parallel});
        }
        prev = cur;
    }
    std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) { return a.f < b.f; });
    return out;
}

Extrema resonance_extrema(const MbvdParams& p, std::span<const double> grid) {
    const auto res = reactive_resonances(p, grid);
    auto series = std::find_if(res.begin(), res.end(),
                               [](const Resonance& r) { return r.kind == ResonanceKind::Series; });
    if (series == res.end()) {
        throw BoundaryExtremumError("|Y| maximum lies on the grid boundary; widen the grid below fs");
    }
    auto parallel = std::find_if(series, res.end(),
                                 [](const Resonance& r) { return r.kind == ResonanceKind::Parallel; });
    if (parallel == res.end()) {
        throw BoundaryExtremumError("|Y| minimum lies on the grid boundary; widen the grid above fp");
    }
    return {series->f, parallel->f};
}

Extrema perceived_extrema(std::span<const double> freqs, std::span<const double> mag) {
    if (freqs.size() != mag.size()) throw InputError("frequency and magnitude lengths differ");
    if (freqs.size() < 3) throw BoundaryExtremumError("need at least three points");
    auto key = [](double m) { return std::isnan(m) ? std::numeric_limits<double>::infinity() : m; };
    std::size_t imax = 0;
    for (std::size_t i = 1; i < mag.size(); ++i) {
        if (key(mag[i]) > key(mag[imax])) imax = i;
    }
    if (imax == 0 || imax + 1 >= mag.size()) {
        throw BoundaryExtremumError("|Y| maximum lies on the grid boundary");
    }
    std::size_t imin = imax + 1;
    for (std::size_t i = imax + 1; i < mag.size(); ++i) {
        if (key(mag[i]) < key(mag[imin])) imin = i;
    }
    if (imin + 1 >= mag.size()) throw BoundaryExtremumError("|Y| minimum lies on the grid boundary");

    auto refine = [&](std::size_t i) {
        const double y0 = log_mag(key(mag[i - 1]));
        const double y1 = log_mag(key(mag[i]));
        const double y2 = log_mag(key(mag[i + 1]));
        if (!std::isfinite(y0) || !std::isfinite(y1) || !std::isfinite(y2)) return freqs[i];
        return parabola_vertex(freqs[i - 1], y0, freqs[i], y1, freqs[i + 1], y2);
    };
    return {refine(imax), refine(imin)};
}

std::optional<double> em_resonance_freq(const MbvdParams& p) {
    if (!(p.ls > 0.0)) return std::nullopt;
    return 1.0 / (kTwoPi * std::sqrt(p.ls * p.c0));
}

ResonatorMetrics resonator_metrics(const MbvdParams& p, std::span<const double> grid) {
    const Extrema ex = resonance_extrema(p, grid);
    ResonatorMetrics m;
    m.fs_eff = ex.fs_eff;
    m.fp_eff = ex.fp_eff;
    m.k2 = k2_from_freqs(ex.fs_eff, ex.fp_eff);
    m.q = p.rm > 0.0 ? kTwoPi * ex.fs_eff * p.lm / p.rm : std::numeric_limits<double>::infinity();
    m.fom = m.k2 * m.q;
    m.f_em = em_resonance_freq(p);
    return m;
}

}  // namespace ladderkit
