#pragma once

// Reference computations used by the tests. Nothing here calls into the
// library: resonator admittance is the textbook formula, ladders are solved by
// nodal analysis, and searches are plain grids.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

struct Resonator {
    double c0, rm, lm, cm, rs = 0.0, ls = 0.0;
};

inline double k2(double fs, double fp) { return kPi * kPi / 8.0 * (fp * fp / (fs * fs) - 1.0); }

// Element values for a target series resonance, coupling and motional Q.
inline Resonator from_spec(double fs, double k2v, double q, double c0, double rs = 0.0, double ls = 0.0) {
    const double cm = c0 * 8.0 * k2v / (kPi * kPi);
    const double ws = 2.0 * kPi * fs;
    const double lm = 1.0 / (ws * ws * cm);
    return {c0, std::isinf(q) ? 0.0 : ws * lm / q, lm, cm, rs, ls};
}

inline cd impedance(const Resonator& r, double f) {
    const double w = 2.0 * kPi * f;
    const cd j(0.0, 1.0);
    const cd zm = r.rm + j * w * r.lm + 1.0 / (j * w * r.cm);
    const cd yc = j * w * r.c0 + 1.0 / zm;
    return r.rs + j * w * r.ls + 1.0 / yc;
}

inline cd admittance(const Resonator& r, double f) { return 1.0 / impedance(r, f); }

// Dense complex solve by Gaussian elimination with partial pivoting.
inline std::vector<cd> solve(std::vector<std::vector<cd>> a, std::vector<cd> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        }
        if (std::abs(a[piv][k]) == 0.0) throw std::runtime_error("singular nodal matrix");
        std::swap(a[k], a[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const cd m = a[i][k] / a[k][k];
            for (std::size_t c = k; c < n; ++c) a[i][c] -= m * a[k][c];
            b[i] -= m * b[k];
        }
    }
    std::vector<cd> x(n);
    for (std::size_t i = n; i-- > 0;) {
        cd s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

struct Element {
    bool series;  // series elements open a new node; shunt elements go to ground
    cd z;         // impedance at the evaluation frequency
};

struct Terminated {
    double gt;   // transducer gain
    cd s21;      // power-wave S21 referenced to (zs, zl)
    cd gamma;    // power-wave reflection at port 1 referenced to zs
};

// Unit EMF behind zs drives node 0; zl loads the last node.
inline Terminated nodal(const std::vector<Element>& elems, cd zs, cd zl) {
    std::size_t nodes = 1;
    for (const auto& e : elems) nodes += e.series ? 1 : 0;
    std::vector<std::vector<cd>> y(nodes, std::vector<cd>(nodes, 0.0));
    std::size_t cur = 0;
    for (const auto& e : elems) {
        const cd g = 1.0 / e.z;
        if (e.series) {
            y[cur][cur] += g;
            y[cur + 1][cur + 1] += g;
            y[cur][cur + 1] -= g;
            y[cur + 1][cur] -= g;
            ++cur;
        } else {
            y[cur][cur] += g;
        }
    }
    y[0][0] += 1.0 / zs;
    y[nodes - 1][nodes - 1] += 1.0 / zl;
    std::vector<cd> rhs(nodes, 0.0);
    rhs[0] = 1.0 / zs;
    const auto v = solve(y, rhs);
    const cd v1 = v[0], v2 = v[nodes - 1];
    const double r1 = zs.real(), r2 = zl.real();
    Terminated t;
    t.gt = 4.0 * r1 * r2 * std::norm(v2 / zl);
    t.s21 = 2.0 * std::sqrt(r1 * r2) * v2 / zl;
    const cd i1 = 1.0 - v1;
    const cd i1a = i1 / zs;
    t.gamma = (v1 - std::conj(zs) * i1a) / (v1 + zs * i1a);
    return t;
}

struct LadderStage {
    bool series;
    Resonator r;
};

inline Terminated ladder(const std::vector<LadderStage>& stages, double f, cd zs, cd zl) {
    std::vector<Element> e;
    for (const auto& s : stages) e.push_back({s.series, impedance(s.r, f)});
    return nodal(e, zs, zl);
}

inline double gain_db(const std::vector<LadderStage>& stages, double f, cd zs = 50.0, cd zl = 50.0) {
    return 10.0 * std::log10(ladder(stages, f, zs, zl).gt);
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

// Synthesis target as stated in the library docs: worst |S21| in dB over band
// samples minus a weighted shortfall of the rejection floor, measured on the
// grid points outside the band widened by guard * width on each side.
struct SynthesisProblem {
    double fs_shunt, k2_shunt, q_shunt;
    double fs_series, k2_series, q_series;
    std::vector<bool> topology;  // true = series
    double band_lo, band_hi;
    std::vector<double> grid;
    std::size_t band_points = 201;
    double min_rejection_db = 10.0, guard = 0.25, weight = 100.0;

    std::vector<LadderStage> build(double c0_shunt, double c0_series) const {
        std::vector<LadderStage> out;
        for (bool s : topology) {
            out.push_back({s, s ? from_spec(fs_series, k2_series, q_series, c0_series)
                                : from_spec(fs_shunt, k2_shunt, q_shunt, c0_shunt)});
        }
        return out;
    }

    double objective(double c0_shunt, double c0_series) const {
        const auto st = build(c0_shunt, c0_series);
        double worst = std::numeric_limits<double>::infinity();
        for (double f : linspace(band_lo, band_hi, band_points)) worst = std::min(worst, gain_db(st, f));
        const double g = guard * (band_hi - band_lo);
        double leak = -std::numeric_limits<double>::infinity();
        for (double f : grid) {
            if (f < band_lo - g || f > band_hi + g) leak = std::max(leak, gain_db(st, f));
        }
        return worst - weight * std::max(0.0, leak + min_rejection_db);
    }
};

struct GridOptimum {
    double c0_shunt, c0_series, value;
};

// n x n grid over log10 c0 in [lo, hi], followed by zoom levels that re-grid
// +-1 cell around the incumbent.
inline GridOptimum grid_search(const SynthesisProblem& p, std::size_t n, double lo, double hi, int zooms = 0,
                               std::size_t zoom_n = 11) {
    GridOptimum best{0, 0, -std::numeric_limits<double>::infinity()};
    double bx = 0, by = 0;
    for (double x : linspace(lo, hi, n)) {
        for (double y : linspace(lo, hi, n)) {
            const double v = p.objective(std::pow(10.0, x), std::pow(10.0, y));
            if (v > best.value) best = {std::pow(10.0, x), std::pow(10.0, y), v}, bx = x, by = y;
        }
    }
    double h = (hi - lo) / static_cast<double>(n - 1);
    for (int z = 0; z < zooms; ++z) {
        const double cx = bx, cy = by;
        for (double x : linspace(std::max(lo, cx - h), std::min(hi, cx + h), zoom_n)) {
            for (double y : linspace(std::max(lo, cy - h), std::min(hi, cy + h), zoom_n)) {
                const double v = p.objective(std::pow(10.0, x), std::pow(10.0, y));
                if (v > best.value) best = {std::pow(10.0, x), std::pow(10.0, y), v}, bx = x, by = y;
            }
        }
        h = 2.0 * h / static_cast<double>(zoom_n - 1);
    }
    return best;
}

// Local minima of a sampled trace, strictly below both neighbours.
inline std::vector<std::size_t> local_minima(const std::vector<double>& v) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] < v[i - 1] && v[i] <= v[i + 1]) out.push_back(i);
    }
    return out;
}

// Vertex of the parabola through three equally spaced samples.
inline double vertex(double x0, double h, double ym, double y0, double yp) {
    const double den = ym - 2.0 * y0 + yp;
    return den == 0.0 ? x0 : x0 + 0.5 * h * (ym - yp) / den;
}

}  // namespace oracle
