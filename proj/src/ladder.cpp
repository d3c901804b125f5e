#include "ladderkit/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ladderkit/nelder_mead.hpp"
#include "ladderkit/parallel.hpp"

namespace ladderkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double gain_db(const Abcd& m, const PortImpedance& zs, const PortImpedance& zl) {
    try {
        return 10.0 * std::log10(transducer_gain(m, zs, zl).gain);
    } catch (const SingularNetworkError&) {
        return kNegInf;
    }
}

// Frequency where the straight line through (f0, d0) and (f1, d1) reaches level.
double crossing(double f0, double d0, double f1, double d1, double level) {
    if (!std::isfinite(d0)) return f1;
    if (!std::isfinite(d1)) return f0;
    if (d1 == d0) return 0.5 * (f0 + f1);
    return f0 + (level - d0) / (d1 - d0) * (f1 - f0);
}

}  // namespace

void LadderDesign::validate() const {
    if (stages.empty()) throw InputError("ladder needs at least one stage");
    for (const auto& s : stages) s.resonator.validate();
}

Abcd build_ladder(const LadderDesign& design, double f) {
    if (design.stages.empty()) throw InputError("ladder needs at least one stage");
    Abcd acc;
    for (const auto& stage : design.stages) {
        const Complex y = admittance(stage.resonator, f);
        if (stage.placement == Placement::Shunt) {
            acc = acc * shunt_abcd(y);
        } else {
            if (std::abs(y) == 0.0) throw SingularNetworkError("series stage is an open circuit");
            acc = acc * series_abcd(1.0 / y);
        }
    }
    return acc;
}

AbcdSweep ladder_abcd_sweep(const LadderDesign& design, std::span<const double> grid) {
    design.validate();
    validate_grid(grid);
    std::vector<Abcd> data(grid.size());
    std::vector<bool> flags(grid.size(), false);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            data[i] = build_ladder(design, grid[i]);
        } catch (const Error&) {
            data[i] = Abcd{};
            flags[i] = true;
        }
    }
    return AbcdSweep({grid.begin(), grid.end()}, std::move(data), std::move(flags));
}

SSweep s_from_abcd_sweep(const AbcdSweep& abcd, const PortImpedance& zs, const PortImpedance& zl) {
    const bool voltage_wave = zs.is_real() && zs == zl;
    std::vector<SMatrix> out(abcd.size());
    std::vector<bool> flags(abcd.size(), false);
    for (std::size_t i = 0; i < abcd.size(); ++i) {
        if (abcd.flagged(i)) {
            flags[i] = true;
            continue;
        }
        try {
            out[i] = voltage_wave ? abcd_to_s(abcd[i], zs.r()) : power_wave_s(abcd[i], zs, zl);
        } catch (const SingularNetworkError&) {
            out[i] = SMatrix{};
            flags[i] = true;
        }
    }
    return SSweep({abcd.freqs().begin(), abcd.freqs().end()}, std::move(out), std::move(flags));
}

SSweep simulate(const LadderDesign& design, std::span<const double> grid) {
    return s_from_abcd_sweep(ladder_abcd_sweep(design, grid), design.port1, design.port2);
}

FilterMetrics extract_metrics_db(std::span<const double> freqs, std::span<const double> db,
                                 double guard_fraction) {
    using Kind = MetricsError::Kind;
    if (freqs.size() != db.size()) throw InputError("frequency and |S21| lengths differ");
    if (!(guard_fraction >= 0.0)) throw InputError("guard fraction must be >= 0");
    const std::size_t n = freqs.size();
    if (n < 3) throw MetricsError(Kind::NoCrossing, "sweep too short for a 3-dB band");

    const auto [mn, mx] = std::minmax_element(db.begin(), db.end());
    const std::size_t ip = static_cast<std::size_t>(mx - db.begin());
    const double peak = *mx;
    if (!std::isfinite(peak)) throw MetricsError(Kind::NoCrossing, "|S21| peak is not finite");
    if (!(peak - *mn >= 3.0)) throw MetricsError(Kind::NoCrossing, "|S21| never drops 3 dB below its peak");
    if (ip == 0 || ip + 1 == n) {
        throw MetricsError(Kind::BandNotContained, "|S21| peak lies on the sweep boundary");
    }

    const double level = peak - 3.0;
    std::size_t lo = ip;
    while (lo > 0 && db[lo - 1] >= level) --lo;
    if (lo == 0) throw MetricsError(Kind::BandNotContained, "3-dB band runs past the low end of the sweep");
    std::size_t hi = ip;
    while (hi + 1 < n && db[hi + 1] >= level) ++hi;
    if (hi + 1 == n) {
        throw MetricsError(Kind::BandNotContained, "3-dB band runs past the high end of the sweep");
    }

    FilterMetrics m;
    m.band_lo = crossing(freqs[lo - 1], db[lo - 1], freqs[lo], db[lo], level);
    m.band_hi = crossing(freqs[hi], db[hi], freqs[hi + 1], db[hi + 1], level);
    m.il_db = -peak;
    m.f_center = 0.5 * (m.band_lo + m.band_hi);
    m.fbw_3db = 100.0 * (m.band_hi - m.band_lo) / m.f_center;

    const double guard = guard_fraction * (m.band_hi - m.band_lo);
    double worst = kNegInf;
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (freqs[i] < m.band_lo - guard || freqs[i] > m.band_hi + guard) {
            worst = std::max(worst, db[i]);
            any = true;
        }
    }
    if (!any) throw MetricsError(Kind::NoOutOfBandPoints, "no sweep points outside the guarded passband");
    m.oob_rejection_db = -worst;
    return m;
}

FilterMetrics extract_metrics(const SSweep& s, double guard_fraction) {
    std::vector<double> f, db;
    f.reserve(s.size());
    db.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.flagged(i)) continue;
        f.push_back(s.freq(i));
        db.push_back(db20(s[i].s21));
    }
    return extract_metrics_db(f, db, guard_fraction);
}

// ---------------------------------------------------------------------------

LadderDesign instantiate(const LadderTemplate& tmpl, double c0_shunt, double c0_series) {
    LadderDesign d{{}, tmpl.port1, tmpl.port2};
    d.stages.reserve(tmpl.stages.size());
    for (const auto& st : tmpl.stages) {
        ResonatorSpec spec = st.spec;
        spec.c0 = st.placement == Placement::Shunt ? c0_shunt : c0_series;
        d.stages.push_back({st.placement, mbvd_from_spec(spec)});
    }
    return d;
}

StaticCapObjective::StaticCapObjective(LadderTemplate tmpl, double band_lo, double band_hi,
                                       std::span<const double> metrics_grid,
                                       const SynthesisOptions& opts)
    : tmpl_(std::move(tmpl)), opts_(opts) {
    if (tmpl_.stages.empty()) throw InputError("template needs at least one stage");
    if (!(band_lo > 0.0) || !(band_hi >= band_lo)) throw InputError("target band must be non-empty");
    if (opts.band_points < 1) throw InputError("band_points must be >= 1");
    band_ = band_hi > band_lo ? linspace(band_lo, band_hi, opts.band_points)
                              : std::vector<double>{band_lo};
    const double guard = opts.guard_fraction * (band_hi - band_lo);
    for (double f : metrics_grid) {
        if (f < band_lo - guard || f > band_hi + guard) reject_.push_back(f);
    }
}

double StaticCapObjective::operator()(double c0_shunt, double c0_series) const {
    const LadderDesign d = instantiate(tmpl_, c0_shunt, c0_series);
    double worst_in = std::numeric_limits<double>::infinity();
    for (double f : band_) {
        double g = kNegInf;
        try {
            g = gain_db(build_ladder(d, f), d.port1, d.port2);
        } catch (const SingularNetworkError&) {
        }
        worst_in = std::min(worst_in, g);
    }
    double leak = kNegInf;
    for (double f : reject_) {
        try {
            leak = std::max(leak, gain_db(build_ladder(d, f), d.port1, d.port2));
        } catch (const SingularNetworkError&) {
        }
    }
    const double excess = std::max(0.0, leak + opts_.min_rejection_db);
    return worst_in - opts_.penalty_weight * excess;
}

SynthesisResult optimize_static_caps(const LadderTemplate& tmpl, double band_lo, double band_hi,
                                     std::span<const double> metrics_grid,
                                     const SynthesisOptions& opts) {
    validate_grid(metrics_grid);
    if (metrics_grid.empty() || band_hi < metrics_grid.front() || band_lo > metrics_grid.back()) {
        throw SynthesisError("target band lies outside the simulation grid");
    }
    if (opts.starts_per_axis < 1) throw InputError("starts_per_axis must be >= 1");
    if (!(opts.log10_c0_max > opts.log10_c0_min)) throw InputError("empty c0 search box");
    const StaticCapObjective objective(tmpl, band_lo, band_hi, metrics_grid, opts);

    const double lo = opts.log10_c0_min;
    const double hi = opts.log10_c0_max;
    auto in_box = [&](double v) { return v >= lo && v <= hi; };
    Objective cost = [&](std::span<const double> x) {
        if (!in_box(x[0]) || !in_box(x[1])) return std::numeric_limits<double>::infinity();
        return -objective(std::pow(10.0, x[0]), std::pow(10.0, x[1]));
    };

    const auto axis = linspace(lo, hi, static_cast<std::size_t>(opts.starts_per_axis));
    const std::size_t starts = axis.size() * axis.size();
    struct Candidate {
        bool ok = false;
        SynthesisResult result;
    };
    std::vector<Candidate> candidates(starts);

    parallel_for(starts, [&](std::size_t k) {
        const double x0[2] = {axis[k / axis.size()], axis[k % axis.size()]};
        NelderMeadOptions nm;
        nm.max_iter = opts.max_iter;
        nm.tol = opts.tol;
        const double step = 0.25 * (hi - lo) / 3.0;
        nm.step = {x0[0] + step > hi ? -step : step, x0[1] + step > hi ? -step : step};
        NelderMeadResult best = nelder_mead(cost, x0, nm);
        // One restart from the reported optimum guards against a collapsed simplex.
        NelderMeadResult again = nelder_mead(cost, best.x, nm);
        if (again.f <= best.f) best = again;

        SynthesisResult r;
        r.c0_shunt = std::pow(10.0, best.x[0]);
        r.c0_series = std::pow(10.0, best.x[1]);
        r.objective = -best.f;
        r.design = instantiate(tmpl, r.c0_shunt, r.c0_series);
        try {
            r.metrics = extract_metrics(simulate(r.design, metrics_grid), opts.guard_fraction);
        } catch (const MetricsError&) {
            return;
        }
        if (r.metrics.band_hi < band_lo || r.metrics.band_lo > band_hi) return;
        candidates[k] = {true, std::move(r)};
    });

    const SynthesisResult* best = nullptr;
    for (const auto& c : candidates) {
        if (!c.ok) continue;
        if (!best) {
            best = &c.result;
            continue;
        }
        const double diff = c.result.objective - best->objective;
        const double tie = 1e-9 * (1.0 + std::abs(best->objective));
        if (diff > tie || (std::abs(diff) <= tie && c.result.metrics.fbw_3db > best->metrics.fbw_3db)) {
            best = &c.result;
        }
    }
    if (!best) throw SynthesisError("no static-capacitance start produced a passband in the target band");
    return *best;
}

// ---------------------------------------------------------------------------

double peak_gain(const AbcdSweep& abcd, const PortImpedance& zs, const PortImpedance& zl,
                 const MatchOptions& opts) {
    double best = 0.0;
    for (std::size_t i = 0; i < abcd.size(); ++i) {
        if (abcd.flagged(i)) continue;
        const double f = abcd.freq(i);
        if (opts.band_lo && f < *opts.band_lo) continue;
        if (opts.band_hi && f > *opts.band_hi) continue;
        try {
            best = std::max(best, transducer_gain(abcd[i], zs, zl).gain);
        } catch (const SingularNetworkError&) {
        }
    }
    return best;
}

MatchResult find_complex_match(const AbcdSweep& abcd, const MatchOptions& opts) {
    if (!(opts.r_min > 0.0) || !(opts.r_max >= opts.r_min) || !(opts.x_max >= opts.x_min)) {
        throw InputError("match search box needs 0 < r_min <= r_max and x_min <= x_max");
    }
    if (!(opts.coarse_step > 0.0)) throw InputError("coarse_step must be > 0");
    auto axis = [&](double a, double b) {
        const auto n = static_cast<std::size_t>(std::floor((b - a) / opts.coarse_step + 1e-9)) + 1;
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = a + opts.coarse_step * static_cast<double>(i);
        return v;
    };
    const auto rs = axis(opts.r_min, opts.r_max);
    const auto xs = axis(opts.x_min, opts.x_max);

    MatchResult out;
    const PortImpedance ref(50.0);
    try {
        out.reference_metrics = extract_metrics(s_from_abcd_sweep(abcd, ref, ref), opts.guard_fraction);
    } catch (const MetricsError&) {
    }
    // Without an explicit window the peak is searched inside the 50 ohm
    // passband, so the match cannot trade the passband for an edge of the sweep.
    MatchOptions win = opts;
    if (!win.band_lo && !win.band_hi && out.reference_metrics) {
        win.band_lo = out.reference_metrics->band_lo;
        win.band_hi = out.reference_metrics->band_hi;
    }
    out.window_lo = win.band_lo;
    out.window_hi = win.band_hi;

    std::vector<double> grid_best(rs.size(), -1.0);
    std::vector<double> grid_x(rs.size(), 0.0);
    parallel_for(rs.size(), [&](std::size_t i) {
        for (double x : xs) {
            const PortImpedance z(rs[i], x);
            const double g = peak_gain(abcd, z, z, win);
            if (g > grid_best[i]) {
                grid_best[i] = g;
                grid_x[i] = x;
            }
        }
    });
    const auto ib = static_cast<std::size_t>(std::max_element(grid_best.begin(), grid_best.end()) -
                                              grid_best.begin());

    auto inside = [&](double r, double x) {
        return r >= opts.r_min && r <= opts.r_max && x >= opts.x_min && x <= opts.x_max;
    };
    Objective cost;
    std::vector<double> x0;
    if (opts.independent_ports) {
        cost = [&](std::span<const double> v) {
            if (!inside(v[0], v[1]) || !inside(v[2], v[3])) return std::numeric_limits<double>::infinity();
            return -peak_gain(abcd, PortImpedance(v[0], v[1]), PortImpedance(v[2], v[3]), win);
        };
        x0 = {rs[ib], grid_x[ib], rs[ib], grid_x[ib]};
    } else {
        cost = [&](std::span<const double> v) {
            if (!inside(v[0], v[1])) return std::numeric_limits<double>::infinity();
            const PortImpedance z(v[0], v[1]);
            return -peak_gain(abcd, z, z, win);
        };
        x0 = {rs[ib], grid_x[ib]};
    }
    NelderMeadOptions nm;
    nm.max_iter = opts.max_iter;
    nm.tol = 1e-12;
    nm.step = {0.5 * opts.coarse_step};
    NelderMeadResult refined = nelder_mead(cost, x0, nm);
    NelderMeadResult again = nelder_mead(cost, refined.x, nm);
    if (again.f <= refined.f) refined = again;

    out.reference_gain = peak_gain(abcd, ref, ref, win);
    const auto& v = refined.x;
    out.z1 = PortImpedance(v[0], v[1]);
    out.z2 = opts.independent_ports ? PortImpedance(v[2], v[3]) : out.z1;
    out.peak_gain = -refined.f;
    if (out.reference_gain > out.peak_gain) {
        out.z1 = out.z2 = ref;
        out.peak_gain = out.reference_gain;
    }

    try {
        out.matched_metrics = extract_metrics(s_from_abcd_sweep(abcd, out.z1, out.z2), opts.guard_fraction);
    } catch (const MetricsError&) {
    }
    return out;
}

}  // namespace ladderkit
