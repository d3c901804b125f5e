#include "ladderkit/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ladderkit/errors.hpp"

namespace ladderkit {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

NelderMeadResult nelder_mead(const Objective& objective, std::span<const double> x0,
                             const NelderMeadOptions& opts) {
    if (x0.empty()) throw InputError("nelder_mead needs at least one variable");
    if (opts.max_iter < 1) throw InputError("max_iter must be >= 1");
    if (!(opts.tol > 0.0)) throw InputError("tol must be > 0");
    if (opts.step.empty()) throw InputError("initial step must not be empty");
    if (opts.step.size() != 1 && opts.step.size() != x0.size()) {
        throw InputError("initial step must have one entry or one per variable");
    }

    const std::size_t n = x0.size();
    NelderMeadResult res;
    auto eval = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = objective(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> pts(n + 1, std::vector<double>(x0.begin(), x0.end()));
    std::vector<double> vals(n + 1);
    vals[0] = eval(pts[0]);
    if (!std::isfinite(vals[0])) throw InputError("objective is not finite at the starting point");
    for (std::size_t i = 0; i < n; ++i) {
        pts[i + 1][i] += opts.step.size() == 1 ? opts.step[0] : opts.step[i];
        vals[i + 1] = eval(pts[i + 1]);
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    auto along = [&](double t, std::vector<double>& out) {
        // centroid + t * (centroid - worst)
        const auto& worst = pts[order[n]];
        for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (centroid[j] - worst[j]);
    };

    for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const double fbest = vals[order[0]];
        const double fworst = vals[order[n]];
        if (fworst - fbest < opts.tol * (1.0 + std::abs(fbest))) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[order[i]][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        const double fsecond = vals[order[n - 1]];
        along(kReflect, trial);
        const double fr = eval(trial);
        if (fr < fbest) {
            along(kExpand, trial2);
            const double fe = eval(trial2);
            if (fe < fr) {
                pts[order[n]] = trial2;
                vals[order[n]] = fe;
            } else {
                pts[order[n]] = trial;
                vals[order[n]] = fr;
            }
            continue;
        }
        if (fr < fsecond) {
            pts[order[n]] = trial;
            vals[order[n]] = fr;
            continue;
        }
        // Outside contraction when the reflection beat the worst point, inside otherwise.
        const bool outside = fr < fworst;
        along(outside ? kContract * kReflect : -kContract, trial2);
        const double fc = eval(trial2);
        if (outside ? fc <= fr : fc < fworst) {
            pts[order[n]] = trial2;
            vals[order[n]] = fc;
            continue;
        }
        const auto& best = pts[order[0]];
        for (std::size_t i = 1; i <= n; ++i) {
            auto& p = pts[order[i]];
            for (std::size_t j = 0; j < n; ++j) p[j] = best[j] + kShrink * (p[j] - best[j]);
            vals[order[i]] = eval(p);
        }
    }

    const auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
    res.x = pts[static_cast<std::size_t>(best)];
    res.f = vals[static_cast<std::size_t>(best)];
    return res;
}

}  // namespace ladderkit
