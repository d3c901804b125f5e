#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ladderkit {

struct NelderMeadOptions {
    int max_iter = 2000;
    // Converged when (f_worst - f_best) < tol * (1 + |f_best|).
    double tol = 1e-10;
    // Initial simplex edge along each coordinate. A single entry applies to
    // every coordinate.
    std::vector<double> step{0.1};
};

struct NelderMeadResult {
    std::vector<double> x;
    double f = 0.0;
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

// Downhill simplex with reflection 1, expansion 2, contraction 0.5, shrink 0.5.
// Non-finite objective values are treated as +inf, so candidates there are
// always rejected. Throws InputError if the objective is not finite at x0.
NelderMeadResult nelder_mead(const Objective& objective, std::span<const double> x0,
                             const NelderMeadOptions& opts = {});

}  // namespace ladderkit
