#include <doctest.h>

#include <cmath>
#include <limits>

#include "ladderkit/errors.hpp"
#include "ladderkit/nelder_mead.hpp"
#include "ladderkit/parallel.hpp"

using namespace ladderkit;

TEST_SUITE("nelder_mead") {

TEST_CASE("sphere") {
    const auto r = nelder_mead([](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; },
                               std::vector<double>{3.0, 4.0}, {2000, 1e-16, {0.5}});
    CHECK(std::hypot(r.x[0], r.x[1]) < 1e-6);
    CHECK(r.converged);
}

TEST_CASE("rosenbrock") {
    auto rosen = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const auto r = nelder_mead(rosen, std::vector<double>{-1.2, 1.0}, {2000, 1e-16, {0.1}});
    CHECK(std::abs(r.x[0] - 1.0) < 1e-4);
    CHECK(std::abs(r.x[1] - 1.0) < 1e-4);
    CHECK(r.iterations <= 2000);
    // A coarse grid search lands in the same basin.
    double best = std::numeric_limits<double>::infinity(), bx = 0, by = 0;
    for (int i = 0; i <= 400; ++i) {
        for (int k = 0; k <= 400; ++k) {
            const double p[2] = {-2.0 + 0.01 * i, -2.0 + 0.01 * k};
            const double v = rosen(p);
            if (v < best) best = v, bx = p[0], by = p[1];
        }
    }
    CHECK(std::abs(bx - r.x[0]) <= 0.01);
    CHECK(std::abs(by - r.x[1]) <= 0.01);
}

TEST_CASE("infinite half-space is avoided") {
    auto f = [](std::span<const double> x) {
        if (x[0] < 0.0) return std::numeric_limits<double>::infinity();
        return std::pow(x[0] - 1.0, 2) + std::pow(x[1], 2);
    };
    const auto r = nelder_mead(f, std::vector<double>{0.5, 0.5}, {2000, 1e-14, {1.0}});
    CHECK(std::isfinite(r.f));
    CHECK(r.x[0] >= 0.0);
    CHECK(std::abs(r.x[0] - 1.0) < 1e-5);
}

TEST_CASE("nan values are rejected, not propagated") {
    auto f = [](std::span<const double> x) { return x[0] > 2.0 ? NAN : (x[0] - 1.5) * (x[0] - 1.5); };
    const auto r = nelder_mead(f, std::vector<double>{0.0}, {2000, 1e-14, {3.0}});
    CHECK(std::abs(r.x[0] - 1.5) < 1e-5);
}

TEST_CASE("non-finite start is an input error") {
    auto f = [](std::span<const double>) { return std::numeric_limits<double>::infinity(); };
    CHECK_THROWS_AS(nelder_mead(f, std::vector<double>{0.0}), InputError);
    CHECK_THROWS_AS(nelder_mead([](std::span<const double>) { return 0.0; }, std::vector<double>{}), InputError);
}

TEST_CASE("iteration cap reports non-convergence") {
    auto rosen = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const auto r = nelder_mead(rosen, std::vector<double>{-1.2, 1.0}, {5, 1e-16, {0.1}});
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 5);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 7) throw InputError("x"); }, 3), InputError);
    parallel_for(0, [](std::size_t) { FAIL("not called"); }, 2);
}

}  // TEST_SUITE
