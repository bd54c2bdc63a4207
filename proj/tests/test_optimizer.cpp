#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gss/constellation.hpp"
#include "gss/optimizer.hpp"

using namespace gss;

TEST_CASE("pattern search on smooth objectives") {
    SearchOptions opts;
    opts.max_evaluations = 5000;

    SUBCASE("1-d quadratic") {
        const Objective f = [](const std::vector<double>& x) {
            return -(x[0] - 0.3) * (x[0] - 0.3);
        };
        const auto res = pattern_search(f, {0.0}, {1.0}, {0.9}, opts);
        CHECK(std::fabs(res.best[0] - 0.3) < 1e-3);
        CHECK(res.value > -1e-6);
        CHECK(res.evaluations <= opts.max_evaluations);
    }

    SUBCASE("maximum on the boundary") {
        const Objective f = [](const std::vector<double>& x) { return x[0]; };
        const auto res = pattern_search(f, {0.0}, {2.0}, {0.5}, opts);
        CHECK(res.best[0] == doctest::Approx(2.0).epsilon(1e-6));
    }

    SUBCASE("constant objective terminates by mesh shrink") {
        const Objective f = [](const std::vector<double>&) { return 1.0; };
        const auto res = pattern_search(f, {0.0, 0.0}, {1.0, 1.0}, {0.5, 0.5}, opts);
        CHECK(res.value == 1.0);
        CHECK(res.best == std::vector<double>{0.5, 0.5});
    }

    SUBCASE("28-dimensional concave bowl") {
        std::vector<double> lo(28, 0.0), hi(28, 1.0), init(28, 0.9), target(28);
        for (int i = 0; i < 28; ++i) target[i] = 0.1 + 0.7 * (i / 27.0);
        const Objective f = [&](const std::vector<double>& x) {
            double s = 0.0;
            for (int i = 0; i < 28; ++i) s -= (x[i] - target[i]) * (x[i] - target[i]);
            return s;
        };
        SearchOptions big = opts;
        big.max_evaluations = 60000;
        const auto res = pattern_search(f, lo, hi, init, big);
        for (int i = 0; i < 28; ++i) CHECK(std::fabs(res.best[i] - target[i]) < 5e-3);
    }

    SUBCASE("nan treated as -infinity, not accepted") {
        const Objective f = [](const std::vector<double>& x) {
            return x[0] > 0.6 ? std::nan("") : x[0];
        };
        const auto res = pattern_search(f, {0.0}, {1.0}, {0.5}, opts);
        CHECK(res.best[0] <= 0.6);
        CHECK(std::isfinite(res.value));
    }
}

TEST_CASE("pattern search bookkeeping") {
    SearchOptions opts;
    const Objective f = [](const std::vector<double>& x) {
        return -(x[0] - 0.25) * (x[0] - 0.25) - (x[1] - 0.75) * (x[1] - 0.75);
    };
    const auto res = pattern_search(f, {0.0, 0.0}, {1.0, 1.0}, {0.5, 0.5}, opts);

    // incumbent trace is monotone non-decreasing and starts at the init
    REQUIRE(!res.trace.empty());
    CHECK(res.trace.front().params == std::vector<double>{0.5, 0.5});
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
        CHECK(res.trace[i].objective >= res.trace[i - 1].objective);
        CHECK(res.trace[i].iteration == i);
    }
    CHECK(res.trace.back().objective == res.value);

    // every trace point is inside the box
    for (const auto& e : res.trace)
        for (double v : e.params) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }

    // deterministic: identical reruns agree bit-for-bit
    const auto res2 = pattern_search(f, {0.0, 0.0}, {1.0, 1.0}, {0.5, 0.5}, opts);
    CHECK(res2.best == res.best);
    CHECK(res2.value == res.value);
    CHECK(res2.evaluations == res.evaluations);

    // malformed inputs
    CHECK_THROWS_AS(pattern_search(f, {0.0}, {1.0, 1.0}, {0.5, 0.5}, opts),
                    std::invalid_argument);
    CHECK_THROWS_AS(pattern_search(f, {0.0, 0.0}, {1.0, 1.0}, {2.0, 0.5}, opts),
                    std::invalid_argument);
    CHECK_THROWS_AS(pattern_search(f, {1.0, 1.0}, {0.0, 0.0}, {0.5, 0.5}, opts),
                    std::invalid_argument);
}

TEST_CASE("gss parameter bounds and midpoint start") {
    std::vector<double> lo, hi;
    gss_bounds(8, 4, lo, hi);
    REQUIRE(lo.size() == 28);
    REQUIRE(hi.size() == 28);
    for (std::size_t i = 0; i < lo.size(); ++i) CHECK(lo[i] < hi[i]);

    const GssParameters mid = midpoint_init(8, 4);
    CHECK(mid.m == 8);
    CHECK(mid.t == 4);
    const std::vector<double> flat = mid.flatten();
    REQUIRE(flat.size() == 28);
    for (std::size_t i = 0; i < flat.size(); ++i) {
        CHECK(flat[i] >= lo[i]);
        CHECK(flat[i] <= hi[i]);
    }

    // the staggered midpoint must build a valid constellation
    const Constellation c = build_gss(mid);
    CHECK(c.points.size() == 256);
    CHECK(c.mean_power() == doctest::Approx(1.0));

    // an unstaggered midpoint would duplicate same-shell points; the
    // staggering keeps every angle triple distinct
    for (std::size_t a = 0; a < mid.angles.size(); ++a)
        for (std::size_t b = a + 1; b < mid.angles.size(); ++b) {
            const bool same = mid.angles[a].theta == mid.angles[b].theta &&
                              mid.angles[a].phi == mid.angles[b].phi &&
                              mid.angles[a].omega == mid.angles[b].omega;
            CHECK_FALSE(same);
        }
}

TEST_CASE("link objective under common random numbers") {
    FiberConfig fiber;
    fiber.span_length_km = 80.0;
    fiber.steps_per_span = 100;
    ImpairmentConfig imp;
    imp.launch_power_dbm = 0.0;
    const std::size_t D = 1 << 10;

    const std::vector<double> flat = midpoint_init(8, 4).flatten();
    const double v1 = objective_for(8, 4, flat, fiber, imp, D, 5, Metric::kRbmd);
    const double v2 = objective_for(8, 4, flat, fiber, imp, D, 5, Metric::kRbmd);
    CHECK(std::isfinite(v1));
    CHECK(v1 > 0.0);
    CHECK(v1 == v2); // common random numbers: bit-identical re-evaluation

    const double vmi = objective_for(8, 4, flat, fiber, imp, D, 5, Metric::kMi);
    CHECK(vmi >= v1 - 0.01);

    // an invalid parameter vector is -infinity rather than a throw
    std::vector<double> bad = flat;
    bad[0] = 5.0;
    CHECK(objective_for(8, 4, bad, fiber, imp, D, 5, Metric::kRbmd) ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("probabilistic shaping search") {
    // near-linear regime: almost-AWGN, where MI is maximized by a pmf close
    // to uniform-ish shaping; the search must return a bracketed interior
    // optimum matching a grid scan
    FiberConfig fiber;
    fiber.span_length_km = 80.0;
    fiber.steps_per_span = 100;
    ImpairmentConfig imp;
    imp.launch_power_dbm = 0.0;
    const std::size_t D = 1 << 11;

    SearchTrace trace;
    const double p = optimize_ps(fiber, imp, D, 7, Metric::kMi, &trace);
    CHECK(p >= 0.02);
    CHECK(p <= 0.98);
    REQUIRE(!trace.empty());
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i].objective >= trace[i - 1].objective);

    // grid scan oracle with the same seed: the search result must be at
    // least as good as every coarse grid point
    auto eval = [&](double pl) {
        const Constellation c = build_ps_pm16qam(pl);
        return run_link(c, fiber, imp, D, 7).air.mi;
    };
    const double found = eval(p);
    for (double pl = 0.1; pl < 0.95; pl += 0.1)
        CHECK(found >= eval(pl) - 0.02);
}
