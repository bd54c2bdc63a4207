#include "gss/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gss {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_eval(const Objective& f, const std::vector<double>& x) {
    const double v = f(x);
    return std::isnan(v) ? kNegInf : v;
}

} // namespace

SearchResult pattern_search(const Objective& f, const std::vector<double>& lower,
                            const std::vector<double>& upper,
                            const std::vector<double>& init, const SearchOptions& opts) {
    const std::size_t n = init.size();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("pattern_search: bound size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw std::invalid_argument("pattern_search: bounds must be finite, lo < hi");
        if (init[i] < lower[i] || init[i] > upper[i])
            throw std::invalid_argument("pattern_search: init outside bounds");
    }

    SearchResult res;
    res.best = init;
    res.value = safe_eval(f, init);
    res.evaluations = 1;

    double mesh = opts.initial_mesh;
    std::size_t iter = 0;
    res.trace.push_back({iter, res.best, res.value, mesh, true});

    // Exploratory sweep: poll +e_i then -e_i per coordinate, accepting
    // improvements cumulatively so later coordinates poll from the updated
    // point. Returns the swept point and its objective.
    const auto explore = [&](std::vector<double> x, double fx, double mesh) {
        for (std::size_t i = 0; i < n && res.evaluations < opts.max_evaluations; ++i) {
            const double step = mesh * (upper[i] - lower[i]);
            for (int sign : {+1, -1}) {
                const double xi = std::clamp(x[i] + sign * step, lower[i], upper[i]);
                if (xi == x[i]) continue; // projection landed on the sweep point
                std::vector<double> cand = x;
                cand[i] = xi;
                const double v = safe_eval(f, cand);
                ++res.evaluations;
                if (v > fx) {
                    x = std::move(cand);
                    fx = v;
                    break;
                }
                if (res.evaluations >= opts.max_evaluations) break;
            }
        }
        return std::pair{std::move(x), fx};
    };

    while (mesh >= opts.mesh_tolerance && res.evaluations < opts.max_evaluations) {
        ++iter;
        std::vector<double> prev = res.best;
        auto [x1, f1] = explore(res.best, res.value, mesh);
        const bool improved = f1 > res.value;
        if (improved) {
            res.best = std::move(x1);
            res.value = f1;
            // pattern moves: extrapolate the aggregate sweep direction and
            // re-explore around the projected point while it keeps winning
            while (res.evaluations < opts.max_evaluations) {
                std::vector<double> proj(n);
                bool distinct = false;
                for (std::size_t i = 0; i < n; ++i) {
                    proj[i] = std::clamp(2.0 * res.best[i] - prev[i], lower[i], upper[i]);
                    distinct |= proj[i] != res.best[i];
                }
                if (!distinct) break;
                const double fproj = safe_eval(f, proj);
                ++res.evaluations;
                auto [x2, f2] = explore(std::move(proj), fproj, mesh);
                if (f2 > res.value) {
                    prev = std::move(res.best);
                    res.best = std::move(x2);
                    res.value = f2;
                } else {
                    break;
                }
            }
            mesh = std::min(mesh * opts.expansion, opts.initial_mesh);
        } else {
            mesh *= opts.contraction;
        }
        res.trace.push_back({iter, res.best, res.value, mesh, improved});
    }
    return res;
}

void gss_bounds(int m, int t, std::vector<double>& lower, std::vector<double>& upper) {
    const int n1 = 1 << (m - 5);
    const std::size_t dim = static_cast<std::size_t>(t) + 3 * n1;
    lower.assign(dim, GssParameters::kEps);
    upper.assign(dim, 0.0);
    for (int i = 0; i < t; ++i) upper[i] = 1.0;
    for (std::size_t i = t; i < dim; ++i) upper[i] = M_PI / 2 - GssParameters::kEps;
}

GssParameters midpoint_init(int m, int t) {
    GssParameters p;
    p.m = m;
    p.t = t;
    const int n1 = 1 << (m - 5);
    p.radii.assign(t, (GssParameters::kEps + 1.0) / 2.0);
    p.angles.resize(n1);
    for (int j = 0; j < n1; ++j) {
        const double a = M_PI / 4 + j * 1e-2;
        p.angles[j] = {a, a, a};
    }
    p.validate();
    return p;
}

double objective_for(int m, int t, const std::vector<double>& flat,
                     const FiberConfig& fiber, const ImpairmentConfig& imp,
                     std::size_t D, std::uint64_t seed, Metric metric) {
    Constellation c;
    try {
        c = build_gss(GssParameters::unflatten(m, t, flat));
    } catch (const std::invalid_argument&) {
        return kNegInf;
    }
    const LinkResult res = run_link(c, fiber, imp, D, seed);
    const double v = metric == Metric::kRbmd ? res.air.rbmd : res.air.mi;
    return std::isfinite(v) ? v : kNegInf;
}

double optimize_ps(const FiberConfig& fiber, const ImpairmentConfig& imp,
                   std::size_t D, std::uint64_t seed, Metric metric,
                   SearchTrace* trace) {
    const Objective f = [&](const std::vector<double>& x) {
        Constellation c;
        try {
            c = build_ps_pm16qam(x[0]);
        } catch (const std::invalid_argument&) {
            return kNegInf;
        }
        const LinkResult res = run_link(c, fiber, imp, D, seed);
        return metric == Metric::kRbmd ? res.air.rbmd : res.air.mi;
    };
    SearchOptions opts;
    opts.max_evaluations = 200;
    const SearchResult res =
        pattern_search(f, {0.02}, {0.98}, {0.5}, opts);
    if (trace) *trace = res.trace;
    return res.best[0];
}

} // namespace gss
