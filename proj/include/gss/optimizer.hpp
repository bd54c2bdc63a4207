#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gss/constellation.hpp"
#include "gss/fiberlink.hpp"

namespace gss {

enum class Metric { kRbmd, kMi };

struct SearchOptions {
    double initial_mesh = 0.125;   // fraction of box width
    double expansion = 2.0;
    double contraction = 0.5;
    double mesh_tolerance = 1e-4;
    std::size_t max_evaluations = 2000;
};

struct TraceEntry {
    std::size_t iteration;
    std::vector<double> params;
    double objective;
    double mesh;
    bool accepted;
};
using SearchTrace = std::vector<TraceEntry>;

struct SearchResult {
    std::vector<double> best;
    double value = 0.0;
    SearchTrace trace;
    std::size_t evaluations = 0;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Generalized pattern search with coordinate polling (+e_i before -e_i,
// ascending i), projection onto the box, mesh expansion on success and
// contraction on a failed poll. NaN objectives are treated as -infinity.
SearchResult pattern_search(const Objective& f, const std::vector<double>& lower,
                            const std::vector<double>& upper,
                            const std::vector<double>& init, const SearchOptions& opts);

// Box bounds of the flattened GssParameters vector.
void gss_bounds(int m, int t, std::vector<double>& lower, std::vector<double>& upper);

// All radii at the midpoint, all angle triples at pi/4 staggered by
// +0.01 per point index so same-shell points stay distinct.
GssParameters midpoint_init(int m, int t);

// Builds the constellation from a flattened parameter vector and runs the
// link with a fixed seed (common random numbers). Construction failure or a
// non-finite metric yields -infinity.
double objective_for(int m, int t, const std::vector<double>& flat,
                     const FiberConfig& fiber, const ImpairmentConfig& imp,
                     std::size_t D, std::uint64_t seed, Metric metric);

// 1-D pattern search over the inner-amplitude probability of PS-PM-16QAM.
double optimize_ps(const FiberConfig& fiber, const ImpairmentConfig& imp,
                   std::size_t D, std::uint64_t seed, Metric metric,
                   SearchTrace* trace = nullptr);

} // namespace gss
