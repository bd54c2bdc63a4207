#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gss {

using Point4 = std::array<double, 4>;

inline double norm2(const Point4& x) {
    return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
}

// 4D constellation: M = 2^m power-normalized points, each with a distinct
// m-bit label and a symbol probability. Immutable after construction.
struct Constellation {
    std::vector<Point4> points;
    std::vector<std::uint32_t> labels; // bit b1 is the MSB of the m-bit word
    std::vector<double> pmf;
    int m = 0;
    int t = -1; // shell count when built as GSS, -1 otherwise
    std::string name;

    std::size_t size() const { return points.size(); }

    // bit at position k, 1-based (b1..bm)
    int bit(std::size_t i, int k) const {
        return static_cast<int>((labels[i] >> (m - k)) & 1u);
    }

    double mean_power() const; // sum_j pmf_j * ||x_j||^2
    void normalize_power();

    // Checks cardinality, label/point distinctness and pmf normalization.
    // Throws std::invalid_argument on the first violation.
    void validate() const;
};

// Decision vector of the shell-shaped construction: t shell radii plus one
// spherical-angle triple per first-orthant point.
struct GssParameters {
    struct Angles {
        double theta, phi, omega;
    };

    int m = 8;
    int t = 4;
    std::vector<double> radii;   // length t, each in [kEps, 1]
    std::vector<Angles> angles;  // length 2^(m-5), each in [kEps, pi/2 - kEps]

    // Boundary clamp keeping every first-orthant coordinate strictly
    // positive, so mirroring cannot collapse points.
    static constexpr double kEps = 1e-3;

    std::size_t dof() const { return radii.size() + 3 * angles.size(); }
    void validate() const;

    // layout: radii, then (theta, phi, omega) per point
    std::vector<double> flatten() const;
    static GssParameters unflatten(int m, int t, const std::vector<double>& v);
};

// Intermediate labeled point set used while composing the symmetry
// operations; labels carry `label_bits` significant bits.
struct LabeledPoints {
    std::vector<Point4> points;
    std::vector<std::uint32_t> labels;
    int label_bits = 0;
};

// First-orthant points from spherical coordinates. Output index equals the
// inner label: the leading p = log2(t) bits select the shell, the remaining
// bits enumerate points on a shell in order of increasing theta.
LabeledPoints gss_first_orthant(const GssParameters& params);

// Doubles the set by swapping the two polarizations' coordinates; appends
// one label bit (0 original, 1 swapped).
LabeledPoints xy_symmetry(const LabeledPoints& in);

// Mirrors into all 16 orthants; the four sign bits become b1..b4 so that
// adjacent orthants are Gray-labeled. Output is unnormalized, uniform pmf.
Constellation orthant_symmetry(const LabeledPoints& in, int m);

// first orthant -> X-Y symmetry -> orthant symmetry -> unit mean power
Constellation build_gss(const GssParameters& params);

// PM-16QAM = {+-1,+-3}^4 with per-dimension Gray PAM-4 labels, reordered so
// the four sign bits occupy b1..b4.
Constellation build_pm16qam();

// PM-16QAM geometry with an ideal per-dimension amplitude shaper:
// p_low is the probability of the inner (+-1) amplitude in each dimension.
Constellation build_ps_pm16qam(double p_low);

// max_j ||x_j||^2 / sum_j pmf_j ||x_j||^2
double papr(const Constellation& c);

// Free-parameter count of the shell-shaped family: 3*2^(m-5) + t.
int dof_count(int m, int t);

// |E||(x1,x2)||^2 - E||(x3,x4)||^2| under the pmf
double xy_power_imbalance(const Constellation& c);

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg),
          line(line_) {}
};

std::string serialize(const Constellation& c);
Constellation deserialize(const std::string& text);

} // namespace gss
