#include "gss/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace gss {

namespace {

constexpr double kDupTol = 1e-9; // points closer than this are "equal"

bool points_equal(const Point4& a, const Point4& b) {
    for (int d = 0; d < 4; ++d)
        if (std::fabs(a[d] - b[d]) >= kDupTol) return false;
    return true;
}

int ilog2_exact(int v) {
    if (v < 1 || (v & (v - 1)) != 0) return -1;
    int p = 0;
    while ((1 << p) < v) ++p;
    return p;
}

} // namespace

double Constellation::mean_power() const {
    double e = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) e += pmf[j] * norm2(points[j]);
    return e;
}

void Constellation::normalize_power() {
    const double s = 1.0 / std::sqrt(mean_power());
    for (auto& x : points)
        for (auto& v : x) v *= s;
}

void Constellation::validate() const {
    const std::size_t M = points.size();
    if (m < 1 || M != (std::size_t{1} << m))
        throw std::invalid_argument("constellation: M != 2^m");
    if (labels.size() != M || pmf.size() != M)
        throw std::invalid_argument("constellation: field sizes disagree");

    std::unordered_set<std::uint32_t> seen;
    for (auto l : labels) {
        if (l >> m) throw std::invalid_argument("constellation: label exceeds m bits");
        if (!seen.insert(l).second)
            throw std::invalid_argument("constellation: duplicate label");
    }

    double psum = 0.0;
    for (double p : pmf) {
        if (p < 0.0) throw std::invalid_argument("constellation: negative pmf entry");
        psum += p;
    }
    if (std::fabs(psum - 1.0) > 1e-12)
        throw std::invalid_argument("constellation: pmf does not sum to 1");

    // duplicate-point scan; sort by first coordinate to avoid O(M^2)
    std::vector<std::size_t> order(M);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return points[a][0] < points[b][0]; });
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = i + 1; j < M; ++j) {
            if (points[order[j]][0] - points[order[i]][0] >= kDupTol) break;
            if (points_equal(points[order[i]], points[order[j]]))
                throw std::invalid_argument("constellation: duplicate point");
        }
}

void GssParameters::validate() const {
    if (m < 5) throw std::invalid_argument("gss: m must be >= 5");
    const int p = ilog2_exact(t);
    if (p < 0) throw std::invalid_argument("gss: t must be a power of two");
    const int n1 = 1 << (m - 5);
    if (t > n1) throw std::invalid_argument("gss: t exceeds 2^(m-5)");
    if (static_cast<int>(radii.size()) != t)
        throw std::invalid_argument("gss: radii size != t");
    if (static_cast<int>(angles.size()) != n1)
        throw std::invalid_argument("gss: angles size != 2^(m-5)");
    for (double r : radii)
        if (!(r >= kEps && r <= 1.0))
            throw std::invalid_argument("gss: radius out of [eps, 1]");
    const double hi = M_PI / 2 - kEps;
    for (const auto& a : angles)
        for (double v : {a.theta, a.phi, a.omega})
            if (!(v >= kEps && v <= hi))
                throw std::invalid_argument("gss: angle out of [eps, pi/2 - eps]");
}

std::vector<double> GssParameters::flatten() const {
    std::vector<double> v;
    v.reserve(dof());
    v.insert(v.end(), radii.begin(), radii.end());
    for (const auto& a : angles) {
        v.push_back(a.theta);
        v.push_back(a.phi);
        v.push_back(a.omega);
    }
    return v;
}

GssParameters GssParameters::unflatten(int m, int t, const std::vector<double>& v) {
    GssParameters p;
    p.m = m;
    p.t = t;
    const int n1 = 1 << (m - 5);
    if (static_cast<int>(v.size()) != t + 3 * n1)
        throw std::invalid_argument("gss: flat vector has wrong length");
    p.radii.assign(v.begin(), v.begin() + t);
    p.angles.resize(n1);
    for (int j = 0; j < n1; ++j) {
        p.angles[j] = {v[t + 3 * j], v[t + 3 * j + 1], v[t + 3 * j + 2]};
    }
    return p;
}

LabeledPoints gss_first_orthant(const GssParameters& params) {
    params.validate();
    const int n1 = 1 << (params.m - 5);
    const int p = ilog2_exact(params.t);
    const int point_bits = params.m - 5 - p;
    const int per_shell = n1 / params.t;

    LabeledPoints out;
    out.label_bits = params.m - 5;
    out.points.resize(n1);
    out.labels.resize(n1);

    for (int s = 0; s < params.t; ++s) {
        // angle triples are grouped per shell in parameter order
        std::vector<int> idx(per_shell);
        std::iota(idx.begin(), idx.end(), s * per_shell);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
            return params.angles[a].theta < params.angles[b].theta;
        });
        const double r = params.radii[s];
        for (int rank = 0; rank < per_shell; ++rank) {
            const auto& a = params.angles[idx[rank]];
            const double st = std::sin(a.theta), sp = std::sin(a.phi);
            Point4 x{r * std::cos(a.theta),
                     r * st * std::cos(a.phi),
                     r * st * sp * std::cos(a.omega),
                     r * st * sp * std::sin(a.omega)};
            const std::uint32_t label =
                (static_cast<std::uint32_t>(s) << point_bits) | rank;
            out.points[label] = x;
            out.labels[label] = label;
        }
    }
    return out;
}

LabeledPoints xy_symmetry(const LabeledPoints& in) {
    const std::size_t n = in.points.size();
    LabeledPoints out;
    out.label_bits = in.label_bits + 1;
    out.points.resize(2 * n);
    out.labels.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point4& x = in.points[i];
        for (double v : x)
            if (!(v > 0.0))
                throw std::invalid_argument("xy_symmetry: point not in open first orthant");
        const Point4 sw{x[2], x[3], x[0], x[1]};
        if (points_equal(x, sw))
            throw std::invalid_argument("xy_symmetry: swap-invariant point would duplicate");
        out.points[i] = x;
        out.labels[i] = in.labels[i] << 1;
        out.points[i + n] = sw;
        out.labels[i + n] = (in.labels[i] << 1) | 1u;
    }
    return out;
}

Constellation orthant_symmetry(const LabeledPoints& in, int m) {
    const std::size_t n = in.points.size();
    if (in.label_bits != m - 4 || n != (std::size_t{1} << (m - 4)))
        throw std::invalid_argument("orthant_symmetry: expected 2^(m-4) labeled points");
    for (const auto& x : in.points)
        for (double v : x)
            if (!(v > 0.0))
                throw std::invalid_argument("orthant_symmetry: zero or negative coordinate");

    Constellation c;
    c.m = m;
    const std::size_t M = std::size_t{1} << m;
    c.points.resize(M);
    c.labels.resize(M);
    c.pmf.assign(M, 1.0 / static_cast<double>(M));
    for (int j = 1; j <= 16; ++j) {
        std::uint32_t l[4];
        for (int k = 0; k < 4; ++k) l[k] = ((j - 1) >> k) & 1u;
        for (std::size_t i = 0; i < n; ++i) {
            Point4 x = in.points[i];
            for (int k = 0; k < 4; ++k)
                if (l[k]) x[k] = -x[k];
            const std::size_t row = i + n * (j - 1);
            c.points[row] = x;
            c.labels[row] = (l[0] << (m - 1)) | (l[1] << (m - 2)) |
                            (l[2] << (m - 3)) | (l[3] << (m - 4)) | in.labels[i];
        }
    }
    return c;
}

Constellation build_gss(const GssParameters& params) {
    Constellation c = orthant_symmetry(xy_symmetry(gss_first_orthant(params)), params.m);
    c.normalize_power();
    c.t = params.t;
    c.name = "gss-m" + std::to_string(params.m) + "-t" + std::to_string(params.t);
    c.validate();
    return c;
}

namespace {

// PAM-4 with BRGC: value order -3,-1,+1,+3 maps to (sign, amplitude) bits
// 00, 01, 11, 10.
constexpr double kPamAmp[4] = {-3.0, -1.0, 1.0, 3.0};
constexpr std::uint32_t kPamSign[4] = {0, 0, 1, 1};
constexpr std::uint32_t kPamAmpBit[4] = {0, 1, 1, 0};

Constellation pm16qam_geometry() {
    Constellation c;
    c.m = 8;
    c.points.reserve(256);
    c.labels.reserve(256);
    int a[4];
    for (a[0] = 0; a[0] < 4; ++a[0])
        for (a[1] = 0; a[1] < 4; ++a[1])
            for (a[2] = 0; a[2] < 4; ++a[2])
                for (a[3] = 0; a[3] < 4; ++a[3]) {
                    Point4 x;
                    std::uint32_t label = 0;
                    for (int d = 0; d < 4; ++d) {
                        x[d] = kPamAmp[a[d]];
                        label |= kPamSign[a[d]] << (7 - d);   // b1..b4
                        label |= kPamAmpBit[a[d]] << (3 - d); // b5..b8
                    }
                    c.points.push_back(x);
                    c.labels.push_back(label);
                }
    return c;
}

} // namespace

Constellation build_pm16qam() {
    Constellation c = pm16qam_geometry();
    c.pmf.assign(256, 1.0 / 256.0);
    c.normalize_power();
    c.name = "pm16qam";
    c.validate();
    return c;
}

Constellation build_ps_pm16qam(double p_low) {
    if (!(p_low > 0.0 && p_low < 1.0))
        throw std::invalid_argument("ps_pm16qam: p_low must be in (0,1)");
    Constellation c = pm16qam_geometry();
    c.pmf.resize(256);
    for (std::size_t j = 0; j < 256; ++j) {
        double p = 1.0;
        for (int d = 0; d < 4; ++d)
            p *= (std::fabs(c.points[j][d]) < 2.0 ? p_low : 1.0 - p_low) / 2.0;
        c.pmf[j] = p;
    }
    c.normalize_power();
    c.name = "ps-pm16qam";
    c.validate();
    return c;
}

double papr(const Constellation& c) {
    double peak = 0.0;
    for (const auto& x : c.points) peak = std::max(peak, norm2(x));
    return peak / c.mean_power();
}

int dof_count(int m, int t) {
    if (m < 5) throw std::invalid_argument("dof_count: m must be >= 5");
    const int p = ilog2_exact(t);
    if (p < 0 || t > (1 << (m - 5)))
        throw std::invalid_argument("dof_count: invalid shell count");
    return 3 * (1 << (m - 5)) + t;
}

double xy_power_imbalance(const Constellation& c) {
    double ex = 0.0, ey = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        const auto& x = c.points[j];
        ex += c.pmf[j] * (x[0] * x[0] + x[1] * x[1]);
        ey += c.pmf[j] * (x[2] * x[2] + x[3] * x[3]);
    }
    return std::fabs(ex - ey);
}

std::string serialize(const Constellation& c) {
    std::ostringstream os;
    os << "m=" << c.m << "\n";
    if (c.t > 0)
        os << "t=" << c.t << "\n";
    else
        os << "t=-\n";
    os << "name=" << c.name << "\n";
    char buf[512];
    for (std::size_t j = 0; j < c.size(); ++j) {
        std::string bits;
        for (int k = 1; k <= c.m; ++k) bits += char('0' + c.bit(j, k));
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %s %.17g\n",
                      c.points[j][0], c.points[j][1], c.points[j][2], c.points[j][3],
                      bits.c_str(), c.pmf[j]);
        os << buf;
    }
    return os.str();
}

Constellation deserialize(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    Constellation c;

    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++lineno;
            if (!line.empty()) return true;
        }
        return false;
    };

    if (!next_line() || line.rfind("m=", 0) != 0)
        throw ParseError(lineno ? lineno : 1, "expected m=<int>");
    try {
        c.m = std::stoi(line.substr(2));
    } catch (const std::exception&) {
        throw ParseError(lineno, "bad m value");
    }
    if (c.m < 1 || c.m > 20) throw ParseError(lineno, "m out of range");

    if (!next_line() || line.rfind("t=", 0) != 0)
        throw ParseError(lineno ? lineno : 2, "expected t=<int-or-dash>");
    const std::string tv = line.substr(2);
    if (tv == "-") {
        c.t = -1;
    } else {
        try {
            c.t = std::stoi(tv);
        } catch (const std::exception&) {
            throw ParseError(lineno, "bad t value");
        }
    }

    if (!next_line() || line.rfind("name=", 0) != 0)
        throw ParseError(lineno ? lineno : 3, "expected name=<string>");
    c.name = line.substr(5);

    const std::size_t M = std::size_t{1} << c.m;
    for (std::size_t j = 0; j < M; ++j) {
        if (!next_line()) throw ParseError(lineno + 1, "unexpected end of file");
        std::istringstream ls(line);
        Point4 x;
        std::string bits;
        double p;
        if (!(ls >> x[0] >> x[1] >> x[2] >> x[3] >> bits >> p))
            throw ParseError(lineno, "malformed point line");
        if (static_cast<int>(bits.size()) != c.m)
            throw ParseError(lineno, "label has wrong bit count");
        std::uint32_t label = 0;
        for (char ch : bits) {
            if (ch != '0' && ch != '1') throw ParseError(lineno, "label not binary");
            label = (label << 1) | static_cast<std::uint32_t>(ch - '0');
        }
        c.points.push_back(x);
        c.labels.push_back(label);
        c.pmf.push_back(p);
    }
    if (next_line()) throw ParseError(lineno, "trailing content after point list");

    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(lineno, e.what());
    }
    return c;
}

} // namespace gss
