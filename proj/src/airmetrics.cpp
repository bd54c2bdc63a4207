#include "gss/airmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gss {

namespace {

constexpr double kLlrClamp = 50.0;
const double kLn2 = std::log(2.0);

// log2(1 + exp(t)) without overflow
double log2_1p_exp(double t) {
    if (t > 0.0) return (t + std::log1p(std::exp(-t))) / kLn2;
    return std::log1p(std::exp(t)) / kLn2;
}

// per-symbol Gaussian log-likelihoods, constant terms dropped
void symbol_logliks(const Point4& y, const Constellation& c, double sigma2,
                    std::vector<double>& ll) {
    const double inv = 2.0 / sigma2; // 1 / (sigma2/2)
    const std::size_t M = c.size();
    for (std::size_t j = 0; j < M; ++j) {
        const Point4& x = c.points[j];
        const double d0 = y[0] - x[0], d1 = y[1] - x[1];
        const double d2 = y[2] - x[2], d3 = y[3] - x[3];
        ll[j] = -(d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3) * inv;
    }
}

bool is_uniform(const std::vector<double>& pmf) {
    for (double p : pmf)
        if (p != pmf[0]) return false;
    return true;
}

double entropy_bits(const std::vector<double>& pmf) {
    double h = 0.0;
    for (double p : pmf)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

} // namespace

double estimate_noise_variance(const SymbolRecord& rec, const Constellation& c) {
    const std::size_t D = rec.size();
    if (D == 0) throw std::invalid_argument("estimate_noise_variance: empty record");
    double acc = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
        const Point4& x = c.points[rec.tx_index[i]];
        const Point4& y = rec.rx[i];
        for (int d = 0; d < 4; ++d) {
            const double e = y[d] - x[d];
            acc += e * e;
        }
    }
    return acc / static_cast<double>(D);
}

LlrFrame compute_llrs(const SymbolRecord& rec, const Constellation& c, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("compute_llrs: sigma2 must be > 0");
    const std::size_t D = rec.size();
    const std::size_t M = c.size();
    const int m = c.m;
    const bool uniform = is_uniform(c.pmf);

    std::vector<double> logp;
    if (!uniform) {
        logp.resize(M);
        for (std::size_t j = 0; j < M; ++j)
            logp[j] = c.pmf[j] > 0.0 ? std::log(c.pmf[j])
                                     : -std::numeric_limits<double>::infinity();
    }

    LlrFrame frame;
    frame.m = m;
    frame.llrs.resize(D * m);
    frame.tx_bits.resize(D * m);

    std::vector<double> ll(M);
    std::vector<double> mx(2 * m), sum(2 * m);
    for (std::size_t i = 0; i < D; ++i) {
        symbol_logliks(rec.rx[i], c, sigma2, ll);
        if (!uniform)
            for (std::size_t j = 0; j < M; ++j) ll[j] += logp[j];

        std::fill(mx.begin(), mx.end(), -std::numeric_limits<double>::infinity());
        for (std::size_t j = 0; j < M; ++j) {
            const std::uint32_t lab = c.labels[j];
            for (int k = 0; k < m; ++k) {
                const int b = (lab >> (m - 1 - k)) & 1u;
                double& cur = mx[2 * k + b];
                if (ll[j] > cur) cur = ll[j];
            }
        }
        std::fill(sum.begin(), sum.end(), 0.0);
        for (std::size_t j = 0; j < M; ++j) {
            const std::uint32_t lab = c.labels[j];
            for (int k = 0; k < m; ++k) {
                const int b = (lab >> (m - 1 - k)) & 1u;
                sum[2 * k + b] += std::exp(ll[j] - mx[2 * k + b]);
            }
        }
        const std::uint32_t txlab = c.labels[rec.tx_index[i]];
        for (int k = 0; k < m; ++k) {
            const double a1 = mx[2 * k + 1] + std::log(sum[2 * k + 1]);
            const double a0 = mx[2 * k + 0] + std::log(sum[2 * k + 0]);
            frame.llrs[i * m + k] = std::clamp(a1 - a0, -kLlrClamp, kLlrClamp);
            frame.tx_bits[i * m + k] =
                static_cast<std::uint8_t>((txlab >> (m - 1 - k)) & 1u);
        }
    }
    return frame;
}

double estimate_mi(const SymbolRecord& rec, const Constellation& c, double sigma2,
                   double* stderr_out) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("estimate_mi: sigma2 must be > 0");
    const std::size_t D = rec.size();
    if (D == 0) throw std::invalid_argument("estimate_mi: empty record");
    const std::size_t M = c.size();

    std::vector<double> logp(M);
    for (std::size_t j = 0; j < M; ++j)
        logp[j] = c.pmf[j] > 0.0 ? std::log(c.pmf[j])
                                 : -std::numeric_limits<double>::infinity();

    std::vector<double> ll(M);
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
        symbol_logliks(rec.rx[i], c, sigma2, ll);
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < M; ++j) mx = std::max(mx, logp[j] + ll[j]);
        double s = 0.0;
        for (std::size_t j = 0; j < M; ++j) s += std::exp(logp[j] + ll[j] - mx);
        const double den = mx + std::log(s);
        const double term = (ll[rec.tx_index[i]] - den) / kLn2;
        acc += term;
        acc2 += term * term;
    }
    const double mean = acc / static_cast<double>(D);
    if (stderr_out) {
        const double var = std::max(0.0, acc2 / static_cast<double>(D) - mean * mean);
        *stderr_out = std::sqrt(var / static_cast<double>(D));
    }
    return mean;
}

namespace {

// per-bit-position sums of log2(1 + e^{(-1)^c L}); shared accumulation so
// rbmd and the bit-wise decomposition agree bit-exactly
void bit_penalties(const LlrFrame& frame, std::vector<double>& per_bit,
                   double* stderr_out) {
    const std::size_t D = frame.symbols();
    const int m = frame.m;
    per_bit.assign(m, 0.0);
    double acc = 0.0, acc2 = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
        double row = 0.0;
        for (int k = 0; k < m; ++k) {
            const double L = frame.llrs[i * m + k];
            const double t = frame.tx_bits[i * m + k] ? -L : L;
            const double v = log2_1p_exp(t);
            per_bit[k] += v;
            row += v;
        }
        acc += row;
        acc2 += row * row;
    }
    if (stderr_out) {
        const double mean = acc / static_cast<double>(D);
        const double var = std::max(0.0, acc2 / static_cast<double>(D) - mean * mean);
        *stderr_out = std::sqrt(var / static_cast<double>(D));
    }
}

} // namespace

double estimate_rbmd(const LlrFrame& frame, const std::vector<double>& pmf,
                     double* stderr_out) {
    const std::size_t D = frame.symbols();
    if (D == 0) throw std::invalid_argument("estimate_rbmd: empty frame");
    std::vector<double> per_bit;
    bit_penalties(frame, per_bit, stderr_out);
    if (is_uniform(pmf)) {
        // summed from the bit-wise terms so that sum(bitwise_mi) == rbmd
        double r = 0.0;
        for (int k = 0; k < frame.m; ++k)
            r += 1.0 - per_bit[k] / static_cast<double>(D);
        return r;
    }
    double pen = 0.0;
    for (int k = 0; k < frame.m; ++k) pen += per_bit[k] / static_cast<double>(D);
    return entropy_bits(pmf) - pen;
}

std::vector<double> bitwise_mi(const LlrFrame& frame) {
    const std::size_t D = frame.symbols();
    if (D == 0) throw std::invalid_argument("bitwise_mi: empty frame");
    std::vector<double> per_bit;
    bit_penalties(frame, per_bit, nullptr);
    std::vector<double> out(frame.m);
    for (int k = 0; k < frame.m; ++k)
        out[k] = 1.0 - per_bit[k] / static_cast<double>(D);
    return out;
}

double analytic_qam_ber(int M, double ebn0_db) {
    const int sqrtM = static_cast<int>(std::lround(std::sqrt(double(M))));
    if (sqrtM * sqrtM != M || sqrtM < 2 || (sqrtM & (sqrtM - 1)) != 0)
        throw std::invalid_argument("analytic_qam_ber: M must be a square power of 4");
    const int m = static_cast<int>(std::lround(std::log2(double(M))));
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    double pe = 0.0;
    for (int i = 1; i <= sqrtM / 2; ++i) {
        const double arg = (2 * i - 1) * std::sqrt(3.0 * ebn0 * m / (M - 1));
        pe += 0.5 * std::erfc(arg / std::sqrt(2.0)); // Q(arg)
    }
    return 4.0 / m * (1.0 - 1.0 / sqrtM) * pe;
}

double required_ebn0(int M, double target_ber) {
    if (!(target_ber > 0.0 && target_ber < 0.5))
        throw std::invalid_argument("required_ebn0: target must be in (0, 0.5)");
    double lo = -10.0, hi = 40.0;
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (analytic_qam_ber(M, mid) > target_ber)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

AirReport analyze(const SymbolRecord& rec, const Constellation& c) {
    AirReport rep;
    rep.sigma2 = estimate_noise_variance(rec, c);
    const double s2 = std::max(rep.sigma2, 1e-30); // exact pass-through records
    rep.mi = estimate_mi(rec, c, s2, &rep.mi_stderr);
    const LlrFrame frame = compute_llrs(rec, c, s2);
    rep.rbmd = estimate_rbmd(frame, c.pmf, &rep.rbmd_stderr);
    rep.bitwise_mi = bitwise_mi(frame);
    return rep;
}

} // namespace gss
