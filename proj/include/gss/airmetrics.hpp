#pragma once

#include <cstdint>
#include <vector>

#include "gss/constellation.hpp"

namespace gss {

// Transmitted-index / received-vector pairs from one link run.
struct SymbolRecord {
    std::vector<int> tx_index;
    std::vector<Point4> rx;

    std::size_t size() const { return tx_index.size(); }
};

// Per-symbol, per-bit-position LLRs (row-major, D x m) aligned with the
// transmitted bits. Positive LLR means bit 1 is more likely.
struct LlrFrame {
    int m = 0;
    std::vector<double> llrs;
    std::vector<std::uint8_t> tx_bits;

    std::size_t symbols() const { return m ? llrs.size() / m : 0; }
};

struct AirReport {
    double mi = 0.0;            // bits/4D-sym
    double rbmd = 0.0;          // bits/4D-sym
    std::vector<double> bitwise_mi;
    double sigma2 = 0.0;        // estimated total 4D noise variance
    double mi_stderr = 0.0;
    double rbmd_stderr = 0.0;
};

// Data-aided estimate: mean squared 4D error against the known transmitted
// points.
double estimate_noise_variance(const SymbolRecord& rec, const Constellation& c);

// LLRs under the 4D Gaussian auxiliary channel with total variance sigma2,
// log-domain summation, clamped to +-50.
LlrFrame compute_llrs(const SymbolRecord& rec, const Constellation& c, double sigma2);

double estimate_mi(const SymbolRecord& rec, const Constellation& c, double sigma2,
                   double* stderr_out = nullptr);

double estimate_rbmd(const LlrFrame& frame, const std::vector<double>& pmf,
                     double* stderr_out = nullptr);

std::vector<double> bitwise_mi(const LlrFrame& frame);

// Gray-coded square M-QAM bit error probability over AWGN.
double analytic_qam_ber(int M, double ebn0_db);

// Inverse of analytic_qam_ber by bisection, resolved to 1e-4 dB.
double required_ebn0(int M, double target_ber);

// sigma2 estimate plus all Monte-Carlo rate metrics in one pass
AirReport analyze(const SymbolRecord& rec, const Constellation& c);

} // namespace gss
