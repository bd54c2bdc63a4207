#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gss/airmetrics.hpp"

namespace gss {

using Bits = std::vector<std::uint8_t>;

enum class DecodeStatus { kClean, kCorrected, kDetected };

// (128,119) extended-Hamming-class code with 9 parity bits. The parity-check
// matrix H = [A | I9] uses 128 distinct odd-weight columns, which gives
// d_min >= 4: every single error is correctable and every double error is
// detectable.
class HammingCode {
public:
    static constexpr int n = 128;
    static constexpr int k = 119;
    static constexpr int r = 9;

    HammingCode();

    std::uint16_t column(int pos) const { return columns_[pos]; }

    // systematic: codeword = [info | parity]
    Bits encode(const Bits& info) const;

    struct HdResult {
        Bits info;      // k bits
        Bits codeword;  // n bits after correction attempt
        DecodeStatus status;
    };
    HdResult decode_hd(const Bits& word) const;

    // Chase-I: HD-decode all 2^q flip patterns over the q least-reliable
    // positions, keep the candidate with the smallest soft discrepancy.
    // Positive LLR decides bit 1.
    Bits decode_chase1(const std::vector<double>& llrs, int q) const;

private:
    std::uint16_t syndrome(const Bits& word) const;

    std::array<std::uint16_t, n> columns_;
    std::array<std::int16_t, 1 << r> syndrome_to_pos_; // -1 = not a column
};

// Deterministic seeded bit permutation and its inverse.
Bits interleave(const Bits& bits, std::uint64_t seed);
Bits deinterleave(const Bits& bits, std::uint64_t seed);
std::vector<std::size_t> interleave_permutation(std::size_t n, std::uint64_t seed);

enum class FecMode { kHard, kSoft };

struct FecBerResult {
    double pre_fec_ber = 0.0;
    double post_fec_ber = 0.0;
    bool pass_scc_limit = false; // post-FEC BER below 4.5e-3
    bool low_confidence = false; // too little data for ~100 error events
    std::size_t frames = 0;
    std::size_t info_bits = 0;
};

// Post-FEC BER threshold of the outer staircase code.
constexpr double kSccFecLimit = 4.5e-3;

// Measures post-FEC BER from a link's LLR frame. The frame's transmitted
// bits are arbitrary, so a seeded codeword overlay is applied: LLR signs are
// first referenced to the transmitted bits, interleaved, then re-signed with
// a random encoded stream. Pre-FEC BER is the raw LLR hard-decision BER and
// is unchanged by the overlay.
FecBerResult postfec_ber(const LlrFrame& frame, const HammingCode& code,
                         FecMode mode, int chase_q, std::uint64_t seed);

} // namespace gss
