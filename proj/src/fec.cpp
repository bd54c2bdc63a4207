#include "gss/fec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gss/rng.hpp"

namespace gss {

HammingCode::HammingCode() {
    // info columns: odd-weight 9-bit values in ascending order, excluding
    // the unit vectors which are reserved for the parity identity block
    int filled = 0;
    for (std::uint16_t v = 1; v < (1 << r) && filled < k; ++v) {
        if (std::popcount(v) % 2 == 0) continue;
        if (std::popcount(v) == 1) continue;
        columns_[filled++] = v;
    }
    for (int i = 0; i < r; ++i) columns_[k + i] = static_cast<std::uint16_t>(1u << i);

    syndrome_to_pos_.fill(-1);
    for (int pos = 0; pos < n; ++pos) syndrome_to_pos_[columns_[pos]] = pos;
}

std::uint16_t HammingCode::syndrome(const Bits& word) const {
    std::uint16_t s = 0;
    for (int i = 0; i < n; ++i)
        if (word[i]) s ^= columns_[i];
    return s;
}

Bits HammingCode::encode(const Bits& info) const {
    if (static_cast<int>(info.size()) != k)
        throw std::invalid_argument("encode: expected 119 info bits");
    Bits cw(n, 0);
    std::uint16_t s = 0;
    for (int i = 0; i < k; ++i) {
        cw[i] = info[i];
        if (info[i]) s ^= columns_[i];
    }
    for (int i = 0; i < r; ++i) cw[k + i] = (s >> i) & 1u;
    return cw;
}

HammingCode::HdResult HammingCode::decode_hd(const Bits& word) const {
    if (static_cast<int>(word.size()) != n)
        throw std::invalid_argument("decode_hd: expected 128 bits");
    HdResult res;
    res.codeword = word;
    const std::uint16_t s = syndrome(word);
    if (s == 0) {
        res.status = DecodeStatus::kClean;
    } else {
        const int pos = syndrome_to_pos_[s];
        if (pos >= 0) {
            res.codeword[pos] ^= 1u;
            res.status = DecodeStatus::kCorrected;
        } else {
            res.status = DecodeStatus::kDetected; // even-weight syndrome
        }
    }
    res.info.assign(res.codeword.begin(), res.codeword.begin() + k);
    return res;
}

Bits HammingCode::decode_chase1(const std::vector<double>& llrs, int q) const {
    if (static_cast<int>(llrs.size()) != n)
        throw std::invalid_argument("decode_chase1: expected 128 LLRs");
    if (q < 0) throw std::invalid_argument("decode_chase1: q must be >= 0");

    Bits hard(n);
    for (int i = 0; i < n; ++i) hard[i] = llrs[i] > 0.0 ? 1u : 0u;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::fabs(llrs[a]) < std::fabs(llrs[b]);
    });

    const HdResult fallback = decode_hd(hard);
    Bits best_info = fallback.info;
    double best_metric = std::numeric_limits<double>::infinity();
    bool have_candidate = false;

    Bits test(n);
    for (std::uint32_t pattern = 0; pattern < (1u << q); ++pattern) {
        test = hard;
        for (int b = 0; b < q; ++b)
            if (pattern & (1u << b)) test[order[b]] ^= 1u;
        const HdResult res = decode_hd(test);
        if (res.status == DecodeStatus::kDetected) continue;
        double metric = 0.0;
        for (int i = 0; i < n; ++i)
            if (res.codeword[i] != hard[i]) metric += std::fabs(llrs[i]);
        if (!have_candidate || metric < best_metric) {
            have_candidate = true;
            best_metric = metric;
            best_info = res.info;
        }
    }
    return best_info;
}

std::vector<std::size_t> interleave_permutation(std::size_t num, std::uint64_t seed) {
    std::vector<std::size_t> perm(num);
    std::iota(perm.begin(), perm.end(), 0);
    const CounterRng rng(seed, kStreamInterleaver);
    for (std::size_t i = num; i > 1; --i) {
        const std::size_t j = rng.bits(i) % i;
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

Bits interleave(const Bits& bits, std::uint64_t seed) {
    const auto perm = interleave_permutation(bits.size(), seed);
    Bits out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) out[i] = bits[perm[i]];
    return out;
}

Bits deinterleave(const Bits& bits, std::uint64_t seed) {
    const auto perm = interleave_permutation(bits.size(), seed);
    Bits out(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) out[perm[i]] = bits[i];
    return out;
}

FecBerResult postfec_ber(const LlrFrame& frame, const HammingCode& code,
                         FecMode mode, int chase_q, std::uint64_t seed) {
    const std::size_t total = frame.llrs.size();
    const std::size_t usable = (total / HammingCode::n) * HammingCode::n;
    if (usable == 0)
        throw std::invalid_argument("postfec_ber: fewer than 128 LLRs");

    // reference the LLRs to the transmitted bits: positive = correct decision
    std::vector<double> ref(usable);
    std::size_t raw_errors = 0;
    for (std::size_t i = 0; i < usable; ++i) {
        const double L = frame.llrs[i];
        ref[i] = frame.tx_bits[i] ? L : -L;
        if ((L > 0.0) != (frame.tx_bits[i] != 0)) ++raw_errors;
    }

    const auto perm = interleave_permutation(usable, seed);
    std::vector<double> stream(usable);
    for (std::size_t i = 0; i < usable; ++i) stream[i] = ref[perm[i]];

    const CounterRng info_rng(seed, kStreamInfoBits);
    const std::size_t frames = usable / HammingCode::n;

    std::size_t info_errors = 0;
    Bits info(HammingCode::k);
    std::vector<double> llr(HammingCode::n);
    Bits word(HammingCode::n);
    for (std::size_t f = 0; f < frames; ++f) {
        for (int i = 0; i < HammingCode::k; ++i)
            info[i] = info_rng.bits(f * HammingCode::k + i) & 1u;
        const Bits cw = code.encode(info);
        const double* seg = stream.data() + f * HammingCode::n;
        Bits decoded;
        if (mode == FecMode::kSoft) {
            for (int i = 0; i < HammingCode::n; ++i)
                llr[i] = cw[i] ? seg[i] : -seg[i];
            decoded = code.decode_chase1(llr, chase_q);
        } else {
            for (int i = 0; i < HammingCode::n; ++i)
                word[i] = (cw[i] ? seg[i] : -seg[i]) > 0.0 ? 1u : 0u;
            decoded = code.decode_hd(word).info;
        }
        for (int i = 0; i < HammingCode::k; ++i)
            if (decoded[i] != info[i]) ++info_errors;
    }

    FecBerResult res;
    res.frames = frames;
    res.info_bits = frames * HammingCode::k;
    res.pre_fec_ber = static_cast<double>(raw_errors) / static_cast<double>(usable);
    res.post_fec_ber =
        static_cast<double>(info_errors) / static_cast<double>(res.info_bits);
    res.pass_scc_limit = res.post_fec_ber < kSccFecLimit;
    res.low_confidence =
        static_cast<double>(res.info_bits) * kSccFecLimit < 100.0;
    return res;
}

} // namespace gss
