#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "gss/airmetrics.hpp"
#include "gss/constellation.hpp"
#include "gss/fiberlink.hpp"
#include "oracles.hpp"

using namespace gss;

namespace {

FiberConfig short_cfg() {
    FiberConfig cfg;
    cfg.span_length_km = 160.0;
    cfg.steps_per_span = 200; // enough for unit tests; full runs use 1000
    return cfg;
}

double evm_db(const std::vector<Point4>& ref, const std::vector<Point4>& got) {
    double err = 0.0, sig = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        for (int d = 0; d < 4; ++d) {
            const double e = got[i][d] - ref[i][d];
            err += e * e;
            sig += ref[i][d] * ref[i][d];
        }
    }
    return 10.0 * std::log10(err / sig);
}

} // namespace

TEST_CASE("dbm conversions") {
    CHECK(dbm_to_watt(0.0) == doctest::Approx(1e-3));
    CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0));
    CHECK(watt_to_dbm(dbm_to_watt(-33.5)) == doctest::Approx(-33.5));
}

TEST_CASE("symbol generation") {
    const Constellation c = build_pm16qam();
    const auto idx = generate_symbols(c, 1 << 14, 7);
    CHECK(idx.size() == std::size_t(1) << 14);
    CHECK(generate_symbols(c, 1 << 14, 7) == idx);
    CHECK(generate_symbols(c, 1 << 14, 8) != idx);

    // uniform pmf: each index frequency within 5 sigma of D/256
    std::vector<int> counts(256, 0);
    for (int i : idx) {
        REQUIRE(i >= 0);
        REQUIRE(i < 256);
        ++counts[i];
    }
    const double mean = (1 << 14) / 256.0;
    const double sig = std::sqrt(mean * (1.0 - 1.0 / 256.0));
    for (int cnt : counts) CHECK(std::fabs(cnt - mean) < 5 * sig);

    // shaped pmf: high-probability symbols are drawn preferentially
    Constellation ps = build_ps_pm16qam(0.9);
    const auto sidx = generate_symbols(ps, 1 << 14, 3);
    double mean_pmf = 0.0;
    for (int i : sidx) mean_pmf += ps.pmf[i];
    CHECK(mean_pmf / sidx.size() > 1.5 / 256.0);
}

TEST_CASE("pulse shaping and matched filter are a transparent cascade") {
    const Constellation c = build_pm16qam();
    FiberConfig cfg = short_cfg();
    const auto idx = generate_symbols(c, 4096, 1);
    std::vector<Point4> tx;
    for (int i : idx) tx.push_back(c.points[i]);

    const DualPolWaveform wave = pulse_shape(tx, cfg);
    CHECK(wave.size() == tx.size() * cfg.oversampling);
    CHECK(wave.sample_rate_hz == doctest::Approx(cfg.sample_rate_hz()));

    // zero-stuffing spreads the symbol power over os samples and the root
    // filter halves it again; the matched filter's gain restores unity
    double psym = 0.0;
    for (const auto& p : tx) psym += norm2(p);
    psym /= tx.size();
    const int os = cfg.oversampling;
    CHECK(wave.mean_power() == doctest::Approx(psym / (os * os)).epsilon(0.05));

    const auto rx = matched_filter(wave, cfg);
    REQUIRE(rx.size() == tx.size());
    CHECK(evm_db(tx, rx) < -50.0);
}

TEST_CASE("shaped spectrum is confined") {
    const Constellation c = build_pm16qam();
    FiberConfig cfg = short_cfg();
    const auto idx = generate_symbols(c, 8192, 2);
    std::vector<Point4> tx;
    for (int i : idx) tx.push_back(c.points[i]);
    const DualPolWaveform wave = pulse_shape(tx, cfg);

    // periodogram out-of-band mass below -40 dB of the total
    const std::size_t n = wave.size();
    std::vector<std::complex<double>> spec(n);
    // simple DFT via Goertzel is too slow; use coarse binning with the
    // library-independent radix-2 restriction
    REQUIRE((n & (n - 1)) == 0);
    spec = wave.x_pol;
    // in-place iterative radix-2 FFT (test-local oracle)
    {
        std::size_t j = 0;
        for (std::size_t i = 1; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(spec[i], spec[j]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const double ang = -2.0 * M_PI / double(len);
            const std::complex<double> wl(std::cos(ang), std::sin(ang));
            for (std::size_t i = 0; i < n; i += len) {
                std::complex<double> w(1.0);
                for (std::size_t k = 0; k < len / 2; ++k) {
                    const auto u = spec[i + k];
                    const auto v = spec[i + k + len / 2] * w;
                    spec[i + k] = u + v;
                    spec[i + k + len / 2] = u - v;
                    w *= wl;
                }
            }
        }
    }
    const double fs = cfg.sample_rate_hz();
    const double edge = 0.5 * (1.0 + cfg.rrc_rolloff) * cfg.symbol_rate_hz();
    double inband = 0.0, outband = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = (k < n / 2 ? double(k) : double(k) - double(n)) * fs / double(n);
        const double p = std::norm(spec[k]);
        (std::fabs(f) <= edge * 1.001 ? inband : outband) += p;
    }
    CHECK(10.0 * std::log10(outband / inband) < -40.0);
}

TEST_CASE("linear propagation invariants") {
    const Constellation c = build_pm16qam();
    FiberConfig cfg = short_cfg();
    const auto idx = generate_symbols(c, 2048, 3);
    std::vector<Point4> tx;
    for (int i : idx) tx.push_back(c.points[i]);
    const DualPolWaveform wave = pulse_shape(tx, cfg);

    SUBCASE("lossless dispersion-only fiber conserves power and is invertible") {
        FiberConfig lin = cfg;
        lin.alpha_db_per_km = 0.0;
        lin.gamma_per_w_km = 0.0;
        lin.steps_per_span = 50;
        const double p_dbm = 0.0;
        const DualPolWaveform out = ssfm_propagate(wave, lin, p_dbm);
        CHECK(out.mean_power() == doctest::Approx(dbm_to_watt(p_dbm)).epsilon(1e-6));
        // receiver's CD compensation restores the symbols
        const SymbolRecord rec = receiver_dsp(out, lin, idx, c);
        std::vector<Point4> got = rec.rx;
        CHECK(evm_db(tx, got) < -40.0);
    }

    SUBCASE("loss matches alpha exactly in the linear regime") {
        FiberConfig lossy = cfg;
        lossy.gamma_per_w_km = 0.0;
        lossy.steps_per_span = 50;
        const DualPolWaveform out = ssfm_propagate(wave, lossy, 0.0);
        const double loss_db = 10.0 * std::log10(dbm_to_watt(0.0) / out.mean_power());
        CHECK(loss_db == doctest::Approx(0.2 * 160.0).epsilon(1e-4));
    }

    SUBCASE("nonlinear phase rotation alone conserves power") {
        FiberConfig nl = cfg;
        nl.alpha_db_per_km = 0.0;
        nl.beta2_ps2_per_km = 0.0;
        nl.steps_per_span = 50;
        const DualPolWaveform out = ssfm_propagate(wave, nl, 3.0);
        CHECK(out.mean_power() == doctest::Approx(dbm_to_watt(3.0)).epsilon(1e-6));
    }
}

TEST_CASE("noise calibration") {
    const Constellation c = build_pm16qam();
    FiberConfig cfg = short_cfg();
    const auto idx = generate_symbols(c, std::size_t(1) << 14, 4);
    std::vector<Point4> tx;
    for (int i : idx) tx.push_back(c.points[i]);

    // noise power is measured on the waveform difference so the zero-mean
    // signal/noise cross term cannot bias the estimate
    auto added_power = [](const DualPolWaveform& before, const DualPolWaveform& after) {
        double p = 0.0;
        for (std::size_t i = 0; i < before.size(); ++i) {
            p += std::norm(after.x_pol[i] - before.x_pol[i]);
            p += std::norm(after.y_pol[i] - before.y_pol[i]);
        }
        return p / double(before.size());
    };

    SUBCASE("tx osnr") {
        DualPolWaveform wave = pulse_shape(tx, cfg);
        wave.scale(std::sqrt(dbm_to_watt(3.0) / wave.mean_power()));
        const DualPolWaveform clean = wave;
        const double p_sig = wave.mean_power();
        add_tx_noise(wave, 34.0, 11);
        // in-band noise within the 12.5 GHz reference bandwidth
        const double p_ref = added_power(clean, wave) * 12.5e9 / cfg.sample_rate_hz();
        const double osnr = 10.0 * std::log10(p_sig / p_ref);
        CHECK(osnr == doctest::Approx(34.0).epsilon(0.002));
    }

    SUBCASE("rx noise absolute power") {
        DualPolWaveform wave = pulse_shape(tx, cfg);
        wave.scale(std::sqrt(dbm_to_watt(-20.0) / wave.mean_power()));
        const DualPolWaveform clean = wave;
        const double p_sig = wave.mean_power();
        add_rx_noise(wave, -33.5, cfg.symbol_rate_hz(), 12);
        const double inband =
            added_power(clean, wave) * cfg.symbol_rate_hz() / cfg.sample_rate_hz();
        CHECK(watt_to_dbm(inband) == doctest::Approx(-33.5).epsilon(0.001));

        // -20 dBm signal against -33.5 dBm in-band noise is a 13.5 dB SNR
        CHECK(10.0 * std::log10(p_sig / inband) == doctest::Approx(13.5).epsilon(0.004));
    }
}

TEST_CASE("receiver dsp removes a common phase and gain") {
    const Constellation c = build_pm16qam();
    FiberConfig cfg = short_cfg();
    const auto idx = generate_symbols(c, 2048, 5);
    std::vector<Point4> tx;
    for (int i : idx) tx.push_back(c.points[i]);
    DualPolWaveform wave = pulse_shape(tx, cfg);
    const std::complex<double> rot = std::polar(0.37, 1.1);
    for (auto& s : wave.x_pol) s *= rot;
    for (auto& s : wave.y_pol) s *= rot * std::polar(1.0, -0.4);

    FiberConfig nodisp = cfg;
    nodisp.beta2_ps2_per_km = 0.0;
    const SymbolRecord rec = receiver_dsp(wave, nodisp, idx, c);
    CHECK(evm_db(tx, rec.rx) < -50.0);
    CHECK(rec.tx_index == idx);
}

TEST_CASE("minimum launch power") {
    // 160 km at 0.2 dB/km loses 32 dB; the receiver floor of -20 dBm needs
    // at least +12 dBm launched
    CHECK(min_launch_power_dbm(160.0, -20.0, 0.2) == doctest::Approx(12.0));
    CHECK(min_launch_power_dbm(80.0, -20.0, 0.2) == doctest::Approx(-4.0));
}

TEST_CASE("awgn reference channel matches its target variance") {
    const Constellation c = build_pm16qam();
    const double sigma2 = 0.05;
    const SymbolRecord rec = run_awgn(c, 1 << 15, sigma2, 6);
    const double est = estimate_noise_variance(rec, c);
    CHECK(est == doctest::Approx(sigma2).epsilon(0.02));
    // determinism
    const SymbolRecord rec2 = run_awgn(c, 1 << 15, sigma2, 6);
    CHECK(rec2.rx == rec.rx);
}

TEST_CASE("full link sanity at 160 km") {
    const Constellation c = build_pm16qam();
    FiberConfig cfg;
    cfg.span_length_km = 160.0;
    cfg.steps_per_span = 250;
    ImpairmentConfig imp;
    imp.launch_power_dbm = 12.0;

    const std::size_t D = 1 << 13;
    const LinkResult res = run_link(c, cfg, imp, D, 21);
    REQUIRE(res.record.size() == D);

    // bit-reproducible
    const LinkResult res2 = run_link(c, cfg, imp, D, 21);
    CHECK(res2.record.rx == res.record.rx);
    CHECK(res2.air.rbmd == res.air.rbmd);

    // combined TX + RX noise at 12 dBm launch is close to an AWGN channel at
    // ~13.3 dB SNR; mild nonlinearity only lowers the rate
    const double snr_tx = 34.0 - 10.0 * std::log10(cfg.symbol_rate_hz() / 12.5e9);
    const double snr_rx = 13.5; // -20 dBm input vs -33.5 dBm noise
    const double sigma2 =
        std::pow(10.0, -snr_tx / 10.0) + std::pow(10.0, -snr_rx / 10.0);
    const double mi_awgn = 2.0 * oracle::qam16_mi_2d(sigma2);
    CHECK(res.air.mi < mi_awgn + 0.02);
    CHECK(res.air.mi > mi_awgn - 0.35); // nonlinear penalty is bounded
    CHECK(res.air.rbmd <= res.air.mi + 1e-9);
    CHECK(res.air.rbmd > 5.0);

    // hard-decision BER from the LLRs is consistent with the estimated SNR
    const LlrFrame f = compute_llrs(res.record, c, res.air.sigma2);
    std::size_t errs = 0;
    for (std::size_t i = 0; i < f.llrs.size(); ++i)
        if ((f.llrs[i] > 0) != (f.tx_bits[i] != 0)) ++errs;
    const double ber = double(errs) / double(f.llrs.size());
    const double snr_est_db = -10.0 * std::log10(res.air.sigma2);
    const double ber_pred = analytic_qam_ber(16, snr_est_db - 10.0 * std::log10(4.0));
    CHECK(ber == doctest::Approx(ber_pred).epsilon(0.25));
}

TEST_CASE("higher launch power eventually hurts") {
    const Constellation c = build_pm16qam();
    FiberConfig cfg;
    cfg.span_length_km = 160.0;
    cfg.steps_per_span = 250;
    const std::size_t D = 1 << 12;

    auto rate_at = [&](double p_dbm) {
        ImpairmentConfig imp;
        imp.launch_power_dbm = p_dbm;
        return run_link(c, cfg, imp, D, 33).air.rbmd;
    };
    const double mid = rate_at(13.0);
    const double high = rate_at(19.0);
    CHECK(high < mid); // deep nonlinear regime collapses the rate
}
