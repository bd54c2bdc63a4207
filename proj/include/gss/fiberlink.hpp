#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "gss/airmetrics.hpp"
#include "gss/constellation.hpp"

namespace gss {

struct FiberConfig {
    double alpha_db_per_km = 0.2;
    double beta2_ps2_per_km = -21.68;
    double gamma_per_w_km = 1.20;
    double span_length_km = 160.0;
    int steps_per_span = 1000;
    double symbol_rate_gbaud = 59.84;
    int oversampling = 2;            // samples per symbol for propagation
    double rrc_rolloff = 0.05;
    std::size_t edge_discard = 0;    // symbols dropped at each end of a record

    double symbol_rate_hz() const { return symbol_rate_gbaud * 1e9; }
    double sample_rate_hz() const { return symbol_rate_hz() * oversampling; }
};

struct ImpairmentConfig {
    double tx_osnr_db = 34.0;          // in-band, 0.1 nm reference
    double rx_min_input_dbm = -20.0;
    double rx_noise_power_dbm = -33.5; // absolute, symbol-rate bandwidth
    double launch_power_dbm = 10.0;
    bool tx_noise_enabled = true;
    bool rx_noise_enabled = true;
};

struct DualPolWaveform {
    std::vector<std::complex<double>> x_pol;
    std::vector<std::complex<double>> y_pol;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return x_pol.size(); }
    // mean |Ex|^2 + |Ey|^2 per sample (W when the waveform is in absolute units)
    double mean_power() const;
    void scale(double factor);
};

// i.i.d. symbol indices from the constellation pmf; counter-based, so the
// same (seed, D, pmf) always yields the same sequence.
std::vector<int> generate_symbols(const Constellation& c, std::size_t D,
                                  std::uint64_t seed);

// Root-raised-cosine shaping via exact frequency-domain filtering (circular,
// so the matched cascade is ISI-free with no edge transients).
DualPolWaveform pulse_shape(const std::vector<Point4>& symbols, const FiberConfig& cfg);

// Matched filter plus downsampling back to one 4D symbol per baud.
std::vector<Point4> matched_filter(const DualPolWaveform& wave, const FiberConfig& cfg);

// Scales to the launch power and integrates the Manakov equation with
// symmetric split steps: dispersion/loss in frequency domain, 8/9-weighted
// Kerr phase rotation in time domain.
DualPolWaveform ssfm_propagate(const DualPolWaveform& wave, const FiberConfig& cfg,
                               double launch_power_dbm);

// AWGN loading such that the in-band OSNR (12.5 GHz reference) equals the
// configured value.
void add_tx_noise(DualPolWaveform& wave, double tx_osnr_db, std::uint64_t seed);

// White noise of fixed absolute power (dBm, referenced to the symbol-rate
// bandwidth) added after the fiber.
void add_rx_noise(DualPolWaveform& wave, double rx_noise_power_dbm, double symbol_rate_hz,
                  std::uint64_t seed);

// Chromatic dispersion compensation, matched filter, downsampling and a
// data-aided complex scale/phase correction per polarization.
SymbolRecord receiver_dsp(const DualPolWaveform& wave, const FiberConfig& cfg,
                          const std::vector<int>& tx_index, const Constellation& c);

// Smallest launch power that still meets the receiver input requirement.
double min_launch_power_dbm(double span_length_km, double rx_min_input_dbm,
                            double alpha_db_per_km);

struct LinkResult {
    SymbolRecord record;
    AirReport air;
    int oversampling_used = 0;
};

// Full chain: generate -> shape -> TX noise -> SSFM -> RX noise -> DSP ->
// metrics. Re-runs at 4 samples/symbol if nonlinear broadening leaks more
// than -30 dB of power out of band.
LinkResult run_link(const Constellation& c, const FiberConfig& fiber,
                    const ImpairmentConfig& imp, std::size_t D, std::uint64_t seed);

// Same chain driven by caller-provided symbol indices.
LinkResult run_link_indices(const Constellation& c, const FiberConfig& fiber,
                            const ImpairmentConfig& imp, const std::vector<int>& tx_index,
                            std::uint64_t seed);

// Fiber-bypassed reference: symbols plus 4D AWGN of total variance sigma2.
SymbolRecord run_awgn(const Constellation& c, std::size_t D, double sigma2_4d,
                      std::uint64_t seed);

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

} // namespace gss
