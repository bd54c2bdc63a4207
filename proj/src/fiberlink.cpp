#include "gss/fiberlink.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "gss/rng.hpp"

namespace gss {

namespace {

// FFTW plan creation is not thread-safe; execution with per-thread plans is.
class Fft {
public:
    static void forward(std::vector<std::complex<double>>& v) { run(v, FFTW_FORWARD); }
    static void inverse(std::vector<std::complex<double>>& v) {
        run(v, FFTW_BACKWARD);
        const double s = 1.0 / static_cast<double>(v.size());
        for (auto& z : v) z *= s;
    }

private:
    static void run(std::vector<std::complex<double>>& v, int sign) {
        thread_local std::map<std::pair<std::size_t, int>, fftw_plan> plans;
        const auto key = std::make_pair(v.size(), sign);
        auto it = plans.find(key);
        if (it == plans.end()) {
            static std::mutex planner_mutex;
            std::lock_guard<std::mutex> lock(planner_mutex);
            std::vector<std::complex<double>> scratch(v.size());
            fftw_plan plan = fftw_plan_dft_1d(
                static_cast<int>(v.size()),
                reinterpret_cast<fftw_complex*>(scratch.data()),
                reinterpret_cast<fftw_complex*>(scratch.data()), sign,
                FFTW_ESTIMATE | FFTW_UNALIGNED);
            it = plans.emplace(key, plan).first;
        }
        fftw_execute_dft(it->second, reinterpret_cast<fftw_complex*>(v.data()),
                         reinterpret_cast<fftw_complex*>(v.data()));
    }
};

// FFT-ordered baseband frequency of bin k
double bin_freq(std::size_t k, std::size_t n, double fs) {
    const double idx = (k <= n / 2) ? static_cast<double>(k)
                                    : static_cast<double>(k) - static_cast<double>(n);
    return idx * fs / static_cast<double>(n);
}

// raised-cosine magnitude response; alias pairs sum to exactly 1
double raised_cosine(double f, double symbol_rate, double rolloff) {
    const double af = std::fabs(f);
    const double f1 = 0.5 * (1.0 - rolloff) * symbol_rate;
    const double f2 = 0.5 * (1.0 + rolloff) * symbol_rate;
    if (af <= f1) return 1.0;
    if (af >= f2) return 0.0;
    return 0.5 * (1.0 + std::cos(M_PI / (rolloff * symbol_rate) * (af - f1)));
}

std::vector<double> rrc_response(std::size_t n, const FiberConfig& cfg) {
    std::vector<double> g(n);
    const double fs = cfg.sample_rate_hz();
    for (std::size_t k = 0; k < n; ++k)
        g[k] = std::sqrt(
            raised_cosine(bin_freq(k, n, fs), cfg.symbol_rate_hz(), cfg.rrc_rolloff));
    return g;
}

void add_awgn_total_power(DualPolWaveform& w, double total_power,
                          std::uint64_t seed, std::uint64_t stream) {
    const CounterRng rng(seed, stream);
    const double s = std::sqrt(total_power / 4.0); // per pol, per quadrature
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n; ++i) {
        double a, b, c, d;
        rng.normal_pair(2 * i, a, b);
        rng.normal_pair(2 * i + 1, c, d);
        w.x_pol[i] += std::complex<double>(s * a, s * b);
        w.y_pol[i] += std::complex<double>(s * c, s * d);
    }
}

} // namespace

double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
double watt_to_dbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }

double DualPolWaveform::mean_power() const {
    double p = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        p += std::norm(x_pol[i]) + std::norm(y_pol[i]);
    return p / static_cast<double>(size());
}

void DualPolWaveform::scale(double factor) {
    for (auto& z : x_pol) z *= factor;
    for (auto& z : y_pol) z *= factor;
}

std::vector<int> generate_symbols(const Constellation& c, std::size_t D,
                                  std::uint64_t seed) {
    if (D == 0) throw std::invalid_argument("generate_symbols: D must be >= 1");
    std::vector<double> cdf(c.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        acc += c.pmf[j];
        cdf[j] = acc;
    }
    cdf.back() = 1.0;

    const CounterRng rng(seed, kStreamSymbols);
    std::vector<int> idx(D);
    for (std::size_t i = 0; i < D; ++i) {
        const double u = rng.uniform(i);
        idx[i] = static_cast<int>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        // lower_bound returns the first cdf entry > u only for strict
        // inequality handling; nudge past exact boundaries
        while (idx[i] + 1 < static_cast<int>(cdf.size()) && cdf[idx[i]] <= u) ++idx[i];
    }
    return idx;
}

DualPolWaveform pulse_shape(const std::vector<Point4>& symbols, const FiberConfig& cfg) {
    const int os = cfg.oversampling;
    if (os < 2) throw std::invalid_argument("pulse_shape: oversampling must be >= 2");
    const std::size_t n = symbols.size() * os;

    DualPolWaveform w;
    w.sample_rate_hz = cfg.sample_rate_hz();
    w.x_pol.assign(n, {0.0, 0.0});
    w.y_pol.assign(n, {0.0, 0.0});
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        w.x_pol[i * os] = {symbols[i][0], symbols[i][1]};
        w.y_pol[i * os] = {symbols[i][2], symbols[i][3]};
    }

    const auto g = rrc_response(n, cfg);
    Fft::forward(w.x_pol);
    Fft::forward(w.y_pol);
    for (std::size_t k = 0; k < n; ++k) {
        w.x_pol[k] *= g[k];
        w.y_pol[k] *= g[k];
    }
    Fft::inverse(w.x_pol);
    Fft::inverse(w.y_pol);
    return w;
}

std::vector<Point4> matched_filter(const DualPolWaveform& wave, const FiberConfig& cfg) {
    const int os = cfg.oversampling;
    const std::size_t n = wave.size();
    DualPolWaveform w = wave;
    const auto g = rrc_response(n, cfg);
    Fft::forward(w.x_pol);
    Fft::forward(w.y_pol);
    for (std::size_t k = 0; k < n; ++k) {
        w.x_pol[k] *= g[k];
        w.y_pol[k] *= g[k];
    }
    Fft::inverse(w.x_pol);
    Fft::inverse(w.y_pol);

    std::vector<Point4> out(n / os);
    const double gain = static_cast<double>(os); // alias sum of the RC cascade
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto zx = w.x_pol[i * os] * gain;
        const auto zy = w.y_pol[i * os] * gain;
        out[i] = {zx.real(), zx.imag(), zy.real(), zy.imag()};
    }
    return out;
}

DualPolWaveform ssfm_propagate(const DualPolWaveform& wave, const FiberConfig& cfg,
                               double launch_power_dbm) {
    if (cfg.steps_per_span < 1)
        throw std::invalid_argument("ssfm: steps_per_span must be >= 1");
    const std::size_t n = wave.size();
    DualPolWaveform w = wave;
    w.scale(std::sqrt(dbm_to_watt(launch_power_dbm) / w.mean_power()));

    const double length_m = cfg.span_length_km * 1e3;
    const double h = length_m / cfg.steps_per_span;
    const double alpha = cfg.alpha_db_per_km * std::log(10.0) / 10.0 / 1e3; // 1/m, power
    const double beta2 = cfg.beta2_ps2_per_km * 1e-27;                      // s^2/m
    const double gamma = cfg.gamma_per_w_km * 1e-3;                         // 1/(W m)
    const double nl_factor = 8.0 / 9.0 * gamma * h;

    std::vector<std::complex<double>> half(n), full(n);
    const double fs = wave.sample_rate_hz;
    for (std::size_t k = 0; k < n; ++k) {
        const double omega = 2.0 * M_PI * bin_freq(k, n, fs);
        const std::complex<double> arg(-alpha / 2.0 * h / 2.0,
                                       beta2 / 2.0 * omega * omega * h / 2.0);
        half[k] = std::exp(arg);
        full[k] = half[k] * half[k];
    }

    Fft::forward(w.x_pol);
    Fft::forward(w.y_pol);
    for (std::size_t k = 0; k < n; ++k) {
        w.x_pol[k] *= half[k];
        w.y_pol[k] *= half[k];
    }
    for (int step = 0; step < cfg.steps_per_span; ++step) {
        Fft::inverse(w.x_pol);
        Fft::inverse(w.y_pol);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = std::norm(w.x_pol[i]) + std::norm(w.y_pol[i]);
            const double phi = nl_factor * p;
            const std::complex<double> rot(std::cos(phi), std::sin(phi));
            w.x_pol[i] *= rot;
            w.y_pol[i] *= rot;
        }
        if (!std::isfinite(std::norm(w.x_pol[0]) + std::norm(w.y_pol[0])))
            throw std::runtime_error("ssfm: non-finite field at step " +
                                     std::to_string(step));
        Fft::forward(w.x_pol);
        Fft::forward(w.y_pol);
        const auto& lin = (step + 1 < cfg.steps_per_span) ? full : half;
        for (std::size_t k = 0; k < n; ++k) {
            w.x_pol[k] *= lin[k];
            w.y_pol[k] *= lin[k];
        }
    }
    Fft::inverse(w.x_pol);
    Fft::inverse(w.y_pol);
    return w;
}

void add_tx_noise(DualPolWaveform& wave, double tx_osnr_db, std::uint64_t seed) {
    const double ref_bw = 12.5e9; // 0.1 nm at 1550 nm
    const double osnr = std::pow(10.0, tx_osnr_db / 10.0);
    const double p_sig = wave.mean_power();
    const double p_noise = p_sig / osnr * (wave.sample_rate_hz / ref_bw);
    add_awgn_total_power(wave, p_noise, seed, kStreamTxNoise);
}

void add_rx_noise(DualPolWaveform& wave, double rx_noise_power_dbm,
                  double symbol_rate_hz, std::uint64_t seed) {
    // fixed absolute power in the symbol-rate bandwidth -> flat PSD over the
    // simulation band; the matched filter recovers exactly the quoted power
    const double p_inband = dbm_to_watt(rx_noise_power_dbm);
    const double p_total = p_inband * (wave.sample_rate_hz / symbol_rate_hz);
    add_awgn_total_power(wave, p_total, seed, kStreamRxNoise);
}

SymbolRecord receiver_dsp(const DualPolWaveform& wave, const FiberConfig& cfg,
                          const std::vector<int>& tx_index, const Constellation& c) {
    const std::size_t n = wave.size();
    DualPolWaveform w = wave;

    // exact chromatic dispersion inversion
    const double beta2 = cfg.beta2_ps2_per_km * 1e-27;
    const double length_m = cfg.span_length_km * 1e3;
    Fft::forward(w.x_pol);
    Fft::forward(w.y_pol);
    for (std::size_t k = 0; k < n; ++k) {
        const double omega = 2.0 * M_PI * bin_freq(k, n, wave.sample_rate_hz);
        const std::complex<double> inv =
            std::exp(std::complex<double>(0.0, -beta2 / 2.0 * omega * omega * length_m));
        w.x_pol[k] *= inv;
        w.y_pol[k] *= inv;
    }
    Fft::inverse(w.x_pol);
    Fft::inverse(w.y_pol);

    std::vector<Point4> rx = matched_filter(w, cfg);
    if (rx.size() != tx_index.size())
        throw std::runtime_error("receiver_dsp: sample count mismatch");

    // least-squares complex gain per polarization against the known symbols
    std::complex<double> num_x{0, 0}, num_y{0, 0};
    double den_x = 0.0, den_y = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        const Point4& s = c.points[tx_index[i]];
        const std::complex<double> sx(s[0], s[1]), sy(s[2], s[3]);
        const std::complex<double> rxc(rx[i][0], rx[i][1]), ryc(rx[i][2], rx[i][3]);
        num_x += std::conj(sx) * rxc;
        num_y += std::conj(sy) * ryc;
        den_x += std::norm(sx);
        den_y += std::norm(sy);
    }
    const std::complex<double> ax = num_x / den_x;
    const std::complex<double> ay = num_y / den_y;
    if (std::abs(ax) < 1e-12 || std::abs(ay) < 1e-12)
        throw std::runtime_error("receiver_dsp: alignment failure (zero gain)");

    SymbolRecord rec;
    const std::size_t cut = std::min(cfg.edge_discard, rx.size() / 2);
    const std::size_t lo = cut, hi = rx.size() - cut;
    rec.tx_index.assign(tx_index.begin() + lo, tx_index.begin() + hi);
    rec.rx.reserve(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) {
        const std::complex<double> zx = std::complex<double>(rx[i][0], rx[i][1]) / ax;
        const std::complex<double> zy = std::complex<double>(rx[i][2], rx[i][3]) / ay;
        rec.rx.push_back({zx.real(), zx.imag(), zy.real(), zy.imag()});
    }
    return rec;
}

double min_launch_power_dbm(double span_length_km, double rx_min_input_dbm,
                            double alpha_db_per_km) {
    if (span_length_km < 0.0)
        throw std::invalid_argument("min_launch_power: negative length");
    return rx_min_input_dbm + alpha_db_per_km * span_length_km;
}

namespace {

// fraction of waveform power outside the (1+rolloff)/2 signal band, in dB
double out_of_band_db(const DualPolWaveform& wave, const FiberConfig& cfg) {
    DualPolWaveform w = wave;
    Fft::forward(w.x_pol);
    Fft::forward(w.y_pol);
    const double edge = 0.5 * (1.0 + cfg.rrc_rolloff) * cfg.symbol_rate_hz();
    double in = 0.0, out = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double p = std::norm(w.x_pol[k]) + std::norm(w.y_pol[k]);
        if (std::fabs(bin_freq(k, w.size(), w.sample_rate_hz)) > edge)
            out += p;
        else
            in += p;
    }
    if (out == 0.0) return -400.0;
    return 10.0 * std::log10(out / in);
}

LinkResult run_chain(const Constellation& c, const FiberConfig& cfg,
                     const ImpairmentConfig& imp, const std::vector<int>& tx_index,
                     std::uint64_t seed, double* oob_db) {
    std::vector<Point4> symbols(tx_index.size());
    for (std::size_t i = 0; i < tx_index.size(); ++i)
        symbols[i] = c.points[tx_index[i]];

    DualPolWaveform w = pulse_shape(symbols, cfg);
    if (imp.tx_noise_enabled) add_tx_noise(w, imp.tx_osnr_db, seed);
    w = ssfm_propagate(w, cfg, imp.launch_power_dbm);
    if (oob_db) *oob_db = out_of_band_db(w, cfg);
    if (imp.rx_noise_enabled)
        add_rx_noise(w, imp.rx_noise_power_dbm, cfg.symbol_rate_hz(), seed);

    LinkResult res;
    res.record = receiver_dsp(w, cfg, tx_index, c);
    res.air = analyze(res.record, c);
    res.oversampling_used = cfg.oversampling;
    return res;
}

} // namespace

LinkResult run_link_indices(const Constellation& c, const FiberConfig& fiber,
                            const ImpairmentConfig& imp, const std::vector<int>& tx_index,
                            std::uint64_t seed) {
    double oob = -400.0;
    LinkResult res = run_chain(c, fiber, imp, tx_index, seed, &oob);
    if (oob > -30.0 && fiber.oversampling < 4) {
        FiberConfig dense = fiber;
        dense.oversampling = 4;
        res = run_chain(c, dense, imp, tx_index, seed, nullptr);
    }
    return res;
}

LinkResult run_link(const Constellation& c, const FiberConfig& fiber,
                    const ImpairmentConfig& imp, std::size_t D, std::uint64_t seed) {
    return run_link_indices(c, fiber, imp, generate_symbols(c, D, seed), seed);
}

SymbolRecord run_awgn(const Constellation& c, std::size_t D, double sigma2_4d,
                      std::uint64_t seed) {
    if (!(sigma2_4d >= 0.0)) throw std::invalid_argument("run_awgn: bad variance");
    SymbolRecord rec;
    rec.tx_index = generate_symbols(c, D, seed);
    rec.rx.resize(D);
    const CounterRng rng(seed, kStreamAwgn);
    const double s = std::sqrt(sigma2_4d / 4.0);
    for (std::size_t i = 0; i < D; ++i) {
        double n0, n1, n2, n3;
        rng.normal_pair(2 * i, n0, n1);
        rng.normal_pair(2 * i + 1, n2, n3);
        const Point4& x = c.points[rec.tx_index[i]];
        rec.rx[i] = {x[0] + s * n0, x[1] + s * n1, x[2] + s * n2, x[3] + s * n3};
    }
    return rec;
}

} // namespace gss
