#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "filters.hpp"
#include "pam.hpp"
#include "rng.hpp"
#include "waveform.hpp"

namespace vnle {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct LinkConfig {
    double symbol_rate = 90e9;
    int pam_order = 6;

    double dac_rate = 120e9;
    double dac_bw = 45e9;
    bool preemphasis = true;
    double preemphasis_max_gain_db = 12.0;

    double driver_bw = 50e9;

    double mzm_bw = 32e9;
    double mzm_vpi = 2.0;       // volts
    double mzm_bias = -0.9;     // volts; -0.45*vpi sits slightly off quadrature
    double vpp = 2.4;           // volts, peak-to-peak drive at the MZM

    double fiber_len_km = 0.0;
    double dispersion_ps_nm_km = 17.0;
    double wavelength_nm = 1550.0;

    bool voa_enable = true;
    double pd_input_power_dbm = 4.0;
    double pd_bw = 50e9;
    double thermal_noise_sigma = 0.14;  // PD-current units, signal-independent

    double adc_rate = 256e9;
    double adc_bw = 113e9;
    int adc_bits = 8;

    // internal oversampled grid for the memoryless nonlinearities; must be a
    // rational multiple of the other rates and an integer multiple of symbol_rate
    double analog_rate = 360e9;

    void validate() const {
        if (symbol_rate <= 0 || dac_rate <= 0 || adc_rate <= 0 || analog_rate <= 0)
            throw std::invalid_argument("link config: rates must be positive");
        if (symbol_rate > dac_rate)
            throw std::invalid_argument("link config: symbol rate above dac rate");
        if (analog_rate < dac_rate || analog_rate < adc_rate)
            throw std::invalid_argument("link config: analog rate below converter rates");
        if (mzm_vpi <= 0) throw std::invalid_argument("link config: vpi must be positive");
        if (vpp < 0) throw std::invalid_argument("link config: vpp must be nonnegative");
        if (adc_bits < 1 || adc_bits > 30)
            throw std::invalid_argument("link config: adc_bits out of range");
        if (thermal_noise_sigma < 0)
            throw std::invalid_argument("link config: negative noise sigma");
        if (pam_order != 4 && pam_order != 6 && pam_order != 8)
            throw std::invalid_argument("link config: unsupported pam order");
    }
};

inline LinkConfig preset(const std::string& name) {
    LinkConfig c;  // defaults above are the 90 GBd PAM6 back-to-back preset
    if (name == "pam6_90g_b2b") {
        return c;
    } else if (name == "pam6_90g_1km") {
        c.fiber_len_km = 1.0;
        return c;
    } else if (name == "pam8_75g_b2b" || name == "pam8_75g_1km") {
        c.symbol_rate = 75e9;
        c.pam_order = 8;
        c.analog_rate = 600e9;  // lcm(75, 120) grid keeps every conversion rational
        c.fiber_len_km = (name == "pam8_75g_1km") ? 1.0 : 0.0;
        return c;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

inline std::vector<std::string> preset_names() {
    return {"pam6_90g_b2b", "pam6_90g_1km", "pam8_75g_b2b", "pam8_75g_1km"};
}

namespace detail {

inline long long lcm_rates(double a, double b) {
    // rates live on a 1 MHz grid
    const long long ia = static_cast<long long>(std::llround(a / 1e6));
    const long long ib = static_cast<long long>(std::llround(b / 1e6));
    if (ia <= 0 || ib <= 0 || std::abs(ia * 1e6 - a) > 0.5 || std::abs(ib * 1e6 - b) > 0.5)
        throw std::invalid_argument("rates must sit on a 1 MHz grid");
    return ia / std::gcd(ia, ib) * ib;
}

}  // namespace detail

// Combined Tx lowpass model (DAC + driver + MZM electrodes); the preemphasis
// inverts this, clipped at the configured gain.
inline std::complex<double> tx_lowpass_response(const LinkConfig& cfg, double f) {
    return bessel4_response(f, cfg.dac_bw) * bessel4_response(f, cfg.driver_bw) *
           bessel4_response(f, cfg.mzm_bw);
}

// Rectangular hold realized on the exact lcm(symbol_rate, dac_rate) grid, then
// band-limited conversion to dac_rate; a literal fractional-phase hold would
// fold part of the signal band onto itself and no equalizer could undo it.
inline RealWaveform dac(const std::vector<double>& symbol_levels, const LinkConfig& cfg) {
    if (cfg.symbol_rate > cfg.dac_rate)
        throw std::invalid_argument("dac: symbol rate above dac rate");
    const long long lcm_mhz = detail::lcm_rates(cfg.symbol_rate, cfg.dac_rate);
    const double hold_rate = static_cast<double>(lcm_mhz) * 1e6;
    const auto hold_factor =
        static_cast<std::size_t>(std::llround(hold_rate / cfg.symbol_rate));

    RealWaveform held;
    held.sample_rate = hold_rate;
    held.samples.resize(symbol_levels.size() * hold_factor);
    for (std::size_t i = 0; i < symbol_levels.size(); ++i)
        std::fill_n(held.samples.begin() + static_cast<std::ptrdiff_t>(i * hold_factor),
                    hold_factor, symbol_levels[i]);

    RealWaveform out = resample(held, cfg.dac_rate).wave;

    const double max_gain = std::pow(10.0, cfg.preemphasis_max_gain_db / 20.0);
    const bool pre = cfg.preemphasis;
    detail::apply_response_padded(out, [&cfg, max_gain, pre](double f) {
        std::complex<double> h = bessel4_response(f, cfg.dac_bw);
        if (pre) {
            std::complex<double> inv = 1.0 / tx_lowpass_response(cfg, f);
            const double g = std::abs(inv);
            if (g > max_gain) inv *= max_gain / g;
            h *= inv;
        }
        return h;
    });
    return out;
}

// E(t) = cos((pi/2) * (v(t) + bias) / vpi); intensity follows cos^2.
// The drive argument must be normalized to unit peak; vpp sets the swing.
inline RealWaveform mzm(const RealWaveform& unit_drive, double vpi, double bias, double vpp) {
    if (vpi <= 0) throw std::invalid_argument("mzm: vpi must be positive");
    RealWaveform field = unit_drive;
    const double half_pi_over_vpi = 0.5 * M_PI / vpi;
    for (auto& s : field.samples) s = std::cos(half_pi_over_vpi * (s * 0.5 * vpp + bias));
    return field;
}

// Chromatic dispersion, all-pass: H(f) = exp(-j pi D lambda^2 f^2 L / c).
// Applied circularly at the exact length so the energy is preserved to
// round-off; L = 0 reduces to an FFT round trip.
inline ComplexWaveform fiber(const ComplexWaveform& field, double len_km,
                             double dispersion_ps_nm_km, double wavelength_nm) {
    ComplexWaveform out = field;
    if (out.samples.empty()) return out;
    const double d_si = dispersion_ps_nm_km * 1e-6;      // s/m/m
    const double lambda = wavelength_nm * 1e-9;          // m
    const double len = len_km * 1e3;                     // m
    const double coeff = -M_PI * d_si * lambda * lambda * len / kSpeedOfLight;
    detail::apply_response_circular(out, [coeff](double f) {
        return std::polar(1.0, coeff * f * f);
    });
    return out;
}

// Scales the field so mean |E|^2 hits the target power (dBm as mW units).
inline ComplexWaveform voa_scale(const ComplexWaveform& field, double target_dbm) {
    ComplexWaveform out = field;
    long double p = 0.0L;
    for (const auto& s : out.samples) p += std::norm(s);
    if (out.samples.empty() || p == 0.0L) return out;
    const double mean_p = static_cast<double>(p / static_cast<long double>(out.samples.size()));
    const double g = std::sqrt(std::pow(10.0, target_dbm / 10.0) / mean_p);
    for (auto& s : out.samples) s *= g;
    return out;
}

// Square-law detection, receiver lowpass, then additive thermal noise of
// fixed sigma (independent of the incident power).
inline RealWaveform photodiode(const ComplexWaveform& field, const LinkConfig& cfg,
                               Rng& noise_rng) {
    RealWaveform cur;
    cur.sample_rate = field.sample_rate;
    cur.t0 = field.t0;
    cur.samples.resize(field.samples.size());
    for (std::size_t i = 0; i < field.samples.size(); ++i)
        cur.samples[i] = std::norm(field.samples[i]);
    lowpass_bessel4(cur, cfg.pd_bw);
    if (cfg.thermal_noise_sigma > 0)
        for (auto& s : cur.samples) s += cfg.thermal_noise_sigma * noise_rng.gaussian();
    return cur;
}

// Uniform mid-rise quantizer: codes -2^(b-1) .. 2^(b-1)-1 over
// [center - half_range, center + half_range); out-of-range samples clamp.
inline void quantize_midrise(std::vector<double>& samples, int bits, double center,
                             double half_range) {
    if (bits < 1 || bits > 30) throw std::invalid_argument("quantizer: bits out of range");
    if (half_range <= 0) return;
    const long long lo = -(1LL << (bits - 1)), hi = (1LL << (bits - 1)) - 1;
    const double delta = 2.0 * half_range / static_cast<double>(1LL << bits);
    for (auto& s : samples) {
        long long code = static_cast<long long>(std::floor((s - center) / delta));
        code = std::clamp(code, lo, hi);
        s = center + delta * (static_cast<double>(code) + 0.5);
    }
}

// Anti-alias lowpass, decimation to the converter rate, then quantization
// auto-ranged to the observed mean +- 3 sigma.
inline RealWaveform adc(const RealWaveform& in, const LinkConfig& cfg) {
    RealWaveform w = in;
    lowpass_bessel4(w, cfg.adc_bw);
    w = resample(w, cfg.adc_rate).wave;
    const double mu = mean(w.samples);
    long double var = 0.0L;
    for (double s : w.samples) var += static_cast<long double>(s - mu) * (s - mu);
    const double sigma =
        w.samples.empty() ? 0.0
                          : std::sqrt(static_cast<double>(var / static_cast<long double>(w.samples.size())));
    quantize_midrise(w.samples, cfg.adc_bits, mu, 3.0 * sigma);
    return w;
}

// Full transmitter -> channel -> receiver-front-end chain of the experiment
// topology; deterministic for a given (symbols, config, seed).
inline RealWaveform run_link(const std::vector<int>& symbols, const LinkConfig& cfg,
                             std::uint64_t seed) {
    cfg.validate();
    const Constellation constellation = Constellation::make(cfg.pam_order);
    const std::vector<double> levels = to_levels(symbols, constellation);

    RealWaveform drive = dac(levels, cfg);
    drive = resample(drive, cfg.analog_rate).wave;
    lowpass_bessel4(drive, cfg.driver_bw);
    lowpass_bessel4(drive, cfg.mzm_bw);

    double peak = 0.0;
    for (double s : drive.samples) peak = std::max(peak, std::abs(s));
    if (peak > 0.0)
        for (auto& s : drive.samples) s /= peak;

    ComplexWaveform field = to_complex(mzm(drive, cfg.mzm_vpi, cfg.mzm_bias, cfg.vpp));
    field = fiber(field, cfg.fiber_len_km, cfg.dispersion_ps_nm_km, cfg.wavelength_nm);
    if (cfg.voa_enable) field = voa_scale(field, cfg.pd_input_power_dbm);

    Rng noise_rng(seed, 0x6e6f6973ULL);  // distinct substream from the symbol source
    RealWaveform cur = photodiode(field, cfg, noise_rng);
    return adc(cur, cfg);
}

}  // namespace vnle
