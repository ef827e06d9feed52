#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "fft.hpp"
#include "waveform.hpp"

namespace vnle {

// 4th-order Bessel lowpass, prototype B4(s) = s^4 + 10s^3 + 45s^2 + 105s + 105
// (unit delay normalization). The -3 dB point of that prototype sits at
// w = 2.113917674904148, so frequencies are scaled by it to place f3db.
inline constexpr double kBessel4ScaleW3db = 2.113917674904148;

inline std::complex<double> bessel4_response(double f, double f3db) {
    if (f3db <= 0.0) throw std::invalid_argument("bessel4: cutoff must be positive");
    const std::complex<double> s(0.0, kBessel4ScaleW3db * f / f3db);
    const std::complex<double> b4 = (((s + 10.0) * s + 45.0) * s + 105.0) * s + 105.0;
    return 105.0 / b4;
}

namespace detail {

// Exact-length circular application; unitary when |H| = 1.
template <typename WaveT, typename ResponseFn>
void apply_response_circular(WaveT& w, ResponseFn&& h) {
    const std::size_t n = w.samples.size();
    if (n == 0) return;
    std::vector<std::complex<double>> buf(w.samples.begin(), w.samples.end());
    fft_inplace(buf, false);
    for (std::size_t k = 0; k < n; ++k) buf[k] *= h(bin_frequency(k, n, w.sample_rate));
    fft_inplace(buf, true);
    if constexpr (std::is_same_v<typename decltype(w.samples)::value_type, double>) {
        for (std::size_t k = 0; k < n; ++k) w.samples[k] = buf[k].real();
    } else {
        for (std::size_t k = 0; k < n; ++k) w.samples[k] = buf[k];
    }
}

// Zero-pads to a 5-smooth size for FFT speed, then trims. Short impulse
// responses wrap negligibly; downstream counting excludes waveform edges.
template <typename WaveT, typename ResponseFn>
void apply_response_padded(WaveT& w, ResponseFn&& h) {
    const std::size_t n = w.samples.size();
    if (n == 0) return;
    const std::size_t np = next_fast_size(n);
    std::vector<std::complex<double>> buf(np);
    std::copy(w.samples.begin(), w.samples.end(), buf.begin());
    fft_inplace(buf, false);
    for (std::size_t k = 0; k < np; ++k) buf[k] *= h(bin_frequency(k, np, w.sample_rate));
    fft_inplace(buf, true);
    if constexpr (std::is_same_v<typename decltype(w.samples)::value_type, double>) {
        for (std::size_t k = 0; k < n; ++k) w.samples[k] = buf[k].real();
    } else {
        for (std::size_t k = 0; k < n; ++k) w.samples[k] = buf[k];
    }
}

}  // namespace detail

template <typename T>
inline void lowpass_bessel4(Waveform<T>& w, double f3db) {
    detail::apply_response_padded(w, [f3db](double f) { return bessel4_response(f, f3db); });
}

// ---- rational resampling --------------------------------------------------

struct Rational {
    long long num = 0, den = 1;
};

// continued-fraction approximation; exact for ratios of MHz-grid rates
inline Rational approximate_ratio(double x, long long max_den = 1 << 20) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("ratio must be positive");
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        const double fl = std::floor(v);
        const long long a = static_cast<long long>(fl);
        const long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) <= 1e-12 * x) break;
        const double frac = v - fl;
        if (frac < 1e-15) break;
        v = 1.0 / frac;
    }
    if (q1 == 0 || std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) > 1e-9 * x)
        throw std::invalid_argument("ratio has no exact small rational form");
    return {p1, q1};
}

struct ResampleResult {
    RealWaveform wave;
    bool alias_warning = false;       // input band exceeded the new Nyquist
    double dropped_energy_fraction = 0.0;
};

namespace detail {

// Input is zero-padded to a multiple of Q (grown to a 5-smooth size when
// possible) so the input and output DFT bin spacings coincide exactly;
// without that the output is time-stretched by the length rounding.
inline std::size_t padded_input_size(std::size_t n, long long q) {
    std::size_t k = (n + static_cast<std::size_t>(q) - 1) / static_cast<std::size_t>(q);
    const std::size_t k_limit = 3 * k + 16;
    std::size_t k_fast = k;
    while (k_fast < k_limit && !is_fast_size(k_fast * static_cast<std::size_t>(q))) ++k_fast;
    return (k_fast < k_limit ? k_fast : k) * static_cast<std::size_t>(q);
}

}  // namespace detail

// FFT-based band-limited rate conversion. Tone frequencies are preserved
// exactly because both transforms share the same bin spacing.
inline ResampleResult resample(const RealWaveform& in, double out_rate) {
    if (in.sample_rate <= 0.0) throw std::invalid_argument("resample: input rate unset");
    if (out_rate <= 0.0) throw std::invalid_argument("resample: output rate must be positive");
    ResampleResult res;
    if (out_rate == in.sample_rate) {
        res.wave = in;
        return res;
    }
    const Rational pq = approximate_ratio(out_rate / in.sample_rate);
    const long long p = pq.num, q = pq.den;
    const std::size_t n = in.samples.size();
    if (n == 0) {
        res.wave.sample_rate = out_rate;
        res.wave.t0 = in.t0;
        return res;
    }
    const std::size_t np = detail::padded_input_size(n, q);
    const std::size_t mp = np / static_cast<std::size_t>(q) * static_cast<std::size_t>(p);

    std::vector<std::complex<double>> X(np);
    std::copy(in.samples.begin(), in.samples.end(), X.begin());
    fft_inplace(X, false);

    std::vector<std::complex<double>> Y(mp);
    const std::size_t keep = std::min(np, mp) / 2;  // highest bin magnitude kept per side
    double total = 0.0, dropped = 0.0;
    for (std::size_t k2 = 0; k2 < np; ++k2) total += std::norm(X[k2]);
    if (mp >= np) {  // upsample: copy everything, splitting the Nyquist bin if present
        for (std::size_t k2 = 0; k2 <= keep; ++k2) Y[k2] = X[k2];
        for (std::size_t k2 = 1; k2 < np - keep; ++k2) Y[mp - k2] = X[np - k2];
        if (np % 2 == 0 && mp > np) {
            Y[keep] *= 0.5;
            Y[mp - keep] += Y[keep];
        }
    } else {  // downsample: brick-wall at the new Nyquist
        for (std::size_t k2 = 0; k2 < keep; ++k2) Y[k2] = X[k2];
        for (std::size_t k2 = 1; k2 <= mp - 1 - keep; ++k2) Y[mp - k2] = X[np - k2];
        if (mp % 2 == 0)
            Y[keep] = X[keep] + X[np - keep];  // conjugate pair folds to a real bin
        else
            Y[keep] = X[keep];
        for (std::size_t k2 = keep + 1; k2 <= np - keep - 1; ++k2)
            dropped += std::norm(X[k2]);
    }
    fft_inplace(Y, true);

    // nearest-integer output length keeps up-down round trips length-preserving
    const std::size_t m_out =
        static_cast<std::size_t>((static_cast<long long>(n) * p + q / 2) / q);
    res.wave.samples.resize(m_out);
    const double scale = static_cast<double>(mp) / static_cast<double>(np);
    for (std::size_t k2 = 0; k2 < m_out; ++k2) res.wave.samples[k2] = Y[k2].real() * scale;
    res.wave.sample_rate = out_rate;
    res.wave.t0 = in.t0;
    res.dropped_energy_fraction = total > 0.0 ? dropped / total : 0.0;
    res.alias_warning = res.dropped_energy_fraction > 1e-9;
    return res;
}

inline double mean(std::span<const double> v) {
    long double acc = 0.0L;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : static_cast<double>(acc / static_cast<long double>(v.size()));
}

inline double rms(std::span<const double> v) {
    long double acc = 0.0L;
    for (double x : v) acc += static_cast<long double>(x) * x;
    return v.empty() ? 0.0 : static_cast<double>(std::sqrt(acc / static_cast<long double>(v.size())));
}

}  // namespace vnle
