#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace vnle {

namespace detail {
// FFTW plan creation/destruction is not thread-safe; execution is.
inline std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

inline void fft_inplace(std::vector<std::complex<double>>& data, bool inverse) {
    if (data.empty()) return;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_mutex());
        // FFTW_ESTIMATE also guarantees the buffer is not clobbered while planning
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf,
                                inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fft: plan creation failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_mutex());
        fftw_destroy_plan(plan);
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(data.size());
        for (auto& v : data) v *= scale;
    }
}

inline bool is_fast_size(std::size_t n) {
    if (n == 0) return false;
    for (std::size_t p : {std::size_t{2}, std::size_t{3}, std::size_t{5}})
        while (n % p == 0) n /= p;
    return n == 1;
}

// smallest 5-smooth size >= n; keeps FFTW out of its generic prime paths
inline std::size_t next_fast_size(std::size_t n) {
    if (n <= 1) return 1;
    while (!is_fast_size(n)) ++n;
    return n;
}

// signed frequency of DFT bin k for an N-point transform at rate fs
inline double bin_frequency(std::size_t k, std::size_t n, double fs) {
    const auto half = n / 2;
    const double idx = (k <= half) ? static_cast<double>(k)
                                   : static_cast<double>(k) - static_cast<double>(n);
    return idx * fs / static_cast<double>(n);
}

}  // namespace vnle
