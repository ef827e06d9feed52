#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adapt.hpp"
#include "fft.hpp"
#include "filters.hpp"
#include "linksim.hpp"
#include "pam.hpp"
#include "volterra.hpp"
#include "waveform.hpp"

namespace vnle {

inline std::vector<double> dc_block(std::span<const double> x) {
    const double m = mean(x);
    std::vector<double> out(x.begin(), x.end());
    for (auto& v : out) v -= m;
    return out;
}

inline RealWaveform resample_2sps(const RealWaveform& w, double symbol_rate) {
    return resample(w, 2.0 * symbol_rate).wave;
}

struct SyncResult {
    std::size_t offset = 0;  // sample index of training symbol 0 in the 2 sps stream
    double polarity = 1.0;
    double psr = 0.0;
    double peak = 0.0;
};

// Locates the training prefix by FFT cross-correlation against a sign-only
// template (each training symbol contributes two identical +-1 samples).
// A peak-to-sidelobe ratio below min_psr means the data never lined up.
inline SyncResult synchronize(std::span<const double> x,
                              std::span<const double> training_levels,
                              std::size_t template_symbols, double min_psr = 3.0) {
    const std::size_t k = std::min(template_symbols, training_levels.size());
    if (k == 0) throw std::invalid_argument("synchronize: empty template");
    const std::size_t m = 2 * k;
    if (x.size() < m) throw std::invalid_argument("synchronize: input shorter than template");

    const std::size_t n = x.size();
    const std::size_t len = next_fast_size(n + m);
    std::vector<std::complex<double>> xf(len), tf(len);
    for (std::size_t i = 0; i < n; ++i) xf[i] = x[i];
    for (std::size_t j = 0; j < k; ++j) {
        const double s = training_levels[j] < 0.0 ? -1.0 : 1.0;
        tf[2 * j] = s;
        tf[2 * j + 1] = s;
    }
    fft_inplace(xf, false);
    fft_inplace(tf, false);
    for (std::size_t i = 0; i < len; ++i) xf[i] *= std::conj(tf[i]);
    fft_inplace(xf, true);

    const std::size_t span = n - m;  // valid lags: template fully inside x
    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t off = 0; off <= span; ++off) {
        const double a = std::abs(xf[off].real());
        if (a > best_abs) {
            best_abs = a;
            best = off;
        }
    }
    // the correlation peak is a few samples wide under ISI; sidelobes start
    // beyond this guard zone
    const std::size_t guard = 8;
    double side = 0.0;
    for (std::size_t off = 0; off <= span; ++off) {
        const std::size_t dist = off > best ? off - best : best - off;
        if (dist <= guard) continue;
        side = std::max(side, std::abs(xf[off].real()));
    }
    SyncResult res;
    res.offset = best;
    res.peak = best_abs;
    res.polarity = xf[best].real() < 0.0 ? -1.0 : 1.0;
    res.psr = side > 0.0 ? best_abs / side : std::numeric_limits<double>::infinity();
    if (res.psr < min_psr)
        throw std::runtime_error("synchronize: peak-to-sidelobe ratio " +
                                 std::to_string(res.psr) + " below " +
                                 std::to_string(min_psr) + "; sync failure");
    return res;
}

struct RxOptions {
    const TapVector* pretrained = nullptr;  // skip adaptation, equalize with these
    int force_phase = -1;                   // 0 or 1 to pin the sampling phase
};

struct RxResult {
    SyncResult sync;
    int phase = 0;
    TrainResult train_stats;
    TrainResult dd_stats;
    TapVector taps;
    BerReport report;
    std::size_t first_counted = 0;
    std::size_t counted = 0;
};

namespace detail {

inline double frozen_probe_mse(const TapVector& taps, const KernelSet& set,
                               std::span<const double> x,
                               std::span<const double> refs, const SymbolMap& map,
                               std::size_t budget) {
    const std::size_t j0 = first_valid_symbol(map, set);
    const std::size_t j1 =
        std::min({refs.size(), end_valid_symbol(map, set, x.size()), j0 + budget});
    if (j1 <= j0) return std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t j = j0; j < j1; ++j) {
        const double e = refs[j] - evaluate_at(taps, set, x, map.position(j));
        acc += e * e;
    }
    return acc / static_cast<double>(j1 - j0);
}

}  // namespace detail

// Full receive path: dc removal, resampling to 2 samples per symbol,
// synchronization, adaptation (supervised then decision-directed), then a
// frozen equalization pass. Errors are counted from symbol 2*memory on,
// rounded up to a pair boundary so six-level blocks stay aligned.
inline RxResult run_rx(const RealWaveform& captured, const std::vector<int>& tx_symbols,
                       const LinkConfig& link, const KernelSet& set,
                       const AdaptConfig& adapt_cfg, const RxOptions& opts = {}) {
    validate(set);
    const Constellation c = Constellation::make(link.pam_order);
    const std::vector<double> refs = to_levels(tx_symbols, c);

    std::vector<double> x = dc_block(captured.samples);
    RealWaveform two_sps =
        resample_2sps(RealWaveform{std::move(x), captured.sample_rate, captured.t0},
                      link.symbol_rate);
    std::vector<double>& sig = two_sps.samples;

    const std::size_t template_symbols = std::min<std::size_t>(4000, tx_symbols.size());
    const SyncResult sync = synchronize(sig, refs, template_symbols);

    const double gain = sync.polarity * c.rms() / std::max(rms(sig), 1e-30);
    for (auto& v : sig) v *= gain;

    RxResult res;
    res.sync = sync;

    AdaptConfig cfg = adapt_cfg;
    if (!std::isfinite(cfg.mse_fail_threshold))
        cfg.mse_fail_threshold = 0.75 * c.rms() * c.rms();

    int best_phase = -1;
    double best_metric = std::numeric_limits<double>::infinity();
    TapVector best_taps;
    TrainResult best_train;
    std::string phase_error;
    for (int ph = 0; ph < 2; ++ph) {
        if (opts.force_phase >= 0 && ph != opts.force_phase) continue;
        const SymbolMap map{static_cast<std::ptrdiff_t>(sync.offset) + ph};
        if (opts.pretrained != nullptr) {
            const double m = detail::frozen_probe_mse(*opts.pretrained, set, sig, refs, map,
                                                      template_symbols);
            if (m < best_metric) {
                best_metric = m;
                best_phase = ph;
                best_taps = *opts.pretrained;
            }
            continue;
        }
        TapVector taps = center_spike_taps(set);
        try {
            TrainResult tr = train(taps, set, sig, refs, map, cfg);
            if (tr.final_mse < best_metric) {
                best_metric = tr.final_mse;
                best_phase = ph;
                best_taps = std::move(taps);
                best_train = std::move(tr);
            }
        } catch (const std::runtime_error& e) {
            phase_error = e.what();  // other phase may still converge
        }
    }
    if (best_phase < 0)
        throw std::runtime_error("run_rx: no sampling phase converged (" + phase_error + ")");

    res.phase = best_phase;
    res.taps = std::move(best_taps);
    res.train_stats = std::move(best_train);
    const SymbolMap map{static_cast<std::ptrdiff_t>(sync.offset) + best_phase};

    if (opts.pretrained == nullptr && cfg.dd_len > 0)
        res.dd_stats = dd_refine(res.taps, set, sig, c, map, cfg, res.train_stats.end_symbol);

    const std::size_t j_lo = first_valid_symbol(map, set);
    const std::size_t j_hi = std::min(tx_symbols.size(), end_valid_symbol(map, set, sig.size()));
    std::size_t start = std::max<std::size_t>(2 * static_cast<std::size_t>(set.memory()), j_lo);
    if (start % 2 != 0) ++start;  // pair boundary
    if (start >= j_hi) throw std::runtime_error("run_rx: capture too short to count errors");

    std::vector<int> tx_cut(tx_symbols.begin() + static_cast<std::ptrdiff_t>(start),
                            tx_symbols.begin() + static_cast<std::ptrdiff_t>(j_hi));
    std::vector<int> rx_cut;
    rx_cut.reserve(j_hi - start);
    for (std::size_t j = start; j < j_hi; ++j)
        rx_cut.push_back(c.decide_index(evaluate_at(res.taps, set, sig, map.position(j))));

    res.report = count_errors(tx_cut, rx_cut, link.pam_order);
    const ComplexityReport cx = complexity(set);
    res.report.n1 = cx.n1;
    res.report.n2 = cx.n2;
    res.report.n3 = cx.n3;
    res.report.mult_count = cx.mult_count;
    res.first_counted = start;
    res.counted = j_hi - start;
    return res;
}

}  // namespace vnle
