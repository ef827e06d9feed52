#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pam.hpp"
#include "volterra.hpp"

namespace vnle {

struct AdaptConfig {
    double mu_train = 0.25;  // normalized-LMS steps; stability bound is mu < 2
    double mu_dd = 0.05;
    std::size_t train_len = 40000;
    std::size_t dd_len = 100000;
    bool normalized = true;
    double norm_eps = 1e-8;
    std::size_t mse_block = 500;
    double divergence_factor = 1e3;  // abort when |e| exceeds this times the reference peak
    // post-training gate; run_rx sets it to catch synchronization failures
    double mse_fail_threshold = std::numeric_limits<double>::infinity();
};

// One LMS update; returns the a-priori error. Throws on divergence so a bad
// step size or broken alignment surfaces instead of silently producing junk.
inline double lms_step(TapVector& taps, std::span<const double> features, double reference,
                       double mu, bool normalized = true, double norm_eps = 1e-8,
                       double abort_above = std::numeric_limits<double>::infinity()) {
    const double y = evaluate(taps, features);
    const double e = reference - y;
    if (!std::isfinite(e) || std::abs(e) > abort_above)
        throw std::runtime_error("lms: diverged (error " + std::to_string(e) + ")");
    double g = mu;
    if (normalized) {
        double energy = 0.0;
        for (double f : features) energy += f * f;
        g = mu / (norm_eps + energy);
    }
    const double ge = g * e;
    std::size_t i = 0;
    taps.dc += ge * features[i++];
    for (auto& w : taps.w1) w += ge * features[i++];
    for (auto& w : taps.w2) w += ge * features[i++];
    for (auto& w : taps.w3) w += ge * features[i++];
    return e;
}

// Maps symbol index j to its sample position in the 2-samples-per-symbol
// stream: p = offset + 2j. The offset already folds in the sampling phase.
struct SymbolMap {
    std::ptrdiff_t offset = 0;

    std::size_t position(std::size_t j) const {
        return static_cast<std::size_t>(offset + static_cast<std::ptrdiff_t>(2 * j));
    }
};

inline std::size_t first_valid_symbol(const SymbolMap& map, const KernelSet& set) {
    const std::ptrdiff_t need = front_span(set) - map.offset;
    if (need <= 0) return 0;
    return static_cast<std::size_t>((need + 1) / 2);
}

// one past the last symbol whose window fits in len samples
inline std::size_t end_valid_symbol(const SymbolMap& map, const KernelSet& set,
                                    std::size_t len) {
    const std::ptrdiff_t limit =
        static_cast<std::ptrdiff_t>(len) - back_span(set) - 1 - map.offset;
    if (limit < 0) return 0;
    return static_cast<std::size_t>(limit / 2) + 1;
}

struct TrainResult {
    std::vector<double> block_mse;
    double final_mse = 0.0;          // mean over the last tenth of the blocks
    std::size_t start_symbol = 0;    // first symbol adapted on
    std::size_t end_symbol = 0;      // one past the last
};

namespace detail {

template <typename RefFn>
TrainResult adapt_run(TapVector& taps, const KernelSet& set, std::span<const double> x,
                      const SymbolMap& map, const AdaptConfig& cfg, double mu,
                      std::size_t start, std::size_t budget, std::size_t ref_limit,
                      RefFn&& reference_for) {
    TrainResult res;
    res.start_symbol = std::max(start, first_valid_symbol(map, set));
    const std::size_t end =
        std::min({ref_limit, end_valid_symbol(map, set, x.size()), res.start_symbol + budget});
    res.end_symbol = std::max(res.start_symbol, end);

    std::vector<double> features(feature_count(set));
    double acc = 0.0;
    std::size_t in_block = 0;
    const std::size_t block = std::max<std::size_t>(cfg.mse_block, 1);
    for (std::size_t j = res.start_symbol; j < res.end_symbol; ++j) {
        make_regressor(x, map.position(j), set, features);
        const double ref = reference_for(j, features);
        const double e = lms_step(taps, features, ref, mu, cfg.normalized, cfg.norm_eps,
                                  cfg.divergence_factor);
        acc += e * e;
        if (++in_block == block) {
            res.block_mse.push_back(acc / static_cast<double>(block));
            acc = 0.0;
            in_block = 0;
        }
    }
    if (in_block > 0) res.block_mse.push_back(acc / static_cast<double>(in_block));
    if (!res.block_mse.empty()) {
        const std::size_t tail = std::max<std::size_t>(res.block_mse.size() / 10, 1);
        double s = 0.0;
        for (std::size_t i = res.block_mse.size() - tail; i < res.block_mse.size(); ++i)
            s += res.block_mse[i];
        res.final_mse = s / static_cast<double>(tail);
    }
    return res;
}

}  // namespace detail

// Supervised pass over the known training prefix. The reference levels must
// already be aligned to x through the map (synchronization's job).
inline TrainResult train(TapVector& taps, const KernelSet& set, std::span<const double> x,
                         std::span<const double> reference_levels, const SymbolMap& map,
                         const AdaptConfig& cfg, std::size_t start_symbol = 0) {
    TrainResult res = detail::adapt_run(
        taps, set, x, map, cfg, cfg.mu_train, start_symbol, cfg.train_len,
        reference_levels.size(),
        [&](std::size_t j, std::span<const double>) { return reference_levels[j]; });
    if (res.final_mse > cfg.mse_fail_threshold)
        throw std::runtime_error(
            "train: residual MSE " + std::to_string(res.final_mse) +
            " above threshold; probable synchronization failure");
    return res;
}

// Decision-directed refinement: the slicer output stands in for the reference.
inline TrainResult dd_refine(TapVector& taps, const KernelSet& set, std::span<const double> x,
                             const Constellation& constellation, const SymbolMap& map,
                             const AdaptConfig& cfg, std::size_t start_symbol) {
    TapVector* taps_ptr = &taps;
    return detail::adapt_run(
        taps, set, x, map, cfg, cfg.mu_dd, start_symbol, cfg.dd_len,
        std::numeric_limits<std::size_t>::max(),
        [&constellation, taps_ptr](std::size_t, std::span<const double> features) {
            return constellation.decide(evaluate(*taps_ptr, features));
        });
}

}  // namespace vnle
