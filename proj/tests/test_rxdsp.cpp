#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "vnle/bench.hpp"
#include "vnle/rxdsp.hpp"

using namespace vnle;

TEST_CASE("mean removal is exact and idempotent", "[rxdsp]") {
    Rng rng(2);
    std::vector<double> x(5000);
    for (auto& v : x) v = rng.gaussian() + 3.7;
    const std::vector<double> once = dc_block(x);
    CHECK(std::abs(mean(once)) <= 1e-12);
    const std::vector<double> twice = dc_block(once);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(twice[i] - once[i]) <= 1e-12);
}

namespace {

// training levels held at two samples per symbol, buried at a known offset
std::vector<double> buried_stream(const std::vector<double>& levels, std::size_t offset,
                                  std::size_t total, double noise_sigma, double polarity,
                                  std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> x(total);
    for (auto& v : x) v = noise_sigma * rng.gaussian();
    for (std::size_t j = 0; j < levels.size(); ++j) {
        x[offset + 2 * j] += polarity * levels[j];
        x[offset + 2 * j + 1] += polarity * levels[j];
    }
    return x;
}

}  // namespace

TEST_CASE("synchronization finds offset and polarity", "[rxdsp]") {
    const Constellation c = Constellation::make(6);
    const auto syms = generate_prms(31, 3000, 6);
    const auto levels = to_levels(syms, c);

    const std::vector<double> x = buried_stream(levels, 137, 9000, 0.05, 1.0, 8);
    const SyncResult s = synchronize(x, levels, 1000);
    CHECK(s.offset == 137);
    CHECK(s.polarity == 1.0);
    CHECK(s.psr >= 3.0);

    const std::vector<double> neg = buried_stream(levels, 200, 9000, 0.05, -1.0, 9);
    const SyncResult sn = synchronize(neg, levels, 1000);
    CHECK(sn.offset == 200);
    CHECK(sn.polarity == -1.0);
}

TEST_CASE("synchronization refuses noise", "[rxdsp]") {
    const Constellation c = Constellation::make(6);
    const auto levels = to_levels(generate_prms(32, 2000, 6), c);
    Rng rng(10);
    std::vector<double> noise(8000);
    for (auto& v : noise) v = rng.gaussian();
    CHECK_THROWS_AS(synchronize(noise, levels, 1000), std::runtime_error);
}

TEST_CASE("resampling to two samples per symbol", "[rxdsp]") {
    RealWaveform w;
    w.sample_rate = 256e9;
    w.samples.assign(25600, 0.0);
    const RealWaveform out = resample_2sps(w, 90e9);
    CHECK(out.sample_rate == 180e9);
    CHECK(out.samples.size() == 18000);
}

TEST_CASE("noiseless link equalizes to zero errors", "[rxdsp]") {
    LinkConfig link = preset("pam6_90g_b2b");
    link.thermal_noise_sigma = 0.0;
    link.adc_bits = 16;
    link.vpp = 0.8 * link.mzm_vpi;
    link.mzm_bias = -0.45 * link.mzm_vpi;
    AdaptConfig cfg;
    const RxResult r = run_trial(link, build_full(120, 6, 9), 7, 50000, cfg);
    CHECK(r.report.bit_errors == 0);
    CHECK(r.report.symbol_errors == 0);
    CHECK(r.counted > 40000);
}

TEST_CASE("recovery is deterministic", "[rxdsp]") {
    LinkConfig link = preset("pam6_90g_b2b");
    link.vpp = 0.8 * link.mzm_vpi;
    link.mzm_bias = -0.45 * link.mzm_vpi;
    AdaptConfig cfg;
    const KernelSet set = build_full(40, 4, 3);
    const RxResult a = run_trial(link, set, 3, 30000, cfg);
    const RxResult b = run_trial(link, set, 3, 30000, cfg);
    CHECK(a.report.bit_errors == b.report.bit_errors);
    CHECK(a.report.symbol_errors == b.report.symbol_errors);
    CHECK(a.sync.offset == b.sync.offset);
    CHECK(a.phase == b.phase);
    CHECK(a.taps.w1 == b.taps.w1);
    CHECK(a.taps.w3 == b.taps.w3);
}

TEST_CASE("error counting skips the edge transient", "[rxdsp]") {
    LinkConfig link = preset("pam6_90g_b2b");
    link.vpp = 0.8 * link.mzm_vpi;
    link.mzm_bias = -0.45 * link.mzm_vpi;
    AdaptConfig cfg;
    const KernelSet set = build_full(120, 6, 9);
    const RxResult r = run_trial(link, set, 5, 30000, cfg);
    CHECK(r.first_counted >= 2 * static_cast<std::size_t>(set.memory()));
    CHECK(r.first_counted % 2 == 0);  // pair alignment for the six-level code
    CHECK(r.counted <= 30000 - r.first_counted);
    // excluded transient is under 1% of a standard million-symbol run
    CHECK(2 * static_cast<std::size_t>(set.memory()) < 10000);
}

TEST_CASE("pretrained taps skip adaptation and match", "[rxdsp]") {
    LinkConfig link = preset("pam6_90g_b2b");
    link.vpp = 0.8 * link.mzm_vpi;
    link.mzm_bias = -0.45 * link.mzm_vpi;
    AdaptConfig cfg;
    const KernelSet set = build_full(60, 4, 3);
    const std::vector<int> tx = generate_prms(12, 30000, link.pam_order);
    const RealWaveform cap = run_link(tx, link, 12);
    const RxResult trained = run_rx(cap, tx, link, set, cfg);

    RxOptions opts;
    opts.pretrained = &trained.taps;
    const RxResult replay = run_rx(cap, tx, link, set, cfg, opts);
    CHECK(replay.phase == trained.phase);
    CHECK(replay.report.bit_errors == trained.report.bit_errors);
    CHECK(replay.report.ser == trained.report.ser);
}

TEST_CASE("forced phase is honored", "[rxdsp]") {
    LinkConfig link = preset("pam6_90g_b2b");
    link.vpp = 0.8 * link.mzm_vpi;
    link.mzm_bias = -0.45 * link.mzm_vpi;
    AdaptConfig cfg;
    const KernelSet set = build_full(40, 0, 0);
    const std::vector<int> tx = generate_prms(13, 25000, link.pam_order);
    const RealWaveform cap = run_link(tx, link, 13);
    for (int ph : {0, 1}) {
        RxOptions opts;
        opts.force_phase = ph;
        const RxResult r = run_rx(cap, tx, link, set, cfg, opts);
        CHECK(r.phase == ph);
    }
}
