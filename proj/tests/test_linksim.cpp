#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "vnle/linksim.hpp"
#include "vnle/pam.hpp"
#include "vnle/rng.hpp"

using namespace vnle;

namespace {

ComplexWaveform random_field(std::size_t n, double fs, std::uint64_t seed) {
    Rng rng(seed);
    ComplexWaveform w;
    w.sample_rate = fs;
    w.samples.resize(n);
    for (auto& v : w.samples) v = {rng.gaussian(), rng.gaussian()};
    return w;
}

double energy(const std::vector<std::complex<double>>& v) {
    double e = 0.0;
    for (const auto& s : v) e += std::norm(s);
    return e;
}

}  // namespace

TEST_CASE("dispersion is unitary and vanishes at zero length", "[linksim][physics]") {
    const ComplexWaveform in = random_field(4096, 360e9, 2);
    const ComplexWaveform out = fiber(in, 1.0, 17.0, 1550.0);
    CHECK(std::abs(energy(out.samples) / energy(in.samples) - 1.0) <= 1e-10);

    const ComplexWaveform same = fiber(in, 0.0, 17.0, 1550.0);
    for (std::size_t i = 0; i < in.samples.size(); ++i)
        CHECK(std::abs(same.samples[i] - in.samples[i]) <= 1e-12);
}

TEST_CASE("dispersion accumulates over concatenated spans", "[linksim][physics]") {
    const ComplexWaveform in = random_field(2048, 360e9, 3);
    const ComplexWaveform two = fiber(in, 2.0, 17.0, 1550.0);
    const ComplexWaveform hop = fiber(fiber(in, 0.75, 17.0, 1550.0), 1.25, 17.0, 1550.0);
    for (std::size_t i = 0; i < in.samples.size(); ++i)
        CHECK(std::abs(two.samples[i] - hop.samples[i]) <= 1e-10);
}

TEST_CASE("dispersion delays high frequencies differently", "[linksim]") {
    // a single tone acquires exactly the quadratic phase of its frequency
    const std::size_t n = 1024;
    const double fs = 360e9;
    ComplexWaveform in;
    in.sample_rate = fs;
    in.samples.resize(n);
    const std::size_t bin = 100;
    for (std::size_t i = 0; i < n; ++i) {
        const double ph = 2.0 * std::numbers::pi * static_cast<double>(bin * i) /
                          static_cast<double>(n);
        in.samples[i] = {std::cos(ph), std::sin(ph)};
    }
    const ComplexWaveform out = fiber(in, 1.0, 17.0, 1550.0);
    const double f = static_cast<double>(bin) * fs / static_cast<double>(n);
    const double d_si = 17.0 * 1e-6;  // ps/(nm km) in s/m/m
    const double lambda = 1550e-9;
    const double want = -std::numbers::pi * d_si * lambda * lambda / kSpeedOfLight * f * f *
                        1000.0;
    const std::complex<double> ratio = out.samples[0] / in.samples[0];
    CHECK(std::arg(ratio * std::polar(1.0, -want)) == Catch::Approx(0.0).margin(1e-9));
}

namespace {

RealWaveform drive_wave(std::vector<double> samples) {
    RealWaveform w;
    w.sample_rate = 360e9;
    w.samples = std::move(samples);
    return w;
}

}  // namespace

TEST_CASE("modulator hits its null and peak exactly", "[linksim][physics]") {
    const double vpi = 2.0;
    const RealWaveform drive = drive_wave({0.0, 0.0, 0.0});
    // bias at the null: zero field regardless of vpp=0
    const RealWaveform nulled = mzm(drive, vpi, -vpi, 0.0);
    for (double v : nulled.samples) CHECK(std::abs(v) <= 1e-15);
    // bias at the peak: unit field
    const RealWaveform peaked = mzm(drive, vpi, 0.0, 0.0);
    for (double v : peaked.samples) CHECK(v == Catch::Approx(1.0));
    // half-wave swing from peak reaches the null
    const RealWaveform swung = mzm(drive_wave({1.0}), vpi, 0.0, 2.0 * vpi);
    CHECK(std::abs(swung.samples[0]) <= 1e-15);
}

TEST_CASE("modulator small-signal slope at quadrature", "[linksim]") {
    const double vpi = 2.0;
    const double bias = -vpi / 2.0;
    const double eps = 1e-6;
    const double up = mzm(drive_wave({eps}), vpi, bias, 2.0).samples[0];
    const double dn = mzm(drive_wave({-eps}), vpi, bias, 2.0).samples[0];
    const double slope = (up - dn) / (2.0 * eps);
    // d/ds cos((pi/2 vpi)(s vpp/2 + bias)) at s=0, vpp=2
    const double want = -(std::numbers::pi / (2.0 * vpi)) *
                        std::sin((std::numbers::pi / (2.0 * vpi)) * bias);
    CHECK(slope == Catch::Approx(want).epsilon(1e-6));
}

TEST_CASE("detection scales with the square of the field", "[linksim][physics]") {
    LinkConfig cfg = preset("pam6_90g_b2b");
    cfg.thermal_noise_sigma = 0.0;
    ComplexWaveform field = random_field(2048, cfg.analog_rate, 4);
    ComplexWaveform scaled = field;
    for (auto& v : scaled.samples) v *= 1.7;
    Rng r1(9), r2(9);
    const RealWaveform a = photodiode(field, cfg, r1);
    const RealWaveform b = photodiode(scaled, cfg, r2);
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        CHECK(b.samples[i] == Catch::Approx(1.7 * 1.7 * a.samples[i]).epsilon(1e-12).margin(1e-12));
}

TEST_CASE("attenuator lands on the requested power", "[linksim]") {
    // field amplitudes are in root-milliwatts, so dBm is 10 log10 of mean power
    ComplexWaveform field = random_field(4096, 360e9, 5);
    const ComplexWaveform set = voa_scale(field, 4.0);
    double p = 0.0;
    for (const auto& s : set.samples) p += std::norm(s);
    p /= static_cast<double>(set.samples.size());
    CHECK(10.0 * std::log10(p) == Catch::Approx(4.0).margin(1e-9));
}

TEST_CASE("midrise quantizer meets the resolution bound", "[linksim][physics]") {
    // full-scale sine: SNR within 1 dB of 6.02 b + 1.76
    const std::size_t n = 65536;
    std::vector<double> sine(n);
    for (std::size_t i = 0; i < n; ++i)
        sine[i] = std::sin(2.0 * std::numbers::pi * 127.0 * static_cast<double>(i) /
                           static_cast<double>(n));
    for (int bits : {6, 8, 10}) {
        std::vector<double> q = sine;
        quantize_midrise(q, bits, 0.0, 1.0);
        double sig = 0.0, err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sig += sine[i] * sine[i];
            err += (q[i] - sine[i]) * (q[i] - sine[i]);
        }
        const double snr_db = 10.0 * std::log10(sig / err);
        const double want = 6.02 * bits + 1.76;
        CHECK(snr_db >= want - 1.0);
        CHECK(snr_db <= want + 1.0);
    }
}

TEST_CASE("quantizer output lives on the reconstruction grid", "[linksim]") {
    std::vector<double> v = {-5.0, -0.2, 0.0, 0.3, 5.0};
    quantize_midrise(v, 4, 0.0, 1.0);
    const double delta = 2.0 / 16.0;
    for (double s : v) {
        const double code = s / delta - 0.5;
        CHECK(code == Catch::Approx(std::round(code)).margin(1e-12));
    }
    CHECK(v.front() == Catch::Approx(-1.0 + delta / 2.0));  // clamped to the lowest cell
    CHECK(v.back() == Catch::Approx(1.0 - delta / 2.0));
}

TEST_CASE("hold-and-filter front end preserves symbol DC", "[linksim]") {
    LinkConfig cfg = preset("pam6_90g_b2b");
    const std::vector<double> levels(400, 0.6);
    const RealWaveform out = dac(levels, cfg);
    CHECK(out.sample_rate == cfg.dac_rate);
    // interior settles to the held level
    const std::size_t lo = out.samples.size() / 4, hi = 3 * out.samples.size() / 4;
    for (std::size_t i = lo; i < hi; ++i)
        CHECK(out.samples[i] == Catch::Approx(0.6).margin(1e-3));
}

TEST_CASE("preemphasis lifts the upper band", "[linksim]") {
    LinkConfig flat = preset("pam6_90g_b2b");
    flat.preemphasis = false;
    LinkConfig pre = flat;
    pre.preemphasis = true;
    // alternating extremes put energy at the symbol-rate edge
    std::vector<double> levels(512);
    for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = i % 2 ? 1.0 : -1.0;
    const RealWaveform a = dac(levels, flat);
    const RealWaveform b = dac(levels, pre);
    CHECK(rms(b.samples) > rms(a.samples) * 1.05);
}

TEST_CASE("presets are valid and differ where expected", "[linksim]") {
    for (const auto& name : preset_names()) {
        const LinkConfig cfg = preset(name);
        CHECK_NOTHROW(cfg.validate());
    }
    const LinkConfig b2b = preset("pam6_90g_b2b");
    const LinkConfig km1 = preset("pam6_90g_1km");
    CHECK(b2b.fiber_len_km == 0.0);
    CHECK(km1.fiber_len_km == 1.0);
    CHECK(b2b.symbol_rate == 90e9);
    CHECK(b2b.pam_order == 6);
    const LinkConfig p8 = preset("pam8_75g_b2b");
    CHECK(p8.symbol_rate == 75e9);
    CHECK(p8.pam_order == 8);
    CHECK_THROWS(preset("pam6_90g_2km"));
}

TEST_CASE("config validation catches nonsense", "[linksim]") {
    LinkConfig cfg = preset("pam6_90g_b2b");
    cfg.adc_bits = 0;
    CHECK_THROWS(cfg.validate());
    cfg = preset("pam6_90g_b2b");
    cfg.mzm_vpi = -1.0;
    CHECK_THROWS(cfg.validate());
    cfg = preset("pam6_90g_b2b");
    cfg.pam_order = 3;
    CHECK_THROWS(cfg.validate());
    cfg = preset("pam6_90g_b2b");
    cfg.symbol_rate = 2.0 * cfg.dac_rate;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("full link produces a capture at the converter rate", "[linksim]") {
    LinkConfig cfg = preset("pam6_90g_b2b");
    const auto tx = generate_prms(6, 4000, cfg.pam_order);
    const RealWaveform cap = run_link(tx, cfg, 6);
    CHECK(cap.sample_rate == cfg.adc_rate);
    const double want_duration = 4000.0 / cfg.symbol_rate;
    CHECK(cap.duration() == Catch::Approx(want_duration).epsilon(0.01));
    // deterministic across reruns
    const RealWaveform cap2 = run_link(tx, cfg, 6);
    REQUIRE(cap.samples.size() == cap2.samples.size());
    for (std::size_t i = 0; i < cap.samples.size(); i += 97)
        CHECK(cap.samples[i] == cap2.samples[i]);
    // a different noise seed changes the capture
    const RealWaveform cap3 = run_link(tx, cfg, 7);
    double diff = 0.0;
    for (std::size_t i = 0; i < cap.samples.size(); ++i)
        diff += std::abs(cap.samples[i] - cap3.samples[i]);
    CHECK(diff > 0.0);
}

TEST_CASE("noise scales with the configured sigma", "[linksim]") {
    LinkConfig quiet = preset("pam6_90g_b2b");
    quiet.thermal_noise_sigma = 0.0;
    quiet.adc_bits = 16;
    LinkConfig loud = quiet;
    loud.thermal_noise_sigma = 0.14;
    const auto tx = generate_prms(11, 2000, quiet.pam_order);
    const RealWaveform a = run_link(tx, quiet, 11);
    const RealWaveform b = run_link(tx, loud, 11);
    REQUIRE(a.samples.size() == b.samples.size());
    std::vector<double> delta(a.samples.size());
    for (std::size_t i = 0; i < delta.size(); ++i) delta[i] = b.samples[i] - a.samples[i];
    CHECK(rms(delta) > 0.01);
}
