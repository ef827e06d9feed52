#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vnle/bench.hpp"

using namespace vnle;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    const fs::path p = "bench_scratch";
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("row formatting", "[bench]") {
    TrialRow r;
    r.experiment = "fig4";
    r.preset = "pam6_90g_b2b";
    r.scheme = "full";
    r.m1 = 120;
    r.m2 = 6;
    r.m3 = 9;
    r.n1 = 120;
    r.n2 = 21;
    r.n3 = 165;
    r.mult_count = 657;
    r.power_dbm = 2.0;
    r.seed = 7;
    r.symbols = 1000000;
    r.symbol_errors = 41;
    r.bit_errors = 52;
    r.ser = 4.1e-05;
    r.ber = 1.04e-05;
    r.note = "ok, fine\nreally";
    CHECK(format_row(r) ==
          "fig4,pam6_90g_b2b,full,120,6,9,,120,21,165,657,2,7,1000000,41,52,"
          "4.1e-05,1.04e-05,ok; fine;really");

    TrialRow bare;
    bare.experiment = "fig1";
    bare.preset = "p";
    bare.scheme = "full";
    bare.m1 = 10;
    bare.m3 = 3;
    bare.n1 = 10;
    bare.n3 = 10;
    bare.mult_count = 40;
    CHECK(format_row(bare) == "fig1,p,full,10,0,3,,10,0,10,40,,,,,,,,");

    const fs::path path = scratch() / "two_rows.csv";
    write_csv(path.string(), {r, bare});
    CHECK(slurp(path) == std::string(csv_header()) + "\n" + format_row(r) + "\n" +
                             format_row(bare) + "\n");
}

TEST_CASE("kernel count sweep matches closed forms", "[bench]") {
    SweepSpec spec = default_sweep("fig1", "pam6_90g_b2b");
    const fs::path csv = scratch() / "fig1.csv";
    spec.out_path = csv.string();
    const std::vector<TrialRow> rows = run_sweep(spec);

    REQUIRE(rows.size() == 65);  // five schemes, M3 = 3..15
    for (const TrialRow& r : rows) {
        CHECK(r.n1 == 120);
        CHECK(r.n2 == 21);
        CHECK(r.mult_count == r.n1 + 2 * r.n2 + 3 * r.n3);
        CHECK_FALSE(r.seed);
        CHECK_FALSE(r.ber);
        long long want = 0;
        if (r.scheme == "full") {
            CHECK(r.d == -1);
            want = static_cast<long long>(full_third_count(r.m3));
        } else if (r.scheme == "polynomial") {
            CHECK(r.d == -1);
            want = static_cast<long long>(polynomial_third_count(r.m3));
        } else if (r.scheme == "two_sam") {
            CHECK(r.d == -1);
            want = static_cast<long long>(two_sam_third_count(r.m3));
        } else if (r.scheme == "ri_d") {
            CHECK(r.d == (r.m3 + 1) / 2);
            want = static_cast<long long>(ri_d_third_count(r.m3, r.d));
        } else if (r.scheme == "combined") {
            CHECK(r.d == (r.m3 + 1) / 2);
            want = static_cast<long long>(combined_third_count(r.m3, r.d));
        } else {
            FAIL("unexpected scheme " << r.scheme);
        }
        CHECK(r.n3 == want);
    }

    // frozen rows pin the file format
    CHECK(format_row(rows[0]) == "fig1,pam6_90g_b2b,full,120,6,3,,120,21,10,192,,,,,,,,");
    CHECK(format_row(rows[45]) == "fig1,pam6_90g_b2b,ri_d,120,6,9,5,120,21,119,519,,,,,,,,");
    CHECK(format_row(rows[59]) ==
          "fig1,pam6_90g_b2b,combined,120,6,10,5,120,21,80,402,,,,,,,,");

    const std::string text = slurp(csv);
    CHECK(text.rfind(std::string(csv_header()) + "\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 66);

    const fs::path svg = scratch() / "fig1.svg";
    REQUIRE(fs::exists(svg));
    CHECK(slurp(svg).find("<svg") != std::string::npos);
}

TEST_CASE("repeated sweeps write identical files", "[bench]") {
    SweepSpec spec;
    spec.experiment = "fig3";
    spec.preset = "pam6_90g_b2b";
    spec.link = preset(spec.preset);
    spec.link.vpp = 0.8 * spec.link.mzm_vpi;
    spec.link.mzm_bias = -0.45 * spec.link.mzm_vpi;
    spec.m1_list = {40};
    spec.m2_list = {4};
    spec.m3_list = {0, 3};
    spec.schemes = {Scheme::full};
    spec.symbols = 20000;

    const fs::path a = scratch() / "rerun_a.csv";
    const fs::path b = scratch() / "rerun_b.csv";
    spec.out_path = a.string();
    const auto rows_a = run_sweep(spec);
    spec.out_path = b.string();
    const auto rows_b = run_sweep(spec);

    REQUIRE(rows_a.size() == 2);
    for (const TrialRow& r : rows_a) {
        REQUIRE(r.ber);
        CHECK(r.note.empty());
    }
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(scratch() / "rerun_a.svg") == slurp(scratch() / "rerun_b.svg"));
}

TEST_CASE("a failed trial is recorded and the sweep carries on", "[bench]") {
    SweepSpec spec;
    spec.experiment = "fig3";
    spec.preset = "pam6_90g_b2b";
    spec.link = preset(spec.preset);
    spec.link.vpp = 0.8 * spec.link.mzm_vpi;
    spec.link.mzm_bias = -0.45 * spec.link.mzm_vpi;
    // the second memory is longer than the capture can support
    spec.m1_list = {4, 3000};
    spec.m2_list = {0};
    spec.m3_list = {0};
    spec.schemes = {Scheme::full};
    spec.symbols = 6000;

    const std::vector<TrialRow> rows = run_sweep(spec);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].ber);
    CHECK(rows[0].note.empty());
    CHECK_FALSE(rows[1].ber);
    CHECK_FALSE(rows[1].ser);
    CHECK_FALSE(rows[1].note.empty());
}

TEST_CASE("sweep input validation", "[bench]") {
    CHECK_THROWS_AS(default_sweep("fig2", "pam6_90g_b2b"), std::invalid_argument);
    SweepSpec spec = default_sweep("fig7", "pam6_90g_b2b");
    CHECK(spec.m3_list == std::vector<int>{9, 10});
    spec.m3_list = {9};
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
    spec.m3_list.clear();
    CHECK_THROWS_AS(run_sweep(spec), std::invalid_argument);
    CHECK(default_sweep("fig4", "pam6_90g_b2b").m3_list == std::vector<int>{9});
}

TEST_CASE("operating point calibration", "[bench]") {
    CalibrateOptions opts;
    opts.bias_frac = {-0.45};
    opts.vpp_frac = {0.8};
    opts.symbols = 20000;
    opts.m1 = 40;
    opts.m2 = 4;
    opts.m3 = 3;
    const fs::path cache = scratch() / "calibration.conf";
    fs::remove(cache);
    opts.cache_path = cache.string();

    const double vpi = preset("pam6_90g_b2b").mzm_vpi;
    const CalibrationResult fresh = calibrate("pam6_90g_b2b", opts);
    CHECK_FALSE(fresh.from_cache);
    CHECK(fresh.mzm_bias == Catch::Approx(-0.45 * vpi));
    CHECK(fresh.vpp == Catch::Approx(0.8 * vpi));
    CHECK(fresh.ber >= 0.0);
    REQUIRE(fs::exists(cache));

    const CalibrationResult again = calibrate("pam6_90g_b2b", opts);
    CHECK(again.from_cache);
    CHECK(again.mzm_bias == Catch::Approx(fresh.mzm_bias));
    CHECK(again.vpp == Catch::Approx(fresh.vpp));
    CHECK(again.ber == Catch::Approx(fresh.ber));

    // a cache written for one preset never answers for another
    const CalibrationResult other = calibrate("pam6_90g_1km", opts);
    CHECK_FALSE(other.from_cache);

    CalibrateOptions forced = opts;
    forced.force = true;
    CHECK_FALSE(calibrate("pam6_90g_b2b", forced).from_cache);

    LinkConfig link = preset("pam6_90g_b2b");
    apply_calibration(link, fresh);
    CHECK(link.mzm_bias == Catch::Approx(fresh.mzm_bias));
    CHECK(link.vpp == Catch::Approx(fresh.vpp));
}

TEST_CASE("widening the calibration grid never hurts", "[bench]") {
    CalibrateOptions narrow;
    narrow.bias_frac = {-0.45};
    narrow.vpp_frac = {1.2};
    narrow.symbols = 20000;
    narrow.m1 = 40;
    narrow.m2 = 4;
    narrow.m3 = 3;

    CalibrateOptions wide = narrow;
    wide.vpp_frac = {0.8, 1.2};

    const CalibrationResult a = calibrate("pam6_90g_b2b", narrow);
    const CalibrationResult b = calibrate("pam6_90g_b2b", wide);
    CHECK(b.ber <= a.ber);

    CalibrateOptions empty = narrow;
    empty.bias_frac.clear();
    CHECK_THROWS_AS(calibrate("pam6_90g_b2b", empty), std::invalid_argument);
}
