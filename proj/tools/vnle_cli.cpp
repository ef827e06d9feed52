// command-line front end: kernel listings, link simulation, equalization,
// parameter sweeps, and operating-point calibration
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vnle/bench.hpp"
#include "vnle/config.hpp"

namespace {

struct LinkFlags {
    std::string preset_name = "pam6_90g_b2b";
    std::string config_path;
    double vpp = 0.0, bias = 0.0, power = 0.0, sigma = 0.0, fiber_km = 0.0;
    CLI::App* cmd = nullptr;

    void attach(CLI::App& app) {
        cmd = &app;
        app.add_option("--preset", preset_name, "link preset name")
            ->check(CLI::IsMember(vnle::preset_names()));
        app.add_option("--config", config_path, "config file overriding the preset");
        app.add_option("--vpp", vpp, "drive swing, volts");
        app.add_option("--bias", bias, "modulator bias, volts");
        app.add_option("--power", power, "photodiode input power, dBm");
        app.add_option("--noise-sigma", sigma, "receiver noise sigma");
        app.add_option("--fiber-km", fiber_km, "fiber length, km");
    }

    // precedence: preset < config file < explicit flags
    vnle::LinkConfig resolve(vnle::AdaptConfig& adapt) const {
        vnle::LinkConfig link = vnle::preset(preset_name);
        if (!config_path.empty())
            vnle::apply_overrides(link, adapt, vnle::read_config(config_path));
        if (cmd->count("--vpp")) link.vpp = vpp;
        if (cmd->count("--bias")) link.mzm_bias = bias;
        if (cmd->count("--power")) link.pd_input_power_dbm = power;
        if (cmd->count("--noise-sigma")) link.thermal_noise_sigma = sigma;
        if (cmd->count("--fiber-km")) link.fiber_len_km = fiber_km;
        link.validate();
        return link;
    }
};

struct SetFlags {
    std::string scheme = "full";
    int m1 = 120, m2 = 6, m3 = 9, d = -1;

    void attach(CLI::App& app) {
        app.add_option("--scheme", scheme, "kernel scheme")
            ->check(CLI::IsMember({"full", "polynomial", "two_sam", "ri_d", "combined"}));
        app.add_option("--m1", m1, "linear memory");
        app.add_option("--m2", m2, "second-order memory");
        app.add_option("--m3", m3, "third-order memory");
        app.add_option("--d", d, "lag spacing bound (ri_d/combined)");
    }

    vnle::KernelSet build() const {
        const vnle::Scheme sc = vnle::parse_scheme(scheme);
        int dd = d;
        if (dd < 0 && (sc == vnle::Scheme::ri_d || sc == vnle::Scheme::combined))
            dd = (m3 + 1) / 2;  // default half rule
        return vnle::build_kernel_set(sc, m1, m2, m3, dd);
    }
};

void print_report(const vnle::RxResult& r, std::size_t symbols) {
    std::printf("symbols %zu\n", symbols);
    std::printf("counted %zu\n", r.counted);
    std::printf("symbol_errors %zu\n", r.report.symbol_errors);
    std::printf("bit_errors %zu\n", r.report.bit_errors);
    std::printf("ser %.12g\n", r.report.ser);
    std::printf("ber %.12g\n", r.report.ber);
    std::printf("n1 %zu\nn2 %zu\nn3 %zu\nmult_count %zu\n", r.report.n1, r.report.n2,
                r.report.n3, r.report.mult_count);
    std::printf("sync_offset %zu\nphase %d\npsr %.4g\n", r.sync.offset, r.phase, r.sync.psr);
    std::printf("train_mse %.6g\ndd_mse %.6g\n", r.train_stats.final_mse,
                r.dd_stats.final_mse);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volterra nonlinear equalization toolkit"};
    app.require_subcommand(1);

    // kernels
    auto* kernels_cmd = app.add_subcommand("kernels", "enumerate a kernel set");
    SetFlags kset;
    kset.attach(*kernels_cmd);
    std::string kernels_out;
    bool counts_only = false;
    kernels_cmd->add_option("--out", kernels_out, "listing file (stdout if omitted)");
    kernels_cmd->add_flag("--counts", counts_only, "print sizes only");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run the link, write the capture");
    LinkFlags sim_link;
    sim_link.attach(*sim_cmd);
    std::uint64_t sim_seed = 1;
    std::size_t sim_symbols = 100000;
    std::string sim_out = "capture.bin";
    sim_cmd->add_option("--seed", sim_seed, "trial seed");
    sim_cmd->add_option("--symbols", sim_symbols, "transmitted symbols");
    sim_cmd->add_option("--out", sim_out, "waveform output path")->required();

    // equalize
    auto* eq_cmd = app.add_subcommand("equalize", "equalize a capture file");
    LinkFlags eq_link;
    eq_link.attach(*eq_cmd);
    SetFlags eq_set;
    eq_set.attach(*eq_cmd);
    std::string eq_in, eq_taps_in, eq_taps_out, eq_out;
    eq_cmd->add_option("--in", eq_in, "capture file from simulate")->required();
    eq_cmd->add_option("--taps", eq_taps_in, "pretrained tap file (skips adaptation)");
    eq_cmd->add_option("--save-taps", eq_taps_out, "write converged taps here");
    eq_cmd->add_option("--out", eq_out, "also write the result as a one-row CSV");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "run a sweep experiment");
    LinkFlags sweep_link;
    sweep_link.attach(*sweep_cmd);
    std::string experiment = "fig5";
    std::vector<std::uint64_t> sweep_seeds;
    std::size_t sweep_symbols = 0;
    std::vector<double> sweep_powers;
    std::string sweep_out = "sweep.csv";
    sweep_cmd->add_option("--experiment", experiment, "fig1|fig3|fig4|fig5|fig7")
        ->check(CLI::IsMember({"fig1", "fig3", "fig4", "fig5", "fig7"}));
    sweep_cmd->add_option("--seed", sweep_seeds, "seed list (repeatable)");
    sweep_cmd->add_option("--symbols", sweep_symbols, "symbols per trial");
    sweep_cmd->add_option("--power", sweep_powers, "power list, dBm (repeatable)");
    sweep_cmd->add_option("--out", sweep_out, "CSV output path");

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "find the operating point");
    std::string cal_preset = "pam6_90g_b2b";
    std::string cal_out = "calibration.conf";
    std::size_t cal_symbols = 150000;
    std::uint64_t cal_seed = 1;
    bool cal_force = false;
    cal_cmd->add_option("--preset", cal_preset, "link preset name")
        ->check(CLI::IsMember(vnle::preset_names()));
    cal_cmd->add_option("--out", cal_out, "cache config path");
    cal_cmd->add_option("--symbols", cal_symbols, "symbols per grid point");
    cal_cmd->add_option("--seed", cal_seed, "trial seed");
    cal_cmd->add_flag("--force", cal_force, "recompute even if cached");

    CLI11_PARSE(app, argc, argv);

    try {
        if (kernels_cmd->parsed()) {
            const vnle::KernelSet set = kset.build();
            vnle::validate(set);
            if (counts_only) {
                const auto cx = vnle::complexity(set);
                std::printf("scheme %s\nN1 %zu\nN2 %zu\nN3 %zu\nmult_count %zu\n",
                            vnle::scheme_name(set.scheme), cx.n1, cx.n2, cx.n3,
                            cx.mult_count);
            } else if (kernels_out.empty()) {
                std::fputs(vnle::to_listing(set).c_str(), stdout);
            } else {
                std::ofstream os(kernels_out, std::ios::binary);
                if (!os) throw std::runtime_error("cannot open " + kernels_out);
                vnle::write_listing(os, set);
                std::printf("wrote %s\n", kernels_out.c_str());
            }
        } else if (sim_cmd->parsed()) {
            vnle::AdaptConfig adapt;
            const vnle::LinkConfig link = sim_link.resolve(adapt);
            const std::vector<int> tx =
                vnle::generate_prms(sim_seed, sim_symbols, link.pam_order);
            const vnle::RealWaveform capture = vnle::run_link(tx, link, sim_seed);
            std::map<std::string, std::string> meta;
            meta["preset"] = sim_link.preset_name;
            meta["prms_seed"] = std::to_string(sim_seed);
            meta["symbols"] = std::to_string(sim_symbols);
            meta["pam_order"] = std::to_string(link.pam_order);
            meta["symbol_rate"] = vnle::detail::csv_num(link.symbol_rate);
            vnle::save_waveform(sim_out, capture, meta);
            std::printf("wrote %s (%zu samples at %.12g Sa/s)\n", sim_out.c_str(),
                        capture.size(), capture.sample_rate);
        } else if (eq_cmd->parsed()) {
            vnle::AdaptConfig adapt;
            vnle::LinkConfig link = eq_link.resolve(adapt);
            const vnle::LoadedWaveform cap = vnle::load_waveform(eq_in);
            if (cap.is_complex) throw std::runtime_error("capture must be real-valued");
            // the capture self-describes its transmit stream
            const auto need = [&](const char* key) -> std::string {
                auto it = cap.meta.find(key);
                if (it == cap.meta.end())
                    throw std::runtime_error(std::string("capture meta missing ") + key);
                return it->second;
            };
            const std::uint64_t prms_seed = std::stoull(need("prms_seed"));
            const std::size_t symbols = std::stoull(need("symbols"));
            link.pam_order = std::stoi(need("pam_order"));
            link.symbol_rate = std::stod(need("symbol_rate"));

            vnle::KernelSet set;
            vnle::RxOptions opts;
            vnle::TapVector pretrained;
            if (!eq_taps_in.empty()) {
                vnle::LoadedTaps lt = vnle::load_taps(eq_taps_in);
                set = std::move(lt.set);
                pretrained = std::move(lt.taps);
                opts.pretrained = &pretrained;
            } else {
                set = eq_set.build();
            }
            const std::vector<int> tx =
                vnle::generate_prms(prms_seed, symbols, link.pam_order);
            const vnle::RxResult r = vnle::run_rx(cap.real, tx, link, set, adapt, opts);
            print_report(r, symbols);
            if (!eq_taps_out.empty()) {
                vnle::save_taps(eq_taps_out, set, r.taps);
                std::printf("taps %s\n", eq_taps_out.c_str());
            }
            if (!eq_out.empty()) {
                vnle::TrialRow row;
                row.experiment = "equalize";
                row.preset = eq_link.preset_name;
                row.scheme = vnle::scheme_name(set.scheme);
                row.m1 = set.M1;
                row.m2 = set.M2;
                row.m3 = set.M3;
                row.d = set.d;
                row.n1 = static_cast<long long>(r.report.n1);
                row.n2 = static_cast<long long>(r.report.n2);
                row.n3 = static_cast<long long>(r.report.n3);
                row.mult_count = static_cast<long long>(r.report.mult_count);
                row.power_dbm = link.pd_input_power_dbm;
                row.seed = prms_seed;
                row.symbols = symbols;
                row.symbol_errors = r.report.symbol_errors;
                row.bit_errors = r.report.bit_errors;
                row.ser = r.report.ser;
                row.ber = r.report.ber;
                vnle::write_csv(eq_out, {row});
                std::printf("wrote %s\n", eq_out.c_str());
            }
        } else if (sweep_cmd->parsed()) {
            vnle::SweepSpec spec = vnle::default_sweep(experiment, sweep_link.preset_name);
            vnle::AdaptConfig adapt;
            spec.link = sweep_link.resolve(adapt);
            spec.adapt = adapt;
            if (!sweep_seeds.empty()) spec.seeds = sweep_seeds;
            if (sweep_symbols > 0) spec.symbols = sweep_symbols;
            if (!sweep_powers.empty()) spec.powers_dbm = sweep_powers;
            spec.out_path = sweep_out;
            const auto rows = vnle::run_sweep(spec);
            std::size_t failed = 0;
            for (const auto& r : rows)
                if (!r.note.empty()) ++failed;
            std::printf("rows %zu\nfailed %zu\nwrote %s\n", rows.size(), failed,
                        sweep_out.c_str());
        } else if (cal_cmd->parsed()) {
            vnle::CalibrateOptions opts;
            opts.cache_path = cal_out;
            opts.symbols = cal_symbols;
            opts.seed = cal_seed;
            opts.force = cal_force;
            const vnle::CalibrationResult res = vnle::calibrate(cal_preset, opts);
            std::printf("mzm_bias %.12g\nvpp %.12g\nber %.12g\ncached %d\n", res.mzm_bias,
                        res.vpp, res.ber, res.from_cache ? 1 : 0);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
