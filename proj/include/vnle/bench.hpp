#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "kernels.hpp"
#include "linksim.hpp"
#include "pam.hpp"
#include "rxdsp.hpp"
#include "svgplot.hpp"

namespace vnle {

// One Monte-Carlo trial: modulate, run the link, recover, count.
inline RxResult run_trial(const LinkConfig& link, const KernelSet& set, std::uint64_t seed,
                          std::size_t symbols, const AdaptConfig& adapt_cfg) {
    const std::vector<int> tx = generate_prms(seed, symbols, link.pam_order);
    const RealWaveform capture = run_link(tx, link, seed);
    return run_rx(capture, tx, link, set, adapt_cfg);
}

struct TrialRow {
    std::string experiment;
    std::string preset;
    std::string scheme;
    int m1 = 0, m2 = 0, m3 = 0;
    int d = -1;  // -1 prints as empty (spacing not applicable)
    long long n1 = 0, n2 = 0, n3 = 0, mult_count = 0;
    std::optional<double> power_dbm;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> symbols;
    std::optional<std::size_t> symbol_errors;
    std::optional<std::size_t> bit_errors;
    std::optional<double> ser;
    std::optional<double> ber;
    std::string note;
};

inline const char* csv_header() {
    return "experiment,preset,scheme,M1,M2,M3,d,N1,N2,N3,mult_count,power_dbm,seed,"
           "symbols,symbol_errors,bit_errors,ser,ber,note";
}

namespace detail {

inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string csv_sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return out;
}

}  // namespace detail

inline std::string format_row(const TrialRow& r) {
    std::string s;
    auto add = [&](const std::string& f) {
        s += f;
        s += ',';
    };
    add(r.experiment);
    add(r.preset);
    add(r.scheme);
    add(std::to_string(r.m1));
    add(std::to_string(r.m2));
    add(std::to_string(r.m3));
    add(r.d >= 0 ? std::to_string(r.d) : "");
    add(std::to_string(r.n1));
    add(std::to_string(r.n2));
    add(std::to_string(r.n3));
    add(std::to_string(r.mult_count));
    add(r.power_dbm ? detail::csv_num(*r.power_dbm) : "");
    add(r.seed ? std::to_string(*r.seed) : "");
    add(r.symbols ? std::to_string(*r.symbols) : "");
    add(r.symbol_errors ? std::to_string(*r.symbol_errors) : "");
    add(r.bit_errors ? std::to_string(*r.bit_errors) : "");
    add(r.ser ? detail::csv_num(*r.ser) : "");
    add(r.ber ? detail::csv_num(*r.ber) : "");
    s += detail::csv_sanitize(r.note);
    return s;
}

inline void write_csv(const std::string& path, const std::vector<TrialRow>& rows) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_csv: cannot open " + path);
    os << csv_header() << "\n";
    for (const auto& r : rows) os << format_row(r) << "\n";
}

struct SweepSpec {
    std::string experiment;  // fig1 | fig3 | fig4 | fig5 | fig7
    std::string preset = "pam6_90g_b2b";
    std::vector<int> m1_list{120};
    std::vector<int> m2_list{6};
    std::vector<int> m3_list;
    int d_fixed = -1;  // < 0 applies the half rule d = ceil(M3/2)
    std::vector<Scheme> schemes;
    std::vector<double> powers_dbm;  // empty: preset's pd_input_power_dbm
    std::vector<std::uint64_t> seeds{1};
    std::size_t symbols = 1000000;
    std::string out_path;  // CSV destination; the SVG lands next to it
    LinkConfig link;       // resolved from preset, then overridden by caller
    AdaptConfig adapt;
};

inline int spacing_for(const SweepSpec& spec, int m3) {
    if (spec.d_fixed >= 0) return spec.d_fixed;
    return (m3 + 1) / 2;
}

inline SweepSpec default_sweep(const std::string& experiment, const std::string& preset_name) {
    SweepSpec s;
    s.experiment = experiment;
    s.preset = preset_name;
    s.link = preset(preset_name);
    if (experiment == "fig1") {
        s.schemes = {Scheme::full, Scheme::polynomial, Scheme::two_sam, Scheme::ri_d,
                     Scheme::combined};
        for (int m3 = 3; m3 <= 15; ++m3) s.m3_list.push_back(m3);
    } else if (experiment == "fig3") {
        s.schemes = {Scheme::full};
        for (int m3 = 0; m3 <= 9; ++m3) s.m3_list.push_back(m3);
    } else if (experiment == "fig4") {
        s.m3_list = {9};
        s.powers_dbm = {-2, 0, 2, 4, 6};
    } else if (experiment == "fig5") {
        s.schemes = {Scheme::full, Scheme::polynomial, Scheme::two_sam, Scheme::ri_d,
                     Scheme::combined};
        s.m3_list = {2, 4, 6, 8, 10, 12};
    } else if (experiment == "fig7") {
        s.m3_list = {9, 10};
        s.powers_dbm = {-2, 0, 2, 4, 6};
    } else {
        throw std::invalid_argument("unknown experiment '" + experiment + "'");
    }
    return s;
}

namespace detail {

struct SweepTask {
    std::string label;  // series key in the plot
    KernelSet set;
    std::optional<double> power_dbm;
    std::optional<std::uint64_t> seed;
    bool simulate = true;
    double x = 0.0;  // plot abscissa
};

inline void push_sim_points(const SweepSpec& spec, std::vector<SweepTask>& tasks,
                            const std::string& label, const KernelSet& set, double x_count) {
    const bool power_axis = !spec.powers_dbm.empty();
    const std::vector<double> powers =
        power_axis ? spec.powers_dbm : std::vector<double>{spec.link.pd_input_power_dbm};
    for (double p : powers)
        for (std::uint64_t seed : spec.seeds) {
            SweepTask t;
            t.label = label;
            t.set = set;
            t.power_dbm = p;
            t.seed = seed;
            t.x = power_axis ? p : x_count;
            tasks.push_back(std::move(t));
        }
}

inline std::vector<SweepTask> expand_tasks(const SweepSpec& spec) {
    if (spec.m1_list.empty() || spec.m2_list.empty() || spec.m3_list.empty())
        throw std::invalid_argument("sweep: empty parameter range");
    std::vector<SweepTask> tasks;
    const int m1 = spec.m1_list.front();
    const int m2 = spec.m2_list.front();

    if (spec.experiment == "fig1") {
        for (Scheme sc : spec.schemes)
            for (int m3 : spec.m3_list) {
                SweepTask t;
                t.label = scheme_name(sc);
                const bool spaced = sc == Scheme::ri_d || sc == Scheme::combined;
                t.set = build_kernel_set(sc, m1, m2, m3,
                                         spaced ? spacing_for(spec, m3) : -1);
                t.simulate = false;
                t.x = m3;
                tasks.push_back(std::move(t));
            }
        return tasks;
    }
    if (spec.experiment == "fig4") {
        const int m3 = spec.m3_list.front();
        push_sim_points(spec, tasks, "ffe", build_full(m1, 0, 0), 0);
        push_sim_points(spec, tasks, "second_order", build_full(m1, m2, 0), 0);
        push_sim_points(spec, tasks, "third_order", build_full(m1, m2, m3), 0);
        return tasks;
    }
    if (spec.experiment == "fig7") {
        if (spec.m3_list.size() < 2)
            throw std::invalid_argument("fig7 needs two M3 entries (full, combined)");
        const int m3_full = spec.m3_list[0];
        const int m3_comb = spec.m3_list[1];
        const int d = spec.d_fixed >= 0 ? spec.d_fixed : (m3_comb + 1) / 2;
        push_sim_points(spec, tasks, "full_m" + std::to_string(m3_full),
                        build_full(m1, m2, m3_full), 0);
        push_sim_points(spec, tasks,
                        "combined_m" + std::to_string(m3_comb) + "_d" + std::to_string(d),
                        build_kernel_set(Scheme::combined, m1, m2, m3_comb, d), 0);
        return tasks;
    }
    // fig3 and fig5 sweep kernel count on the x axis
    for (Scheme sc : spec.schemes)
        for (int m1v : spec.m1_list)
            for (int m2v : spec.m2_list)
                for (int m3 : spec.m3_list) {
                    const bool spaced = sc == Scheme::ri_d || sc == Scheme::combined;
                    KernelSet set = build_kernel_set(sc, m1v, m2v, m3,
                                                     spaced ? spacing_for(spec, m3) : -1);
                    const double x = static_cast<double>(set.n3());
                    push_sim_points(spec, tasks, scheme_name(sc), set, x);
                }
    return tasks;
}

// fixed-slot fan-out; result order never depends on the worker count
inline void parallel_run(std::size_t count, const std::function<void(std::size_t)>& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const std::size_t workers = std::min<std::size_t>(std::max(1u, hw), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace detail

inline std::vector<TrialRow> run_sweep(const SweepSpec& spec) {
    const std::vector<detail::SweepTask> tasks = detail::expand_tasks(spec);
    std::vector<TrialRow> rows(tasks.size());

    detail::parallel_run(tasks.size(), [&](std::size_t i) {
        const detail::SweepTask& task = tasks[i];
        TrialRow& row = rows[i];
        row.experiment = spec.experiment;
        row.preset = spec.preset;
        row.scheme = scheme_name(task.set.scheme);
        row.m1 = task.set.M1;
        row.m2 = task.set.M2;
        row.m3 = task.set.M3;
        row.d = task.set.d;
        const ComplexityReport cx = complexity(task.set);
        row.n1 = cx.n1;
        row.n2 = cx.n2;
        row.n3 = cx.n3;
        row.mult_count = cx.mult_count;
        if (!task.simulate) return;

        row.power_dbm = task.power_dbm;
        row.seed = task.seed;
        row.symbols = spec.symbols;
        LinkConfig link = spec.link;
        if (task.power_dbm) link.pd_input_power_dbm = *task.power_dbm;
        try {
            const RxResult rx =
                run_trial(link, task.set, *task.seed, spec.symbols, spec.adapt);
            row.symbol_errors = rx.report.symbol_errors;
            row.bit_errors = rx.report.bit_errors;
            row.ser = rx.report.ser;
            row.ber = rx.report.ber;
        } catch (const std::exception& e) {
            row.note = e.what();  // sweep carries on; the row records the failure
        }
    });

    if (!spec.out_path.empty()) {
        write_csv(spec.out_path, rows);

        LinePlot plot;
        plot.title = spec.experiment + " (" + spec.preset + ")";
        const bool counts_plot = spec.experiment == "fig1";
        const bool power_axis = !spec.powers_dbm.empty();
        plot.x_label = counts_plot ? "third-order memory M3"
                                   : (power_axis ? "PD input power (dBm)"
                                                 : "third-order kernel count N3");
        plot.y_label = counts_plot ? "third-order kernel count N3" : "BER";
        plot.log_y = !counts_plot;
        if (!counts_plot) plot.hlines.push_back({"KP4 threshold", 2.4e-4});

        // one series per label, averaging BER over seeds at each x
        std::vector<std::string> labels;
        for (const auto& t : tasks)
            if (std::find(labels.begin(), labels.end(), t.label) == labels.end())
                labels.push_back(t.label);
        for (const auto& label : labels) {
            Series s;
            s.label = label;
            std::vector<double> xs;
            for (std::size_t i = 0; i < tasks.size(); ++i)
                if (tasks[i].label == label &&
                    std::find(xs.begin(), xs.end(), tasks[i].x) == xs.end())
                    xs.push_back(tasks[i].x);
            for (double x : xs) {
                double acc = 0.0;
                std::size_t cnt = 0;
                for (std::size_t i = 0; i < tasks.size(); ++i) {
                    if (tasks[i].label != label || tasks[i].x != x) continue;
                    if (counts_plot) {
                        acc = static_cast<double>(rows[i].n3);
                        cnt = 1;
                        break;
                    }
                    if (rows[i].ber) {
                        acc += *rows[i].ber;
                        ++cnt;
                    }
                }
                if (cnt == 0) continue;
                s.x.push_back(x);
                s.y.push_back(acc / static_cast<double>(cnt));
            }
            if (!s.x.empty()) plot.series.push_back(std::move(s));
        }
        std::string svg_path = spec.out_path;
        const std::size_t dot = svg_path.rfind('.');
        if (dot != std::string::npos && svg_path.find('/', dot) == std::string::npos)
            svg_path.erase(dot);
        save_svg(svg_path + ".svg", plot);
    }
    return rows;
}

struct CalibrateOptions {
    std::vector<double> bias_frac{-0.6, -0.5, -0.4, -0.3};  // of vpi
    std::vector<double> vpp_frac{0.6, 0.8, 1.0, 1.2, 1.4, 1.6};
    std::size_t symbols = 150000;
    std::uint64_t seed = 1;
    int m1 = 120, m2 = 6, m3 = 9;  // the reference full equalizer
    std::string cache_path;        // empty disables the cache
    bool force = false;
    AdaptConfig adapt;
};

struct CalibrationResult {
    double mzm_bias = 0.0;
    double vpp = 0.0;
    double ber = 0.0;
    bool from_cache = false;
};

inline void apply_calibration(LinkConfig& link, const CalibrationResult& cal) {
    link.mzm_bias = cal.mzm_bias;
    link.vpp = cal.vpp;
}

// Operating-point search over bias and swing, judged by the reference full
// equalizer's BER. Ties keep the first grid point scanned (bias outer, vpp
// inner, both ascending). The result is cached per preset.
inline CalibrationResult calibrate(const std::string& preset_name,
                                   const CalibrateOptions& opts = {}) {
    if (!opts.cache_path.empty() && !opts.force &&
        std::filesystem::exists(opts.cache_path)) {
        const ConfigMap map = read_config(opts.cache_path);
        const auto pit = map.find("preset");
        if (pit != map.end() && pit->second == preset_name && map.count("mzm_bias") &&
            map.count("vpp")) {
            CalibrationResult res;
            res.mzm_bias = detail::to_double("mzm_bias", map.at("mzm_bias"));
            res.vpp = detail::to_double("vpp", map.at("vpp"));
            res.ber = map.count("ber") ? detail::to_double("ber", map.at("ber")) : 0.0;
            res.from_cache = true;
            return res;
        }
    }

    const LinkConfig base = preset(preset_name);
    if (opts.bias_frac.empty() || opts.vpp_frac.empty())
        throw std::invalid_argument("calibrate: empty grid");
    const KernelSet set = build_full(opts.m1, opts.m2, opts.m3);

    struct Point {
        double bias, vpp;
    };
    std::vector<Point> grid;
    for (double b : opts.bias_frac)
        for (double v : opts.vpp_frac) grid.push_back({b * base.mzm_vpi, v * base.mzm_vpi});

    std::vector<double> bers(grid.size(), std::numeric_limits<double>::infinity());
    detail::parallel_run(grid.size(), [&](std::size_t i) {
        LinkConfig link = base;
        link.mzm_bias = grid[i].bias;
        link.vpp = grid[i].vpp;
        try {
            bers[i] = run_trial(link, set, opts.seed, opts.symbols, opts.adapt).report.ber;
        } catch (const std::exception&) {
            // unstable corner of the grid; stays at infinity
        }
    });

    std::size_t best = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::isfinite(bers[i]) && (best == grid.size() || bers[i] < bers[best]))
            best = i;
    if (best == grid.size())
        throw std::runtime_error("calibrate: every grid point failed");

    CalibrationResult res;
    res.mzm_bias = grid[best].bias;
    res.vpp = grid[best].vpp;
    res.ber = bers[best];

    if (!opts.cache_path.empty()) {
        ConfigMap map;
        map["preset"] = preset_name;
        map["mzm_bias"] = detail::csv_num(res.mzm_bias);
        map["vpp"] = detail::csv_num(res.vpp);
        map["ber"] = detail::csv_num(res.ber);
        map["symbols"] = std::to_string(opts.symbols);
        map["seed"] = std::to_string(opts.seed);
        write_config(opts.cache_path, map, "calibrated operating point");
    }
    return res;
}

}  // namespace vnle
