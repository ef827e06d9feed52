#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "adapt.hpp"
#include "linksim.hpp"

namespace vnle {

// insertion order is irrelevant; std::map keeps files byte-stable
using ConfigMap = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double to_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw std::invalid_argument("config: bad number for " + key + ": '" + v + "'");
    return x;
}

inline long long to_int(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw std::invalid_argument("config: bad integer for " + key + ": '" + v + "'");
    return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: bad flag for " + key + ": '" + v + "'");
}

}  // namespace detail

// 'key = value' lines; '#' starts a comment
inline ConfigMap read_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    ConfigMap map;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: " + path + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string val = detail::trim(t.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config: " + path + ":" + std::to_string(lineno) +
                                     ": empty key");
        map[key] = val;
    }
    return map;
}

inline void write_config(const std::string& path, const ConfigMap& map,
                         const std::string& header = "") {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("config: cannot write " + path);
    if (!header.empty()) os << "# " << header << "\n";
    for (const auto& [k, v] : map) os << k << " = " << v << "\n";
}

inline void apply_link_overrides(LinkConfig& cfg, const ConfigMap& map) {
    using namespace detail;
    for (const auto& [k, v] : map) {
        if (k == "symbol_rate") cfg.symbol_rate = to_double(k, v);
        else if (k == "pam_order") cfg.pam_order = static_cast<int>(to_int(k, v));
        else if (k == "dac_rate") cfg.dac_rate = to_double(k, v);
        else if (k == "dac_bw") cfg.dac_bw = to_double(k, v);
        else if (k == "preemphasis") cfg.preemphasis = to_bool(k, v);
        else if (k == "preemphasis_max_gain_db") cfg.preemphasis_max_gain_db = to_double(k, v);
        else if (k == "driver_bw") cfg.driver_bw = to_double(k, v);
        else if (k == "mzm_bw") cfg.mzm_bw = to_double(k, v);
        else if (k == "mzm_vpi") cfg.mzm_vpi = to_double(k, v);
        else if (k == "mzm_bias") cfg.mzm_bias = to_double(k, v);
        else if (k == "vpp") cfg.vpp = to_double(k, v);
        else if (k == "fiber_len_km") cfg.fiber_len_km = to_double(k, v);
        else if (k == "dispersion_ps_nm_km") cfg.dispersion_ps_nm_km = to_double(k, v);
        else if (k == "wavelength_nm") cfg.wavelength_nm = to_double(k, v);
        else if (k == "voa_enable") cfg.voa_enable = to_bool(k, v);
        else if (k == "pd_input_power_dbm") cfg.pd_input_power_dbm = to_double(k, v);
        else if (k == "pd_bw") cfg.pd_bw = to_double(k, v);
        else if (k == "thermal_noise_sigma") cfg.thermal_noise_sigma = to_double(k, v);
        else if (k == "adc_rate") cfg.adc_rate = to_double(k, v);
        else if (k == "adc_bw") cfg.adc_bw = to_double(k, v);
        else if (k == "adc_bits") cfg.adc_bits = static_cast<int>(to_int(k, v));
        else if (k == "analog_rate") cfg.analog_rate = to_double(k, v);
        else throw std::invalid_argument("config: unknown link key '" + k + "'");
    }
}

inline void apply_adapt_overrides(AdaptConfig& cfg, const ConfigMap& map) {
    using namespace detail;
    for (const auto& [k, v] : map) {
        if (k == "mu_train") cfg.mu_train = to_double(k, v);
        else if (k == "mu_dd") cfg.mu_dd = to_double(k, v);
        else if (k == "train_len") cfg.train_len = static_cast<std::size_t>(to_int(k, v));
        else if (k == "dd_len") cfg.dd_len = static_cast<std::size_t>(to_int(k, v));
        else if (k == "normalized") cfg.normalized = to_bool(k, v);
        else if (k == "norm_eps") cfg.norm_eps = to_double(k, v);
        else if (k == "mse_block") cfg.mse_block = static_cast<std::size_t>(to_int(k, v));
        else throw std::invalid_argument("config: unknown adapt key '" + k + "'");
    }
}

// split a combined file into the link portion and the adapt portion
inline void apply_overrides(LinkConfig& link, AdaptConfig& adapt, const ConfigMap& map) {
    ConfigMap link_keys, adapt_keys;
    for (const auto& [k, v] : map) {
        if (k == "mu_train" || k == "mu_dd" || k == "train_len" || k == "dd_len" ||
            k == "normalized" || k == "norm_eps" || k == "mse_block")
            adapt_keys[k] = v;
        else
            link_keys[k] = v;
    }
    apply_link_overrides(link, link_keys);
    apply_adapt_overrides(adapt, adapt_keys);
}

inline ConfigMap link_to_config(const LinkConfig& cfg) {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    ConfigMap map;
    map["symbol_rate"] = num(cfg.symbol_rate);
    map["pam_order"] = std::to_string(cfg.pam_order);
    map["dac_rate"] = num(cfg.dac_rate);
    map["dac_bw"] = num(cfg.dac_bw);
    map["preemphasis"] = cfg.preemphasis ? "1" : "0";
    map["preemphasis_max_gain_db"] = num(cfg.preemphasis_max_gain_db);
    map["driver_bw"] = num(cfg.driver_bw);
    map["mzm_bw"] = num(cfg.mzm_bw);
    map["mzm_vpi"] = num(cfg.mzm_vpi);
    map["mzm_bias"] = num(cfg.mzm_bias);
    map["vpp"] = num(cfg.vpp);
    map["fiber_len_km"] = num(cfg.fiber_len_km);
    map["dispersion_ps_nm_km"] = num(cfg.dispersion_ps_nm_km);
    map["wavelength_nm"] = num(cfg.wavelength_nm);
    map["voa_enable"] = cfg.voa_enable ? "1" : "0";
    map["pd_input_power_dbm"] = num(cfg.pd_input_power_dbm);
    map["pd_bw"] = num(cfg.pd_bw);
    map["thermal_noise_sigma"] = num(cfg.thermal_noise_sigma);
    map["adc_rate"] = num(cfg.adc_rate);
    map["adc_bw"] = num(cfg.adc_bw);
    map["adc_bits"] = std::to_string(cfg.adc_bits);
    map["analog_rate"] = num(cfg.analog_rate);
    return map;
}

}  // namespace vnle
