#pragma once

#include <bit>
#include <cstring>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kernels.hpp"

namespace vnle {

static_assert(std::endian::native == std::endian::little,
              "tap/waveform files are little-endian; big-endian hosts unsupported");

// Coefficients aligned one-to-one with a KernelSet, plus the DC tap.
struct TapVector {
    double dc = 0.0;
    std::vector<double> w1, w2, w3;

    std::size_t size() const { return 1 + w1.size() + w2.size() + w3.size(); }
};

inline TapVector make_taps(const KernelSet& set) {
    TapVector t;
    t.w1.assign(set.n1(), 0.0);
    t.w2.assign(set.n2(), 0.0);
    t.w3.assign(set.n3(), 0.0);
    return t;
}

// Unit linear tap at the window-center lag; the usual adaptation start point.
inline TapVector center_spike_taps(const KernelSet& set) {
    TapVector t = make_taps(set);
    const int center = set.M1 / 2;
    for (std::size_t i = 0; i < set.linear.size(); ++i)
        if (set.linear[i] == center) {
            t.w1[i] = 1.0;
            return t;
        }
    if (!t.w1.empty()) t.w1[t.w1.size() / 2] = 1.0;
    return t;
}

inline std::size_t feature_count(const KernelSet& set) {
    return 1 + set.n1() + set.n2() + set.n3();
}

// Each order's window is centered on the output symbol: the order-n element
// with lag k reads x[p + Mn/2 - k], where p is the symbol's sample position.
// Synchronization absorbs the bulk delay, so the short second/third-order
// windows stay on top of the symbol instead of trailing the linear window.
inline int front_span(const KernelSet& set) {
    int f = 0;
    if (set.M1 > 0) f = std::max(f, set.M1 - 1 - set.M1 / 2);
    if (set.M2 > 0) f = std::max(f, set.M2 - 1 - set.M2 / 2);
    if (set.M3 > 0) f = std::max(f, set.M3 - 1 - set.M3 / 2);
    return f;
}

inline int back_span(const KernelSet& set) {
    return std::max({set.M1 > 0 ? set.M1 / 2 : 0, set.M2 > 0 ? set.M2 / 2 : 0,
                     set.M3 > 0 ? set.M3 / 2 : 0});
}

inline void check_position(std::span<const double> x, const KernelSet& set, std::size_t p) {
    if (static_cast<long>(p) < front_span(set) || p + back_span(set) >= x.size())
        throw std::out_of_range("regressor: window exceeds input bounds");
}

// features[0] is the constant-1 DC feature
inline void make_regressor(std::span<const double> x, std::size_t p, const KernelSet& set,
                           std::span<double> out) {
    if (out.size() != feature_count(set))
        throw std::invalid_argument("regressor: output span has wrong length");
    check_position(x, set, p);
    std::size_t i = 0;
    out[i++] = 1.0;
    const std::size_t a1 = p + static_cast<std::size_t>(set.M1 / 2);
    for (int k : set.linear) out[i++] = x[a1 - static_cast<std::size_t>(k)];
    const std::size_t a2 = p + static_cast<std::size_t>(set.M2 / 2);
    for (const auto& q : set.second)
        out[i++] = x[a2 - static_cast<std::size_t>(q.k1)] * x[a2 - static_cast<std::size_t>(q.k2)];
    const std::size_t a3 = p + static_cast<std::size_t>(set.M3 / 2);
    for (const auto& t : set.third)
        out[i++] = x[a3 - static_cast<std::size_t>(t.k1)] * x[a3 - static_cast<std::size_t>(t.k2)] *
                   x[a3 - static_cast<std::size_t>(t.k3)];
}

inline double evaluate(const TapVector& taps, std::span<const double> features) {
    if (features.size() != taps.size())
        throw std::invalid_argument("evaluate: feature/tap length mismatch");
    double y = taps.dc * features[0];
    std::size_t i = 1;
    for (double w : taps.w1) y += w * features[i++];
    for (double w : taps.w2) y += w * features[i++];
    for (double w : taps.w3) y += w * features[i++];
    return y;
}

// Fused regressor + dot product; avoids materializing features in hot loops.
inline double evaluate_at(const TapVector& taps, const KernelSet& set,
                          std::span<const double> x, std::size_t p) {
    double y = taps.dc;
    const double* base1 = x.data() + p + static_cast<std::size_t>(set.M1 / 2);
    for (std::size_t i = 0; i < set.linear.size(); ++i) y += taps.w1[i] * base1[-set.linear[i]];
    const double* base2 = x.data() + p + static_cast<std::size_t>(set.M2 / 2);
    for (std::size_t i = 0; i < set.second.size(); ++i) {
        const auto& q = set.second[i];
        y += taps.w2[i] * base2[-q.k1] * base2[-q.k2];
    }
    const double* base3 = x.data() + p + static_cast<std::size_t>(set.M3 / 2);
    for (std::size_t i = 0; i < set.third.size(); ++i) {
        const auto& t = set.third[i];
        y += taps.w3[i] * base3[-t.k1] * base3[-t.k2] * base3[-t.k3];
    }
    return y;
}

// One output per symbol on the chosen T/2 sampling phase (0 or 1); outputs
// start once the full window fits, so for phase 0 the count is
// floor((len - memory)/2) + 1.
inline std::vector<double> equalize_sequence(const TapVector& taps, const KernelSet& set,
                                             std::span<const double> x, int phase) {
    if (phase != 0 && phase != 1) throw std::invalid_argument("equalize: phase must be 0 or 1");
    const std::size_t fs = static_cast<std::size_t>(front_span(set));
    const std::size_t bs = static_cast<std::size_t>(back_span(set));
    if (x.size() < fs + bs + 1 + static_cast<std::size_t>(phase))
        throw std::invalid_argument("equalize: input shorter than equalizer memory");
    std::vector<double> y;
    y.reserve((x.size() - fs - bs - phase + 1) / 2);
    for (std::size_t p = fs + static_cast<std::size_t>(phase); p + bs < x.size(); p += 2)
        y.push_back(evaluate_at(taps, set, x, p));
    return y;
}

// ---- tap file I/O ---------------------------------------------------------
// Text header terminated by "end\n", then (1 + N1 + N2 + N3) little-endian
// doubles: dc, then the taps in kernel-set storage order.

struct LoadedTaps {
    KernelSet set;
    TapVector taps;
};

inline void save_taps(const std::string& path, const KernelSet& set, const TapVector& taps) {
    if (taps.w1.size() != set.n1() || taps.w2.size() != set.n2() || taps.w3.size() != set.n3())
        throw std::invalid_argument("save_taps: taps do not match kernel set");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_taps: cannot open " + path);
    os << "vnle taps v1\n";
    os << "scheme " << scheme_name(set.scheme) << "\n";
    os << "M1 " << set.M1 << "\nM2 " << set.M2 << "\nM3 " << set.M3 << "\n";
    os << "d " << set.d << "\n";
    os << "count " << taps.size() << "\n";
    os << "end\n";
    auto put = [&os](double v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); };
    put(taps.dc);
    for (double w : taps.w1) put(w);
    for (double w : taps.w2) put(w);
    for (double w : taps.w3) put(w);
    if (!os) throw std::runtime_error("save_taps: write failed for " + path);
}

inline LoadedTaps load_taps(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_taps: cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line != "vnle taps v1")
        throw std::runtime_error("load_taps: bad header in " + path);
    std::string scheme_str;
    int m1 = -1, m2 = -1, m3 = -1, d = -1;
    std::size_t count = 0;
    while (std::getline(is, line) && line != "end") {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "scheme") ls >> scheme_str;
        else if (key == "M1") ls >> m1;
        else if (key == "M2") ls >> m2;
        else if (key == "M3") ls >> m3;
        else if (key == "d") ls >> d;
        else if (key == "count") ls >> count;
        else throw std::runtime_error("load_taps: unknown header key: " + key);
        if (!ls) throw std::runtime_error("load_taps: malformed header line: " + line);
    }
    if (line != "end") throw std::runtime_error("load_taps: truncated header in " + path);
    LoadedTaps lt;
    lt.set = build_kernel_set(parse_scheme(scheme_str), m1, m2, m3, d);
    lt.taps = make_taps(lt.set);
    if (count != lt.taps.size())
        throw std::runtime_error("load_taps: tap count does not match kernel set");
    auto get = [&is](double& v) { is.read(reinterpret_cast<char*>(&v), sizeof v); };
    get(lt.taps.dc);
    for (double& w : lt.taps.w1) get(w);
    for (double& w : lt.taps.w2) get(w);
    for (double& w : lt.taps.w3) get(w);
    if (!is) throw std::runtime_error("load_taps: truncated tap data in " + path);
    return lt;
}

}  // namespace vnle
