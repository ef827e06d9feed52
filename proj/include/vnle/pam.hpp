#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "rng.hpp"

namespace vnle {

// Equidistant, zero-mean, unit-peak levels: level i = (2i - (L-1))/(L-1).
struct Constellation {
    int order = 0;
    std::vector<double> levels;

    static Constellation make(int order) {
        if (order != 4 && order != 6 && order != 8)
            throw std::invalid_argument("constellation: order must be 4, 6 or 8");
        Constellation c;
        c.order = order;
        c.levels.resize(static_cast<std::size_t>(order));
        for (int i = 0; i < order; ++i)
            c.levels[static_cast<std::size_t>(i)] =
                static_cast<double>(2 * i - (order - 1)) / static_cast<double>(order - 1);
        return c;
    }

    double spacing() const { return 2.0 / static_cast<double>(order - 1); }

    double rms() const {
        double s = 0.0;
        for (double v : levels) s += v * v;
        return std::sqrt(s / static_cast<double>(order));
    }

    // nearest level; exact midpoints resolve to the lower index
    int decide_index(double y) const {
        int best = 0;
        double best_d = std::abs(y - levels[0]);
        for (int i = 1; i < order; ++i) {
            const double d = std::abs(y - levels[static_cast<std::size_t>(i)]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    double decide(double y) const { return levels[static_cast<std::size_t>(decide_index(y))]; }
};

// Pseudo-random symbol stream, uniform over levels.
inline std::vector<int> generate_prms(std::uint64_t seed, std::size_t length, int order) {
    if (order < 2) throw std::invalid_argument("prms: order must be >= 2");
    Rng rng(seed, 0x70726d73ULL);  // distinct substream from link noise
    std::vector<int> out(length);
    for (auto& s : out) s = static_cast<int>(rng.below(static_cast<std::uint64_t>(order)));
    return out;
}

inline std::vector<double> to_levels(std::span<const int> symbols, const Constellation& c) {
    std::vector<double> out(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const int s = symbols[i];
        if (s < 0 || s >= c.order) throw std::out_of_range("to_levels: symbol out of range");
        out[i] = c.levels[static_cast<std::size_t>(s)];
    }
    return out;
}

inline unsigned gray_code(unsigned i) { return i ^ (i >> 1); }

namespace detail {

// PAM6 block code: 5 bits per 2 symbols. 32 of the 36 pairs are used; the
// four pairs with both symbols at an extreme level are not. Codes follow the
// lexicographic order of the used pairs. An unused pair demaps to its nearest
// used pair (ties toward the lexicographically lower one).
struct Pam6Map {
    std::array<std::array<int, 6>, 6> code{};     // -1 for unused pairs
    std::array<std::array<int, 6>, 6> nearest{};  // code of nearest used pair

    Pam6Map() {
        int next = 0;
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) {
                const bool corner = (a == 0 || a == 5) && (b == 0 || b == 5);
                code[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = corner ? -1 : next++;
            }
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b) {
                int best = -1, best_d = 1 << 20;
                for (int u = 0; u < 6; ++u)
                    for (int v = 0; v < 6; ++v) {
                        if (code[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] < 0)
                            continue;
                        const int d = (a - u) * (a - u) + (b - v) * (b - v);
                        if (d < best_d) {
                            best_d = d;
                            best = code[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)];
                        }
                    }
                nearest[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = best;
            }
    }
};

inline const Pam6Map& pam6_map() {
    static const Pam6Map m;
    return m;
}

inline int pam6_pair_code(int a, int b) {
    return pam6_map().nearest[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

}  // namespace detail

struct BerReport {
    std::size_t symbols = 0, symbol_errors = 0;
    std::size_t bits = 0, bit_errors = 0;
    double ser = 0.0, ber = 0.0;
    // kernel bookkeeping, filled by the receiver
    std::size_t n1 = 0, n2 = 0, n3 = 0, mult_count = 0;
};

// Bit counting: Gray mapping for PAM4/PAM8; the 5-bits-per-2-symbols block
// code for PAM6, applied to both streams so an error-free stream gives 0.
inline BerReport count_errors(std::span<const int> tx, std::span<const int> rx, int order) {
    if (tx.size() != rx.size()) throw std::invalid_argument("count_errors: length mismatch");
    BerReport r;
    r.symbols = tx.size();
    for (std::size_t i = 0; i < tx.size(); ++i)
        if (tx[i] != rx[i]) ++r.symbol_errors;
    if (order == 6) {
        const std::size_t pairs = tx.size() / 2;
        r.bits = pairs * 5;
        for (std::size_t i = 0; i + 1 < tx.size(); i += 2) {
            const unsigned ca =
                static_cast<unsigned>(detail::pam6_pair_code(tx[i], tx[i + 1]));
            const unsigned cb =
                static_cast<unsigned>(detail::pam6_pair_code(rx[i], rx[i + 1]));
            r.bit_errors += static_cast<std::size_t>(std::popcount(ca ^ cb));
        }
    } else if (order == 4 || order == 8) {
        const std::size_t bps = (order == 4) ? 2 : 3;
        r.bits = tx.size() * bps;
        for (std::size_t i = 0; i < tx.size(); ++i) {
            const unsigned d = gray_code(static_cast<unsigned>(tx[i])) ^
                               gray_code(static_cast<unsigned>(rx[i]));
            r.bit_errors += static_cast<std::size_t>(std::popcount(d));
        }
    } else {
        throw std::invalid_argument("count_errors: unsupported order");
    }
    r.ser = r.symbols ? static_cast<double>(r.symbol_errors) / static_cast<double>(r.symbols) : 0.0;
    r.ber = r.bits ? static_cast<double>(r.bit_errors) / static_cast<double>(r.bits) : 0.0;
    return r;
}

}  // namespace vnle
