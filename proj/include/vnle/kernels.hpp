#pragma once

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vnle {

// Third-order term x(k-k1)*x(k-k2)*x(k-k3); lags stored in canonical
// nondecreasing order so each product appears exactly once.
struct KernelIndex3 {
    int k1 = 0, k2 = 0, k3 = 0;
    friend bool operator==(const KernelIndex3&, const KernelIndex3&) = default;
};

struct KernelIndex2 {
    int k1 = 0, k2 = 0;
    friend bool operator==(const KernelIndex2&, const KernelIndex2&) = default;
};

enum class Scheme { full, polynomial, two_sam, ri_d, combined };

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::full: return "full";
        case Scheme::polynomial: return "polynomial";
        case Scheme::two_sam: return "two_sam";
        case Scheme::ri_d: return "ri_d";
        case Scheme::combined: return "combined";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "full") return Scheme::full;
    if (s == "polynomial") return Scheme::polynomial;
    if (s == "two_sam") return Scheme::two_sam;
    if (s == "ri_d") return Scheme::ri_d;
    if (s == "combined") return Scheme::combined;
    throw std::invalid_argument("unknown scheme: " + s);
}

// ---- closed-form kernel counts -------------------------------------------

inline std::size_t full_third_count(int m3) {
    return static_cast<std::size_t>(m3) * (m3 + 1) * (m3 + 2) / 6;
}

inline std::size_t polynomial_third_count(int m3) { return static_cast<std::size_t>(m3); }

inline std::size_t two_sam_third_count(int m3) {
    return static_cast<std::size_t>(m3) * static_cast<std::size_t>(m3);
}

// d clamps at M3-1, where the spacing constraint stops binding
inline std::size_t ri_d_third_count(int m3, int d) {
    if (m3 <= 0) return 0;
    const long long dc = std::min<long long>(d, m3 - 1);
    return static_cast<std::size_t>((dc + 1) * (dc + 2) * (3LL * m3 - 2 * dc) / 6);
}

inline std::size_t combined_third_count(int m3, int d) {
    if (m3 <= 0) return 0;
    const long long dc = std::min<long long>(d, m3 - 1);
    return static_cast<std::size_t>(2 * dc * m3 - dc * (dc + 1) + m3);
}

inline std::size_t second_order_count(int m2) {
    return static_cast<std::size_t>(m2) * (m2 + 1) / 2;
}

// ---- index-list builders --------------------------------------------------

inline std::vector<KernelIndex3> build_full_third(int m3) {
    std::vector<KernelIndex3> out;
    out.reserve(full_third_count(std::max(m3, 0)));
    for (int k1 = 0; k1 < m3; ++k1)
        for (int k2 = k1; k2 < m3; ++k2)
            for (int k3 = k2; k3 < m3; ++k3) out.push_back({k1, k2, k3});
    return out;
}

inline std::vector<KernelIndex3> build_polynomial_third(int m3) {
    std::vector<KernelIndex3> out;
    out.reserve(std::max(m3, 0));
    for (int k = 0; k < m3; ++k) out.push_back({k, k, k});
    return out;
}

// terms using at most two distinct lags: (a,a,b) with b>=a and (a,b,b) with b>a
inline std::vector<KernelIndex3> build_two_sam_third(int m3) {
    std::vector<KernelIndex3> out;
    out.reserve(two_sam_third_count(std::max(m3, 0)));
    for (int k1 = 0; k1 < m3; ++k1)
        for (int k2 = k1; k2 < m3; ++k2) {
            if (k2 == k1) {
                for (int k3 = k1; k3 < m3; ++k3) out.push_back({k1, k1, k3});
            } else {
                out.push_back({k1, k2, k2});
            }
        }
    return out;
}

// restricted-interval: total lag spread k3-k1 bounded by d
inline std::vector<KernelIndex3> build_ri_d_third(int m3, int d) {
    std::vector<KernelIndex3> out;
    out.reserve(ri_d_third_count(std::max(m3, 0), d));
    for (int k1 = 0; k1 < m3; ++k1) {
        const int hi = std::min(m3 - 1, k1 + d);
        for (int k2 = k1; k2 <= hi; ++k2)
            for (int k3 = k2; k3 <= hi; ++k3) out.push_back({k1, k2, k3});
    }
    return out;
}

inline std::vector<KernelIndex3> build_combined_third(int m3, int d) {
    std::vector<KernelIndex3> out;
    out.reserve(combined_third_count(std::max(m3, 0), d));
    for (int k1 = 0; k1 < m3; ++k1) {
        const int hi = std::min(m3 - 1, k1 + d);
        for (int k2 = k1; k2 <= hi; ++k2) {
            if (k2 == k1) {
                for (int k3 = k1; k3 <= hi; ++k3) out.push_back({k1, k1, k3});
            } else {
                out.push_back({k1, k2, k2});
            }
        }
    }
    return out;
}

// ---- kernel set -----------------------------------------------------------

struct KernelSet {
    Scheme scheme = Scheme::full;
    int M1 = 0, M2 = 0, M3 = 0;
    int d = -1;  // meaningful for ri_d/combined only
    std::vector<int> linear;
    std::vector<KernelIndex2> second;
    std::vector<KernelIndex3> third;

    std::size_t n1() const { return linear.size(); }
    std::size_t n2() const { return second.size(); }
    std::size_t n3() const { return third.size(); }

    // largest tap count across orders; window span of the regressor
    int memory() const { return std::max({M1, M2, M3}); }
};

struct ComplexityReport {
    std::size_t n1 = 0, n2 = 0, n3 = 0;
    std::size_t mult_count = 0;
};

// 1 multiply per linear term, 2 per quadratic, 3 per cubic
inline ComplexityReport complexity(const KernelSet& set) {
    ComplexityReport r;
    r.n1 = set.n1();
    r.n2 = set.n2();
    r.n3 = set.n3();
    r.mult_count = r.n1 + 2 * r.n2 + 3 * r.n3;
    return r;
}

inline KernelSet build_kernel_set(Scheme scheme, int m1, int m2, int m3, int d = -1) {
    if (m1 < 1) throw std::invalid_argument("kernel set: M1 must be >= 1");
    if (m2 < 0 || m3 < 0) throw std::invalid_argument("kernel set: negative memory length");
    const bool uses_d = (scheme == Scheme::ri_d || scheme == Scheme::combined);
    if (uses_d && d < 0)
        throw std::invalid_argument("kernel set: scheme requires tap spacing d >= 0");

    KernelSet set;
    set.scheme = scheme;
    set.M1 = m1;
    set.M2 = m2;
    set.M3 = m3;
    set.d = uses_d ? d : -1;
    set.linear.resize(static_cast<std::size_t>(m1));
    for (int k = 0; k < m1; ++k) set.linear[static_cast<std::size_t>(k)] = k;
    set.second.reserve(second_order_count(m2));
    for (int k1 = 0; k1 < m2; ++k1)
        for (int k2 = k1; k2 < m2; ++k2) set.second.push_back({k1, k2});
    switch (scheme) {
        case Scheme::full: set.third = build_full_third(m3); break;
        case Scheme::polynomial: set.third = build_polynomial_third(m3); break;
        case Scheme::two_sam: set.third = build_two_sam_third(m3); break;
        case Scheme::ri_d: set.third = build_ri_d_third(m3, d); break;
        case Scheme::combined: set.third = build_combined_third(m3, d); break;
    }
    return set;
}

inline KernelSet build_full(int m1, int m2, int m3) {
    return build_kernel_set(Scheme::full, m1, m2, m3);
}

// Checks every structural invariant; throws on the first violation.
inline void validate(const KernelSet& set) {
    if (set.M1 < 1) throw std::logic_error("kernel set: M1 < 1");
    for (std::size_t i = 0; i < set.linear.size(); ++i) {
        const int k = set.linear[i];
        if (k < 0 || k >= set.M1) throw std::logic_error("kernel set: linear lag out of range");
        for (std::size_t j = i + 1; j < set.linear.size(); ++j)
            if (set.linear[j] == k) throw std::logic_error("kernel set: duplicate linear lag");
    }
    for (const auto& p : set.second) {
        if (p.k1 < 0 || p.k2 < p.k1 || p.k2 >= set.M2)
            throw std::logic_error("kernel set: bad second-order index");
    }
    for (std::size_t i = 0; i < set.second.size(); ++i)
        for (std::size_t j = i + 1; j < set.second.size(); ++j)
            if (set.second[i] == set.second[j])
                throw std::logic_error("kernel set: duplicate second-order index");
    for (const auto& t : set.third) {
        if (t.k1 < 0 || t.k2 < t.k1 || t.k3 < t.k2 || t.k3 >= set.M3)
            throw std::logic_error("kernel set: bad third-order index");
        if (set.scheme == Scheme::ri_d || set.scheme == Scheme::combined)
            if (t.k3 - t.k1 > set.d) throw std::logic_error("kernel set: spacing above d");
        const int distinct = 1 + (t.k2 != t.k1 ? 1 : 0) + (t.k3 != t.k2 ? 1 : 0);
        if (set.scheme == Scheme::polynomial && distinct != 1)
            throw std::logic_error("kernel set: polynomial term with mixed lags");
        if ((set.scheme == Scheme::two_sam || set.scheme == Scheme::combined) && distinct > 2)
            throw std::logic_error("kernel set: more than two distinct lags");
    }
    for (std::size_t i = 0; i < set.third.size(); ++i)
        for (std::size_t j = i + 1; j < set.third.size(); ++j)
            if (set.third[i] == set.third[j])
                throw std::logic_error("kernel set: duplicate third-order index");
}

// ---- text listing ---------------------------------------------------------

inline void write_listing(std::ostream& os, const KernelSet& set) {
    os << "# vnle kernels v1\n";
    os << "scheme " << scheme_name(set.scheme) << "\n";
    os << "M1 " << set.M1 << "\nM2 " << set.M2 << "\nM3 " << set.M3 << "\n";
    os << "d " << set.d << "\n";
    os << "[linear] " << set.n1() << "\n";
    for (int k : set.linear) os << k << "\n";
    os << "[second] " << set.n2() << "\n";
    for (const auto& p : set.second) os << p.k1 << " " << p.k2 << "\n";
    os << "[third] " << set.n3() << "\n";
    for (const auto& t : set.third) os << t.k1 << " " << t.k2 << " " << t.k3 << "\n";
}

inline std::string to_listing(const KernelSet& set) {
    std::ostringstream os;
    write_listing(os, set);
    return os.str();
}

}  // namespace vnle
