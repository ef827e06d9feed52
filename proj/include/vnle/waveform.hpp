#pragma once

#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vnle {

template <typename T>
struct Waveform {
    std::vector<T> samples;
    double sample_rate = 0.0;
    double t0 = 0.0;

    std::size_t size() const { return samples.size(); }
    double duration() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

using RealWaveform = Waveform<double>;
using ComplexWaveform = Waveform<std::complex<double>>;

inline ComplexWaveform to_complex(const RealWaveform& w) {
    ComplexWaveform c;
    c.sample_rate = w.sample_rate;
    c.t0 = w.t0;
    c.samples.assign(w.samples.begin(), w.samples.end());
    return c;
}

// ---- file format ----------------------------------------------------------
// Binary: 16-byte header ("VNLEWAVE", u32 version=1, u32 kind 0=real 1=complex),
// u64 sample count, then little-endian doubles (interleaved re/im if complex).
// Sample rate and any extra parameters live in a "<path>.meta" text sidecar
// of "key value" lines; sample_rate is mandatory there.

namespace detail {
constexpr char kWaveMagic[8] = {'V', 'N', 'L', 'E', 'W', 'A', 'V', 'E'};
}

inline void write_meta(const std::string& path, double sample_rate, double t0,
                       const std::map<std::string, std::string>& extra) {
    std::ofstream ms(path);
    if (!ms) throw std::runtime_error("waveform: cannot open " + path);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", sample_rate);
    ms << "sample_rate " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", t0);
    ms << "t0 " << buf << "\n";
    for (const auto& [k, v] : extra) ms << k << " " << v << "\n";
    if (!ms) throw std::runtime_error("waveform: write failed for " + path);
}

template <typename T>
inline void save_waveform(const std::string& path, const Waveform<T>& w,
                          const std::map<std::string, std::string>& extra_meta = {}) {
    static_assert(std::is_same_v<T, double> || std::is_same_v<T, std::complex<double>>);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("waveform: cannot open " + path);
    os.write(detail::kWaveMagic, sizeof detail::kWaveMagic);
    const std::uint32_t version = 1;
    const std::uint32_t kind = std::is_same_v<T, double> ? 0 : 1;
    os.write(reinterpret_cast<const char*>(&version), sizeof version);
    os.write(reinterpret_cast<const char*>(&kind), sizeof kind);
    const std::uint64_t count = w.samples.size();
    os.write(reinterpret_cast<const char*>(&count), sizeof count);
    os.write(reinterpret_cast<const char*>(w.samples.data()),
             static_cast<std::streamsize>(count * sizeof(T)));
    if (!os) throw std::runtime_error("waveform: write failed for " + path);
    write_meta(path + ".meta", w.sample_rate, w.t0, extra_meta);
}

struct LoadedWaveform {
    bool is_complex = false;
    RealWaveform real;
    ComplexWaveform cplx;
    std::map<std::string, std::string> meta;

    double sample_rate() const { return is_complex ? cplx.sample_rate : real.sample_rate; }
    std::size_t size() const { return is_complex ? cplx.size() : real.size(); }
};

inline std::map<std::string, std::string> read_meta(const std::string& path) {
    std::ifstream ms(path);
    if (!ms) throw std::runtime_error("waveform: missing sidecar " + path);
    std::map<std::string, std::string> meta;
    std::string line;
    while (std::getline(ms, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto sp = line.find(' ');
        if (sp == std::string::npos)
            throw std::runtime_error("waveform: malformed sidecar line: " + line);
        meta[line.substr(0, sp)] = line.substr(sp + 1);
    }
    return meta;
}

inline LoadedWaveform load_waveform(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("waveform: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, detail::kWaveMagic, sizeof magic) != 0)
        throw std::runtime_error("waveform: bad magic in " + path);
    std::uint32_t version = 0, kind = 0;
    std::uint64_t count = 0;
    is.read(reinterpret_cast<char*>(&version), sizeof version);
    is.read(reinterpret_cast<char*>(&kind), sizeof kind);
    is.read(reinterpret_cast<char*>(&count), sizeof count);
    if (!is || version != 1 || kind > 1)
        throw std::runtime_error("waveform: unsupported header in " + path);

    LoadedWaveform lw;
    lw.meta = read_meta(path + ".meta");
    const auto it = lw.meta.find("sample_rate");
    if (it == lw.meta.end())
        throw std::runtime_error("waveform: sidecar lacks sample_rate for " + path);
    const double rate = std::stod(it->second);
    double t0 = 0.0;
    if (const auto t = lw.meta.find("t0"); t != lw.meta.end()) t0 = std::stod(t->second);

    lw.is_complex = (kind == 1);
    if (lw.is_complex) {
        lw.cplx.samples.resize(count);
        is.read(reinterpret_cast<char*>(lw.cplx.samples.data()),
                static_cast<std::streamsize>(count * sizeof(std::complex<double>)));
        lw.cplx.sample_rate = rate;
        lw.cplx.t0 = t0;
    } else {
        lw.real.samples.resize(count);
        is.read(reinterpret_cast<char*>(lw.real.samples.data()),
                static_cast<std::streamsize>(count * sizeof(double)));
        lw.real.sample_rate = rate;
        lw.real.t0 = t0;
    }
    if (!is) throw std::runtime_error("waveform: truncated sample data in " + path);
    return lw;
}

}  // namespace vnle
