#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vnle {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct HLine {
    std::string label;
    double y = 0.0;
};

// Minimal self-contained SVG line chart. Log-scale y skips non-positive
// points rather than clamping them.
struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<Series> series;
    std::vector<HLine> hlines;
    int width = 860;
    int height = 540;
};

namespace detail {

inline std::string fmt_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

inline const char* plot_color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

// ticks at 1-2-5 steps covering [lo, hi]
inline std::vector<double> linear_ticks(double lo, double hi) {
    std::vector<double> t;
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    double step = std::pow(10.0, std::floor(std::log10(span / 5.0)));
    if (span / step > 10.0) step *= 2.0;
    if (span / step > 10.0) step *= 2.5;
    if (span / step > 10.0) step *= 2.0;
    const double first = std::ceil(lo / step - 1e-9) * step;
    for (double v = first; v <= hi + step * 1e-9; v += step) t.push_back(v);
    return t;
}

}  // namespace detail

inline std::string render_svg(const LinePlot& plot) {
    const double ml = 86, mr = 24, mt = 48, mb = 64;
    const double pw = plot.width - ml - mr;
    const double ph = plot.height - mt - mb;

    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool have = false;
    auto fold_point = [&](double px, double py) {
        if (!std::isfinite(px) || !std::isfinite(py)) return;
        if (plot.log_y && py <= 0.0) return;
        const double fy = plot.log_y ? std::log10(py) : py;
        if (!have) {
            xmin = xmax = px;
            ymin = ymax = fy;
            have = true;
        } else {
            xmin = std::min(xmin, px);
            xmax = std::max(xmax, px);
            ymin = std::min(ymin, fy);
            ymax = std::max(ymax, fy);
        }
    };
    for (const auto& s : plot.series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            fold_point(s.x[i], s.y[i]);
    for (const auto& h : plot.hlines)
        if (!plot.log_y || h.y > 0.0)
            fold_point(have ? xmin : 0.0, h.y);
    if (!have) {
        xmin = 0;
        xmax = 1;
        ymin = plot.log_y ? -1 : 0;
        ymax = plot.log_y ? 0 : 1;
    }
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double ypad = 0.06 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double v) {
        const double fv = plot.log_y ? std::log10(v) : v;
        return mt + ph - (fv - ymin) / (ymax - ymin) * ph;
    };

    std::string svg;
    char buf[512];
    auto add = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof(buf), fmt, args...);
        svg += buf;
    };

    add("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
        "viewBox=\"0 0 %d %d\" font-family=\"Helvetica,Arial,sans-serif\">\n",
        plot.width, plot.height, plot.width, plot.height);
    add("<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n", plot.width, plot.height);
    add("<text x=\"%g\" y=\"26\" font-size=\"17\" text-anchor=\"middle\">%s</text>\n",
        ml + pw / 2, detail::xml_escape(plot.title).c_str());

    // gridlines and tick labels
    if (plot.log_y) {
        const int d0 = static_cast<int>(std::floor(ymin));
        const int d1 = static_cast<int>(std::ceil(ymax));
        for (int d = d0; d <= d1; ++d) {
            const double yy = mt + ph - (d - ymin) / (ymax - ymin) * ph;
            if (yy < mt - 1 || yy > mt + ph + 1) continue;
            add("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#ddd\"/>\n", ml, yy,
                ml + pw, yy);
            add("<text x=\"%g\" y=\"%g\" font-size=\"12\" text-anchor=\"end\">1e%d</text>\n",
                ml - 8, yy + 4, d);
            for (int m = 2; m <= 9 && d < d1; ++m) {
                const double fv = d + std::log10(static_cast<double>(m));
                if (fv < ymin || fv > ymax) continue;
                const double ym = mt + ph - (fv - ymin) / (ymax - ymin) * ph;
                add("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#f2f2f2\"/>\n",
                    ml, ym, ml + pw, ym);
            }
        }
    } else {
        for (double v : detail::linear_ticks(ymin, ymax)) {
            const double yy = mt + ph - (v - ymin) / (ymax - ymin) * ph;
            add("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#ddd\"/>\n", ml, yy,
                ml + pw, yy);
            add("<text x=\"%g\" y=\"%g\" font-size=\"12\" text-anchor=\"end\">%s</text>\n",
                ml - 8, yy + 4, detail::fmt_num(v).c_str());
        }
    }
    for (double v : detail::linear_ticks(xmin, xmax)) {
        const double xx = sx(v);
        add("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#ddd\"/>\n", xx, mt, xx,
            mt + ph);
        add("<text x=\"%g\" y=\"%g\" font-size=\"12\" text-anchor=\"middle\">%s</text>\n", xx,
            mt + ph + 20, detail::fmt_num(v).c_str());
    }

    add("<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
        "stroke=\"#444\"/>\n",
        ml, mt, pw, ph);
    add("<text x=\"%g\" y=\"%g\" font-size=\"14\" text-anchor=\"middle\">%s</text>\n",
        ml + pw / 2, mt + ph + 46, detail::xml_escape(plot.x_label).c_str());
    add("<text x=\"%g\" y=\"%g\" font-size=\"14\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 %g %g)\">%s</text>\n",
        24.0, mt + ph / 2, 24.0, mt + ph / 2, detail::xml_escape(plot.y_label).c_str());

    for (const auto& h : plot.hlines) {
        if (plot.log_y && h.y <= 0.0) continue;
        const double yy = sy(h.y);
        if (yy < mt || yy > mt + ph) continue;
        add("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"#555\" "
            "stroke-dasharray=\"7,4\"/>\n",
            ml, yy, ml + pw, yy);
        if (!h.label.empty())
            add("<text x=\"%g\" y=\"%g\" font-size=\"12\" fill=\"#555\">%s</text>\n", ml + 6,
                yy - 5, detail::xml_escape(h.label).c_str());
    }

    for (std::size_t si = 0; si < plot.series.size(); ++si) {
        const auto& s = plot.series[si];
        const char* col = detail::plot_color(si);
        std::string pts;
        std::vector<std::pair<double, double>> marks;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (plot.log_y && s.y[i] <= 0.0) continue;
            const double xx = sx(s.x[i]), yy = sy(s.y[i]);
            char pb[64];
            std::snprintf(pb, sizeof(pb), "%.2f,%.2f ", xx, yy);
            pts += pb;
            marks.emplace_back(xx, yy);
        }
        if (!pts.empty())
            add("<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" stroke-width=\"1.8\"/>\n",
                pts.c_str(), col);
        for (auto [xx, yy] : marks)
            add("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", xx, yy, col);
        const double ly = mt + 16 + 18.0 * static_cast<double>(si);
        add("<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" "
            "stroke-width=\"1.8\"/>\n",
            ml + pw - 150, ly, ml + pw - 122, ly, col);
        add("<text x=\"%g\" y=\"%g\" font-size=\"12\">%s</text>\n", ml + pw - 114, ly + 4,
            detail::xml_escape(s.label).c_str());
    }

    svg += "</svg>\n";
    return svg;
}

inline void save_svg(const std::string& path, const LinePlot& plot) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_svg: cannot open " + path);
    os << render_svg(plot);
}

}  // namespace vnle
