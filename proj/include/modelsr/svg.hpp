#pragma once

// Minimal SVG emission: line plots (truth in red, reconstruction in blue)
// and boxplots with median/quartile/1.5*IQR whiskers.

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "modelsr/core.hpp"

namespace modelsr::svg {

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "blue";
};

namespace detail {

struct Range {
    double lo = 0.0, hi = 1.0;
    void expand(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

inline std::string num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

}  // namespace detail

inline void write_line_plot(const std::vector<Series>& series, const std::string& title,
                            const std::string& path) {
    const double W = 720, H = 420, mL = 60, mR = 20, mT = 40, mB = 40;
    detail::Range rx{1e300, -1e300}, ry{1e300, -1e300};
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            rx.expand(s.x[i]);
            ry.expand(s.y[i]);
        }
    if (rx.hi <= rx.lo) rx.hi = rx.lo + 1.0;
    if (ry.hi <= ry.lo) ry.hi = ry.lo + 1.0;
    auto px = [&](double x) { return mL + (x - rx.lo) / (rx.hi - rx.lo) * (W - mL - mR); };
    auto py = [&](double y) { return H - mB - (y - ry.lo) / (ry.hi - ry.lo) * (H - mT - mB); };

    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    f << "<rect width='100%' height='100%' fill='white'/>\n";
    f << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
      << "</text>\n";
    f << "<line x1='" << mL << "' y1='" << H - mB << "' x2='" << W - mR << "' y2='" << H - mB
      << "' stroke='black'/>\n";
    f << "<line x1='" << mL << "' y1='" << mT << "' x2='" << mL << "' y2='" << H - mB
      << "' stroke='black'/>\n";
    f << "<text x='" << mL - 8 << "' y='" << py(ry.lo) << "' text-anchor='end' font-size='10'>"
      << detail::num(ry.lo) << "</text>\n";
    f << "<text x='" << mL - 8 << "' y='" << py(ry.hi) << "' text-anchor='end' font-size='10'>"
      << detail::num(ry.hi) << "</text>\n";
    for (const auto& s : series) {
        f << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.2' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            f << detail::num(px(s.x[i])) << ',' << detail::num(py(s.y[i])) << ' ';
        f << "'/>\n";
    }
    f << "</svg>\n";
}

struct BoxStats {
    double q1 = 0, median = 0, q3 = 0, whisker_lo = 0, whisker_hi = 0;
    std::vector<double> outliers;
};

inline BoxStats box_stats(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("box_stats: empty sample");
    std::sort(v.begin(), v.end());
    auto quantile = [&v](double q) {
        double pos = q * (static_cast<double>(v.size()) - 1.0);
        std::size_t i = static_cast<std::size_t>(pos);
        double frac = pos - static_cast<double>(i);
        return i + 1 < v.size() ? v[i] * (1.0 - frac) + v[i + 1] * frac : v[i];
    };
    BoxStats b;
    b.q1 = quantile(0.25);
    b.median = quantile(0.5);
    b.q3 = quantile(0.75);
    double iqr = b.q3 - b.q1;
    double lo_fence = b.q1 - 1.5 * iqr, hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_lo = b.q3;
    b.whisker_hi = b.q1;
    b.whisker_lo = v.front();
    b.whisker_hi = v.back();
    for (double x : v) {
        if (x < lo_fence || x > hi_fence) b.outliers.push_back(x);
    }
    // whiskers reach the most extreme points inside the fences
    for (double x : v)
        if (x >= lo_fence) { b.whisker_lo = x; break; }
    for (auto it = v.rbegin(); it != v.rend(); ++it)
        if (*it <= hi_fence) { b.whisker_hi = *it; break; }
    return b;
}

inline void write_boxplot(const std::vector<std::vector<double>>& groups,
                          const std::vector<std::string>& labels, const std::string& title,
                          const std::string& path) {
    if (groups.empty() || groups.size() != labels.size())
        throw std::invalid_argument("write_boxplot: bad groups/labels");
    const double W = 720, H = 420, mL = 70, mR = 20, mT = 40, mB = 50;
    double lo = 1e300, hi = -1e300;
    std::vector<BoxStats> stats;
    for (const auto& g : groups) {
        stats.push_back(box_stats(g));
        for (double v : g) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi <= lo) hi = lo + 1.0;
    auto py = [&](double y) { return H - mB - (y - lo) / (hi - lo) * (H - mT - mB); };

    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    f << "<rect width='100%' height='100%' fill='white'/>\n";
    f << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
      << "</text>\n";
    f << "<line x1='" << mL << "' y1='" << mT << "' x2='" << mL << "' y2='" << H - mB
      << "' stroke='black'/>\n";
    f << "<text x='" << mL - 8 << "' y='" << py(lo) << "' text-anchor='end' font-size='10'>"
      << detail::num(lo) << "</text>\n";
    f << "<text x='" << mL - 8 << "' y='" << py(hi) << "' text-anchor='end' font-size='10'>"
      << detail::num(hi) << "</text>\n";
    double slot = (W - mL - mR) / static_cast<double>(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
        double cx = mL + slot * (static_cast<double>(i) + 0.5);
        double bw = slot * 0.35;
        const auto& b = stats[i];
        f << "<line x1='" << cx << "' y1='" << py(b.whisker_lo) << "' x2='" << cx << "' y2='"
          << py(b.q1) << "' stroke='black'/>\n";
        f << "<line x1='" << cx << "' y1='" << py(b.q3) << "' x2='" << cx << "' y2='"
          << py(b.whisker_hi) << "' stroke='black'/>\n";
        f << "<rect x='" << cx - bw / 2 << "' y='" << py(b.q3) << "' width='" << bw << "' height='"
          << py(b.q1) - py(b.q3) << "' fill='none' stroke='black'/>\n";
        f << "<line x1='" << cx - bw / 2 << "' y1='" << py(b.median) << "' x2='" << cx + bw / 2
          << "' y2='" << py(b.median) << "' stroke='red'/>\n";
        for (double o : b.outliers)
            f << "<circle cx='" << cx << "' cy='" << py(o) << "' r='2' fill='black'/>\n";
        f << "<text x='" << cx << "' y='" << H - mB + 18 << "' text-anchor='middle' font-size='11'>"
          << labels[i] << "</text>\n";
    }
    f << "</svg>\n";
}

}  // namespace modelsr::svg
