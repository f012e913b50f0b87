#include "fxlab/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "fxlab/error.hpp"
#include "fxlab/format.hpp"

namespace fxlab::svg {

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                             "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fixed(double v, int digits = 2) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

struct Extent {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (std::isnan(v))
            return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool valid() const { return lo <= hi; }
};

// Keeps the first/last point and per-bucket extremes, in x order.
std::vector<std::pair<double, double>> reduce(const Series& s, std::size_t max_points) {
    std::vector<std::pair<double, double>> pts;
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (n <= max_points || max_points < 4) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isnan(s.y[i]))
                pts.emplace_back(s.x[i], s.y[i]);
        }
        return pts;
    }
    const std::size_t buckets = max_points / 2;
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t begin = b * n / buckets;
        const std::size_t end = (b + 1) * n / buckets;
        std::size_t imin = end;
        std::size_t imax = end;
        for (std::size_t i = begin; i < end; ++i) {
            if (std::isnan(s.y[i]))
                continue;
            if (imin == end || s.y[i] < s.y[imin])
                imin = i;
            if (imax == end || s.y[i] > s.y[imax])
                imax = i;
        }
        if (imin == end)
            continue;
        const auto first = std::min(imin, imax);
        const auto second = std::max(imin, imax);
        pts.emplace_back(s.x[first], s.y[first]);
        if (second != first)
            pts.emplace_back(s.x[second], s.y[second]);
    }
    return pts;
}

} // namespace

AxisRange y_range(const LineChart& chart) {
    Extent e;
    for (const auto& s : chart.series)
        for (double v : s.y)
            e.add(v);
    if (!e.valid())
        throw ValidationError("chart '" + chart.title + "' has no finite data");
    if (chart.range == RangePolicy::DecibelMargin)
        return {e.lo - 5.0, e.hi + 5.0};
    const double span = e.hi - e.lo;
    const double pad = span > 0.0 ? 0.05 * span : std::max(1.0, std::abs(e.hi) * 0.05);
    return {e.lo - pad, e.hi + pad};
}

std::string render(const LineChart& chart) {
    Extent xe;
    for (const auto& s : chart.series)
        for (double v : s.x)
            xe.add(v);
    if (!xe.valid())
        throw ValidationError("chart '" + chart.title + "' has no data");
    if (xe.hi == xe.lo)
        xe.hi = xe.lo + 1.0;
    const AxisRange yr = y_range(chart);

    const double left = 80, right = 190, top = 50, bottom = 60;
    const double pw = chart.width - left - right;
    const double ph = chart.height - top - bottom;
    const auto sx = [&](double x) { return left + (x - xe.lo) / (xe.hi - xe.lo) * pw; };
    const auto sy = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\""
      << chart.height << "\" viewBox=\"0 0 " << chart.width << ' ' << chart.height << "\""
      << " data-x-min=\"" << format_number(xe.lo) << "\" data-x-max=\"" << format_number(xe.hi)
      << "\" data-y-min=\"" << format_number(yr.lo) << "\" data-y-max=\"" << format_number(yr.hi)
      << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << chart.width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << escape(chart.title) << "</text>\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

    constexpr int kTicks = 5;
    o << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (int i = 0; i <= kTicks; ++i) {
        const double xv = xe.lo + (xe.hi - xe.lo) * i / kTicks;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / kTicks;
        o << "<line x1=\"" << fixed(sx(xv)) << "\" y1=\"" << top + ph << "\" x2=\"" << fixed(sx(xv))
          << "\" y2=\"" << top + ph + 5 << "\" stroke=\"#333\"/>";
        o << "<text x=\"" << fixed(sx(xv)) << "\" y=\"" << top + ph + 18
          << "\" text-anchor=\"middle\">" << fixed(xv, 0) << "</text>\n";
        o << "<line x1=\"" << left - 5 << "\" y1=\"" << fixed(sy(yv)) << "\" x2=\"" << left + pw
          << "\" y2=\"" << fixed(sy(yv)) << "\" stroke=\"#ddd\"/>";
        o << "<text x=\"" << left - 8 << "\" y=\"" << fixed(sy(yv) + 4)
          << "\" text-anchor=\"end\">" << fixed(yv, 2) << "</text>\n";
    }
    o << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << chart.height - 15
      << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(chart.x_label) << "</text>\n";
    o << "<text transform=\"translate(20," << fixed(top + ph / 2)
      << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(chart.y_label)
      << "</text>\n";
    o << "</g>\n";

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const char* color = kPalette[i % kPalette.size()];
        o << "<polyline class=\"series\" data-label=\"" << escape(s.label)
          << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        bool first = true;
        for (const auto& [x, y] : reduce(s, chart.max_points)) {
            o << (first ? "" : " ") << fixed(sx(x)) << ',' << fixed(sy(y));
            first = false;
        }
        o << "\"/>\n";
        const double ly = top + 12 + 18.0 * static_cast<double>(i);
        o << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << fixed(ly) << "\" x2=\"" << left + pw + 32
          << "\" y2=\"" << fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>";
        o << "<text x=\"" << left + pw + 38 << "\" y=\"" << fixed(ly + 4)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace fxlab::svg
