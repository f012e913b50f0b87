#pragma once

#include <string>
#include <vector>

namespace fxlab::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y; // NaN points are skipped
};

enum class RangePolicy {
    DecibelMargin, // [min - 5, max + 5]
    Proportional,  // 5% of the span on each side
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    RangePolicy range = RangePolicy::Proportional;
    int width = 900;
    int height = 520;
    // Longer series are reduced to per-bucket min/max pairs.
    std::size_t max_points = 2000;
};

struct AxisRange {
    double lo;
    double hi;
};

AxisRange y_range(const LineChart& chart);

/// Self-contained SVG document. The root element carries data-x-min,
/// data-x-max, data-y-min and data-y-max attributes with the axis bounds.
std::string render(const LineChart& chart);

} // namespace fxlab::svg
