#include "divplan/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <vector>

#include "divplan/errors.hpp"

namespace divplan::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 600.0;
constexpr double kTop = 32.0;
constexpr double kBottom = 430.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    return buffer;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    double map(double v, double pix_lo, double pix_hi) const {
        return pix_lo + (v - lo) / (hi - lo) * (pix_hi - pix_lo);
    }
};

std::string format_count(std::int64_t n) {
    if (n % 1000 == 0 && n >= 1000) return std::to_string(n / 1000) + "K";
    return std::to_string(n);
}

std::string decade_label(int exponent) {
    if (exponent >= 0 && exponent <= 4) {
        std::string label = "1";
        label.append(static_cast<std::size_t>(exponent), '0');
        return label;
    }
    if (exponent >= -4) {
        std::string label = "0.";
        label.append(static_cast<std::size_t>(-exponent - 1), '0');
        label += '1';
        return label;
    }
    return "1e" + std::to_string(exponent);
}

}  // namespace

std::string render_sweep_chart(std::span<const SweepRow> rows) {
    if (rows.empty()) fail(errc::empty_input, "empty sweep table");

    std::map<std::int64_t, std::vector<SweepRow>> curves;
    double y_lo = rows.front().mean_error, y_hi = rows.front().mean_error;
    double lx_lo = std::log10(rows.front().ratio), lx_hi = lx_lo;
    for (const auto& row : rows) {
        curves[row.N].push_back(row);
        y_lo = std::min(y_lo, row.mean_error - row.stddev);
        y_hi = std::max(y_hi, row.mean_error + row.stddev);
        lx_lo = std::min(lx_lo, std::log10(row.ratio));
        lx_hi = std::max(lx_hi, std::log10(row.ratio));
    }
    for (auto& [n, curve] : curves)
        std::sort(curve.begin(), curve.end(),
                  [](const SweepRow& a, const SweepRow& b) { return a.ratio < b.ratio; });

    if (lx_hi - lx_lo < 1e-9) {
        lx_lo -= 1.0;
        lx_hi += 1.0;
    }
    if (y_hi - y_lo < 1e-9) {
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    const double x_pad = 0.04 * (lx_hi - lx_lo);
    const double y_pad = 0.06 * (y_hi - y_lo);
    const Axis x{lx_lo - x_pad, lx_hi + x_pad};
    const Axis y{y_lo - y_pad, y_hi + y_pad};
    const auto px = [&](double ratio) { return x.map(std::log10(ratio), kLeft, kRight); };
    const auto py = [&](double err) { return y.map(err, kBottom, kTop); };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\""
        << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << " " << num(kHeight) << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
        << "\" fill=\"white\"/>\n";

    // frame
    out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
        << num(kRight - kLeft) << "\" height=\"" << num(kBottom - kTop)
        << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

    // x ticks at decades
    const int dec_lo = static_cast<int>(std::ceil(x.lo));
    const int dec_hi = static_cast<int>(std::floor(x.hi));
    for (int d = dec_lo; d <= dec_hi; ++d) {
        const double gx = x.map(static_cast<double>(d), kLeft, kRight);
        out << "<line x1=\"" << num(gx) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(gx)
            << "\" y2=\"" << num(kBottom)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << num(gx) << "\" y=\"" << num(kBottom + 20.0)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
            << decade_label(d) << "</text>\n";
    }

    // y ticks: 6 evenly spaced values
    for (int i = 0; i <= 5; ++i) {
        const double value = y.lo + (y.hi - y.lo) * i / 5.0;
        const double gy = py(value);
        out << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(gy) << "\" x2=\"" << num(kRight)
            << "\" y2=\"" << num(gy) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n"
            << "<text x=\"" << num(kLeft - 8.0) << "\" y=\"" << num(gy + 4.0)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">"
            << num(value) << "</text>\n";
    }

    out << "<text x=\"" << num((kLeft + kRight) / 2.0) << "\" y=\"" << num(kHeight - 10.0)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
        << "class-to-sample ratio x = K^2/N</text>\n"
        << "<text x=\"16\" y=\"" << num((kTop + kBottom) / 2.0)
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 16 " << num((kTop + kBottom) / 2.0) << ")\">"
        << "test error (%)</text>\n";

    std::size_t color_index = 0;
    for (const auto& [n, curve] : curves) {
        const char* color = kPalette[color_index % (sizeof(kPalette) / sizeof(kPalette[0]))];
        // whiskers first so markers draw on top
        for (const auto& row : curve) {
            if (row.stddev <= 0.0) continue;
            const double gx = px(row.ratio);
            const double y1 = py(row.mean_error - row.stddev);
            const double y2 = py(row.mean_error + row.stddev);
            out << "<line x1=\"" << num(gx) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(gx)
                << "\" y2=\"" << num(y2) << "\" stroke=\"" << color
                << "\" stroke-width=\"1\"/>\n"
                << "<line x1=\"" << num(gx - 3.0) << "\" y1=\"" << num(y1) << "\" x2=\""
                << num(gx + 3.0) << "\" y2=\"" << num(y1) << "\" stroke=\"" << color
                << "\" stroke-width=\"1\"/>\n"
                << "<line x1=\"" << num(gx - 3.0) << "\" y1=\"" << num(y2) << "\" x2=\""
                << num(gx + 3.0) << "\" y2=\"" << num(y2) << "\" stroke=\"" << color
                << "\" stroke-width=\"1\"/>\n";
        }
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < curve.size(); ++i) {
            if (i > 0) out << ' ';
            out << num(px(curve[i].ratio)) << ',' << num(py(curve[i].mean_error));
        }
        out << "\"/>\n";
        for (const auto& row : curve)
            out << "<circle cx=\"" << num(px(row.ratio)) << "\" cy=\"" << num(py(row.mean_error))
                << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";

        const double ly = kTop + 16.0 + 18.0 * static_cast<double>(color_index);
        out << "<line x1=\"" << num(kRight + 12.0) << "\" y1=\"" << num(ly - 4.0) << "\" x2=\""
            << num(kRight + 34.0) << "\" y2=\"" << num(ly - 4.0) << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n"
            << "<text x=\"" << num(kRight + 40.0) << "\" y=\"" << num(ly)
            << "\" font-family=\"sans-serif\" font-size=\"12\">N=" << escape(format_count(n))
            << "</text>\n";
        ++color_index;
    }

    out << "</svg>\n";
    return out.str();
}

}  // namespace divplan::svg
