#pragma once

#include "swtle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace swtle {

/// Self-contained SVG line chart: one polyline plus circle markers per series,
/// nice-number axis ticks, legend. Output bytes are deterministic for
/// identical input (fixed float formatting, no timestamps).
class LineChart {
public:
    LineChart(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void set_log_y(bool on) { log_y_ = on; }

    void add_series(std::string name, std::vector<std::pair<double, double>> points) {
        if (points.empty()) throw ParameterError("LineChart: empty series '" + name + "'");
        std::stable_sort(points.begin(), points.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        series_.push_back({std::move(name), std::move(points)});
    }

    std::string render() const {
        if (series_.empty()) throw ParameterError("LineChart: no series to draw");

        double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
        bool first = true;
        for (const auto& s : series_) {
            for (const auto& [x, y] : s.points) {
                const double yy = transform_y(y);
                if (first) {
                    xmin = xmax = x;
                    ymin = ymax = yy;
                    first = false;
                } else {
                    xmin = std::min(xmin, x);
                    xmax = std::max(xmax, x);
                    ymin = std::min(ymin, yy);
                    ymax = std::max(ymax, yy);
                }
            }
        }
        if (xmax == xmin) {
            xmin -= 1.0;
            xmax += 1.0;
        }
        if (ymax == ymin) {
            ymin -= 1.0;
            ymax += 1.0;
        }
        const double ypad = 0.05 * (ymax - ymin);
        ymin -= ypad;
        ymax += ypad;

        std::string out;
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"520\" "
               "viewBox=\"0 0 800 520\">\n";
        out += "<rect width=\"800\" height=\"520\" fill=\"white\"/>\n";
        out += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"18\">" +
               escape(title_) + "</text>\n";

        // axes box
        out += "<rect x=\"70\" y=\"50\" width=\"660\" height=\"400\" fill=\"none\" "
               "stroke=\"black\"/>\n";

        for (double t : ticks(xmin, xmax)) {
            const double px = map_x(t, xmin, xmax);
            out += "<line x1=\"" + fmt(px) + "\" y1=\"450\" x2=\"" + fmt(px) +
                   "\" y2=\"456\" stroke=\"black\"/>\n";
            out += "<text x=\"" + fmt(px) +
                   "\" y=\"472\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                   "font-size=\"12\">" +
                   fmt(t) + "</text>\n";
        }
        for (double t : ticks(ymin, ymax)) {
            const double py = map_y(t, ymin, ymax);
            out += "<line x1=\"64\" y1=\"" + fmt(py) + "\" x2=\"70\" y2=\"" + fmt(py) +
                   "\" stroke=\"black\"/>\n";
            out += "<text x=\"60\" y=\"" + fmt(py + 4) +
                   "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" +
                   fmt(log_y_ ? std::pow(10.0, t) : t) + "</text>\n";
        }
        out += "<text x=\"400\" y=\"505\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"14\">" +
               escape(x_label_) + "</text>\n";
        out += "<text x=\"20\" y=\"250\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"14\" transform=\"rotate(-90 20 250)\">" +
               escape(y_label_ + (log_y_ ? " (log scale)" : "")) + "</text>\n";

        for (std::size_t si = 0; si < series_.size(); ++si) {
            const auto& s = series_[si];
            const std::string color = palette(si);
            std::string pts;
            for (const auto& [x, y] : s.points) {
                if (!pts.empty()) pts.push_back(' ');
                pts += fmt(map_x(x, xmin, xmax)) + "," + fmt(map_y(transform_y(y), ymin, ymax));
            }
            out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" +
                   pts + "\"/>\n";
            for (const auto& [x, y] : s.points)
                out += "<circle cx=\"" + fmt(map_x(x, xmin, xmax)) + "\" cy=\"" +
                       fmt(map_y(transform_y(y), ymin, ymax)) + "\" r=\"3.5\" fill=\"" + color +
                       "\"/>\n";
            // legend entry
            const double ly = 66.0 + 20.0 * static_cast<double>(si);
            out += "<line x1=\"600\" y1=\"" + fmt(ly) + "\" x2=\"630\" y2=\"" + fmt(ly) +
                   "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
            out += "<text x=\"636\" y=\"" + fmt(ly + 4) +
                   "\" font-family=\"sans-serif\" font-size=\"12\">" + escape(s.name) + "</text>\n";
        }
        out += "</svg>\n";
        return out;
    }

private:
    struct Series {
        std::string name;
        std::vector<std::pair<double, double>> points;
    };

    double transform_y(double y) const {
        if (!log_y_) return y;
        if (!(y > 0.0)) throw ParameterError("LineChart: log scale needs positive values");
        return std::log10(y);
    }

    static double map_x(double x, double lo, double hi) { return 70.0 + 660.0 * (x - lo) / (hi - lo); }
    static double map_y(double y, double lo, double hi) { return 450.0 - 400.0 * (y - lo) / (hi - lo); }

    static std::vector<double> ticks(double lo, double hi) {
        const double span = hi - lo;
        const double raw = span / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0}) {
            if (raw <= m * mag) {
                step = m * mag;
                break;
            }
        }
        std::vector<double> out;
        for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step)
            out.push_back(t == 0.0 ? 0.0 : t); // normalize -0
        return out;
    }

    static std::string fmt(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }

    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
            }
        }
        return out;
    }

    static std::string palette(std::size_t i) {
        static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                       "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
        return colors[i % 8];
    }

    std::string title_, x_label_, y_label_;
    bool log_y_ = false;
    std::vector<Series> series_;
};

} // namespace swtle
