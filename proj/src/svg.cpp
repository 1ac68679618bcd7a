#include "morl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "morl/common.hpp"

namespace morl {

SvgFigure::SvgFigure(int width, int height, std::string title, std::string xlabel,
                     std::string ylabel)
    : width_(width), height_(height), title_(std::move(title)), xlabel_(std::move(xlabel)),
      ylabel_(std::move(ylabel)) {}

const std::vector<std::string>& SvgFigure::palette() {
    static const std::vector<std::string> colors = {
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
        "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#ad494a"};
    return colors;
}

void SvgFigure::polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                         const std::string& color, const std::string& label) {
    polys_.push_back({xs, ys, color});
    if (!label.empty()) legend_.push_back({label, color});
}

void SvgFigure::scatter(const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::string& color, double radius, const std::string& label) {
    dots_.push_back({xs, ys, color, radius});
    if (!label.empty()) legend_.push_back({label, color});
}

void SvgFigure::box(double x, double lo, double q1, double median, double q3, double hi,
                    double half_width, const std::string& color, const std::string& label) {
    boxes_.push_back({x, lo, q1, median, q3, hi, half_width, color});
    if (!label.empty()) legend_.push_back({label, color});
}

void SvgFigure::vline(double x, const std::string& color) { vlines_.push_back({x, color}); }

void SvgFigure::xtick_label(double x, const std::string& text) { xticks_.push_back({x, text}); }

void SvgFigure::bounds(double& xmin, double& xmax, double& ymin, double& ymax) const {
    xmin = ymin = std::numeric_limits<double>::infinity();
    xmax = ymax = -std::numeric_limits<double>::infinity();
    auto eat = [&](double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (const Poly& p : polys_)
        for (std::size_t i = 0; i < p.xs.size(); ++i) eat(p.xs[i], p.ys[i]);
    for (const Dots& d : dots_)
        for (std::size_t i = 0; i < d.xs.size(); ++i) eat(d.xs[i], d.ys[i]);
    for (const Box& b : boxes_) {
        eat(b.x - b.hw, b.lo);
        eat(b.x + b.hw, b.hi);
    }
    for (const auto& [x, c] : vlines_) eat(x, ymin == ymax ? 0.0 : ymin);
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = 0;
        ymax = 1;
    }
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double xpad = 0.05 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;
}

namespace {
std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(5);
    ss << v;
    return ss.str();
}
}  // namespace

void SvgFigure::save(const std::string& path) const {
    double xmin, xmax, ymin, ymax;
    bounds(xmin, xmax, ymin, ymax);
    const double ml = 70, mr = 20, mt = 35, mb = 50;
    const double pw = width_ - ml - mr, ph = height_ - mt - mb;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    std::ofstream out(path);
    if (!out) throw DataError("cannot open svg for writing: " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width_ << "' height='"
        << height_ << "' viewBox='0 0 " << width_ << ' ' << height_ << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << width_ / 2 << "' y='20' text-anchor='middle' font-size='14'>"
        << title_ << "</text>\n";
    // frame
    out << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
        << "' fill='none' stroke='black'/>\n";
    // ticks
    for (int i = 0; i <= 4; ++i) {
        const double x = xmin + (xmax - xmin) * i / 4.0;
        const double y = ymin + (ymax - ymin) * i / 4.0;
        out << "<line x1='" << px(x) << "' y1='" << mt + ph << "' x2='" << px(x) << "' y2='"
            << mt + ph + 4 << "' stroke='black'/>\n";
        if (xticks_.empty())
            out << "<text x='" << px(x) << "' y='" << mt + ph + 16
                << "' text-anchor='middle' font-size='10'>" << fmt(x) << "</text>\n";
        out << "<line x1='" << ml - 4 << "' y1='" << py(y) << "' x2='" << ml << "' y2='"
            << py(y) << "' stroke='black'/>\n";
        out << "<text x='" << ml - 6 << "' y='" << py(y) + 3
            << "' text-anchor='end' font-size='10'>" << fmt(y) << "</text>\n";
    }
    for (const auto& [x, label] : xticks_)
        out << "<text x='" << px(x) << "' y='" << mt + ph + 16
            << "' text-anchor='middle' font-size='9'>" << label << "</text>\n";
    out << "<text x='" << ml + pw / 2 << "' y='" << height_ - 8
        << "' text-anchor='middle' font-size='12'>" << xlabel_ << "</text>\n";
    out << "<text x='14' y='" << mt + ph / 2
        << "' text-anchor='middle' font-size='12' transform='rotate(-90 14 " << mt + ph / 2
        << ")'>" << ylabel_ << "</text>\n";

    for (const auto& [x, color] : vlines_)
        out << "<line x1='" << px(x) << "' y1='" << mt << "' x2='" << px(x) << "' y2='"
            << mt + ph << "' stroke='" << color << "' stroke-dasharray='4 3'/>\n";
    for (const Poly& p : polys_) {
        out << "<polyline fill='none' stroke='" << p.color << "' stroke-width='1.2' points='";
        for (std::size_t i = 0; i < p.xs.size(); ++i)
            out << px(p.xs[i]) << ',' << py(p.ys[i]) << ' ';
        out << "'/>\n";
    }
    for (const Dots& d : dots_)
        for (std::size_t i = 0; i < d.xs.size(); ++i)
            out << "<circle cx='" << px(d.xs[i]) << "' cy='" << py(d.ys[i]) << "' r='"
                << d.radius << "' fill='" << d.color << "' fill-opacity='0.7'/>\n";
    for (const Box& b : boxes_) {
        const double x0 = px(b.x - b.hw), x1 = px(b.x + b.hw), xc = px(b.x);
        out << "<line x1='" << xc << "' y1='" << py(b.lo) << "' x2='" << xc << "' y2='"
            << py(b.q1) << "' stroke='" << b.color << "'/>\n";
        out << "<line x1='" << xc << "' y1='" << py(b.q3) << "' x2='" << xc << "' y2='"
            << py(b.hi) << "' stroke='" << b.color << "'/>\n";
        out << "<rect x='" << x0 << "' y='" << py(b.q3) << "' width='" << x1 - x0
            << "' height='" << py(b.q1) - py(b.q3) << "' fill='" << b.color
            << "' fill-opacity='0.35' stroke='" << b.color << "'/>\n";
        out << "<line x1='" << x0 << "' y1='" << py(b.med) << "' x2='" << x1 << "' y2='"
            << py(b.med) << "' stroke='" << b.color << "' stroke-width='2'/>\n";
    }
    // legend
    double ly = mt + 12;
    for (const Legend& l : legend_) {
        out << "<rect x='" << ml + pw - 150 << "' y='" << ly - 8
            << "' width='10' height='10' fill='" << l.color << "'/>\n";
        out << "<text x='" << ml + pw - 136 << "' y='" << ly << "' font-size='10'>" << l.label
            << "</text>\n";
        ly += 14;
    }
    out << "</svg>\n";
}

}  // namespace morl
