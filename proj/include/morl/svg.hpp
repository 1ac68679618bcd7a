#pragma once

#include <string>
#include <vector>

namespace morl {

// Minimal SVG plotter: polyline, scatter, and box primitives in data
// coordinates with auto-scaled axes. Enough to render loss traces, Pareto
// scatters, and per-method box plots without a plotting dependency.
class SvgFigure {
  public:
    SvgFigure(int width, int height, std::string title, std::string xlabel,
              std::string ylabel);

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& color, const std::string& label = "");
    void scatter(const std::vector<double>& xs, const std::vector<double>& ys,
                 const std::string& color, double radius = 3.0,
                 const std::string& label = "");
    // five-number summary box at position x
    void box(double x, double lo, double q1, double median, double q3, double hi,
             double half_width, const std::string& color, const std::string& label = "");
    void vline(double x, const std::string& color);
    void xtick_label(double x, const std::string& text);

    void save(const std::string& path) const;

    static const std::vector<std::string>& palette();

  private:
    struct Poly {
        std::vector<double> xs, ys;
        std::string color;
    };
    struct Dots {
        std::vector<double> xs, ys;
        std::string color;
        double radius;
    };
    struct Box {
        double x, lo, q1, med, q3, hi, hw;
        std::string color;
    };
    struct Legend {
        std::string label, color;
    };

    void bounds(double& xmin, double& xmax, double& ymin, double& ymax) const;

    int width_, height_;
    std::string title_, xlabel_, ylabel_;
    std::vector<Poly> polys_;
    std::vector<Dots> dots_;
    std::vector<Box> boxes_;
    std::vector<std::pair<double, std::string>> vlines_;
    std::vector<std::pair<double, std::string>> xticks_;
    std::vector<Legend> legend_;
};

}  // namespace morl
