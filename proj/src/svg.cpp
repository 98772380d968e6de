#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "qswitch/lab.hpp"

namespace qswitch {

namespace {

constexpr double kWidth = 520.0;
constexpr double kHeight = 520.0;
constexpr double kMargin = 70.0;

struct Point {
  double x;
  double y;
};

struct Layout {
  std::string x_label;
  std::string y_label;
  std::vector<Point> circles;  // one per record
  std::vector<Point> squares;  // secondary series, if any
  bool guides = false;         // slopes 1 and 1/2 through the origin
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

Layout layout_for(Scenario scenario, const std::vector<ExperimentRecord>& records) {
  Layout l;
  auto ratio_point = [&](const ExperimentRecord& r, const std::optional<double>& den) {
    if (r.chi_switch && den && r.q_value && *den >= kRatioGuard) l.circles.push_back({*r.q_value, *r.chi_switch / *den});
  };
  for (const auto& r : records) {
    switch (scenario) {
      case Scenario::Pairs:
      case Scenario::Gauges:
        if (r.chi_sup && r.chi_switch) l.circles.push_back({*r.chi_sup, *r.chi_switch});
        break;
      case Scenario::Self:
      case Scenario::WithDepol:
        if (r.chi_base && r.chi_switch) l.circles.push_back({*r.chi_base, *r.chi_switch});
        if (r.chi_base && r.chi_sup) l.squares.push_back({*r.chi_base, *r.chi_sup});
        break;
      case Scenario::QGain:
        ratio_point(r, r.chi_base);
        break;
      case Scenario::QCompose:
        ratio_point(r, r.chi_compose);
        break;
    }
  }
  switch (scenario) {
    case Scenario::Pairs:
    case Scenario::Gauges:
      l.x_label = "chi(C0 sup C1) [bits]";
      l.y_label = "chi(C0 switch C1) [bits]";
      if (scenario == Scenario::Gauges) {
        l.x_label = "chi(C sup C) [bits]";
        l.y_label = "chi(C switch C) [bits]";
      }
      break;
    case Scenario::Self:
      l.x_label = "chi(C) [bits]";
      l.y_label = "chi(C + C) [bits]  (circle: switch, square: sup)";
      break;
    case Scenario::WithDepol:
      l.x_label = "chi(C) [bits]";
      l.y_label = "chi(C + N) [bits]  (circle: switch, square: sup)";
      l.guides = true;
      break;
    case Scenario::QGain:
      l.x_label = "Q(C)";
      l.y_label = "chi(C switch C) / chi(C)";
      break;
    case Scenario::QCompose:
      l.x_label = "Q(C)";
      l.y_label = "chi(C switch C) / chi(C o C)";
      break;
  }
  return l;
}

}  // namespace

std::string scatter_svg(Scenario scenario, const std::vector<ExperimentRecord>& records) {
  const Layout l = layout_for(scenario, records);

  double x_max = 0.0;
  double y_max = 0.0;
  for (const auto* series : {&l.circles, &l.squares}) {
    for (const auto& p : *series) {
      x_max = std::max(x_max, p.x);
      y_max = std::max(y_max, p.y);
    }
  }
  x_max = x_max > 0.0 ? 1.05 * x_max : 1.0;
  y_max = y_max > 0.0 ? 1.05 * y_max : 1.0;

  const double plot_w = kWidth - 2.0 * kMargin;
  const double plot_h = kHeight - 2.0 * kMargin;
  auto sx = [&](double x) { return kMargin + plot_w * x / x_max; };
  auto sy = [&](double y) { return kHeight - kMargin - plot_h * y / y_max; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
         "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\">\n";
  out += "<title>" + scenario_name(scenario) + "</title>\n";
  out += "<rect class=\"frame\" x=\"0\" y=\"0\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
         "\" fill=\"white\"/>\n";

  // Axes with ticks at quarters of the range.
  const std::string x0 = fmt(sx(0.0)), y0 = fmt(sy(0.0));
  out += "<line class=\"axis\" x1=\"" + x0 + "\" y1=\"" + y0 + "\" x2=\"" + fmt(sx(x_max)) + "\" y2=\"" + y0 +
         "\" stroke=\"black\"/>\n";
  out += "<line class=\"axis\" x1=\"" + x0 + "\" y1=\"" + y0 + "\" x2=\"" + x0 + "\" y2=\"" + fmt(sy(y_max)) +
         "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x_max * k / 4.0;
    const double yv = y_max * k / 4.0;
    out += "<text class=\"tick\" x=\"" + fmt(sx(xv)) + "\" y=\"" + fmt(sy(0.0) + 16.0) +
           "\" font-size=\"10\" text-anchor=\"middle\">" + fmt(xv) + "</text>\n";
    out += "<text class=\"tick\" x=\"" + fmt(sx(0.0) - 6.0) + "\" y=\"" + fmt(sy(yv) + 3.0) +
           "\" font-size=\"10\" text-anchor=\"end\">" + fmt(yv) + "</text>\n";
  }
  out += "<text class=\"label\" x=\"" + fmt(kWidth / 2.0) + "\" y=\"" + fmt(kHeight - 25.0) +
         "\" font-size=\"13\" text-anchor=\"middle\">" + l.x_label + "</text>\n";
  out += "<text class=\"label\" x=\"20\" y=\"" + fmt(kHeight / 2.0) +
         "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 " + fmt(kHeight / 2.0) + ")\">" +
         l.y_label + "</text>\n";

  if (l.guides) {
    for (double slope : {1.0, 0.5}) {
      // Clip the guide to the plotted box.
      const double x_end = std::min(x_max, y_max / slope);
      out += "<line class=\"guide\" x1=\"" + x0 + "\" y1=\"" + y0 + "\" x2=\"" + fmt(sx(x_end)) + "\" y2=\"" +
             fmt(sy(slope * x_end)) + "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n";
    }
  }

  for (const auto& p : l.squares) {
    out += "<rect class=\"point sup\" x=\"" + fmt(sx(p.x) - 2.5) + "\" y=\"" + fmt(sy(p.y) - 2.5) +
           "\" width=\"5\" height=\"5\" fill=\"none\" stroke=\"firebrick\"/>\n";
  }
  for (const auto& p : l.circles) {
    out += "<circle class=\"point\" cx=\"" + fmt(sx(p.x)) + "\" cy=\"" + fmt(sy(p.y)) +
           "\" r=\"2.5\" fill=\"steelblue\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace qswitch
