#include "poolnet/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "poolnet/errors.hpp"

namespace poolnet {

namespace {

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

struct Point {
  double x, mean, sd;
};

std::string fmt(double v, const char* spec = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<SweepAggregate>& cells, const PlotSpec& spec) {
  if (cells.empty()) throw ParameterError("plot: no rows to plot");
  if (spec.width < 200 || spec.height < 150) throw ParameterError("plot: canvas too small");
  const bool by_m = spec.x_axis == PlotAxis::SampleSize;

  // Series are labelled by model, plus the other varying axis and rho.
  std::map<int, int> other_values;
  std::map<double, int> rho_values;
  for (const auto& c : cells) {
    ++other_values[by_m ? c.n : c.m];
    ++rho_values[c.rho];
  }
  std::vector<std::string> order;
  std::map<std::string, std::vector<Point>> series;
  for (const auto& c : cells) {
    if (c.runs == 0) continue;
    std::string label(to_string(c.model));
    if (other_values.size() > 1) label += by_m ? " n=" + std::to_string(c.n) : " m=" + std::to_string(c.m);
    if (rho_values.size() > 1) label += " rho=" + fmt(c.rho);
    const bool test = spec.metric == PlotMetric::TestError;
    const Point p{static_cast<double>(by_m ? c.m : c.n), test ? c.test_mean : c.train_mean,
                  test ? c.test_std : c.train_std};
    if (!series.count(label)) order.push_back(label);
    series[label].push_back(p);
  }
  if (series.empty()) throw ParameterError("plot: every cell failed");
  for (auto& [label, pts] : series) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
  }

  double x_min = INFINITY, x_max = -INFINITY, y_max = 0.0;
  for (const auto& [label, pts] : series) {
    for (const auto& p : pts) {
      x_min = std::min(x_min, p.x);
      x_max = std::max(x_max, p.x);
      y_max = std::max(y_max, p.mean + p.sd);
    }
  }
  const bool log_x = spec.log_x && x_min > 0.0;
  auto tx = [&](double x) { return log_x ? std::log2(x) : x; };
  double lo = tx(x_min), hi = tx(x_max);
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.05;

  const double left = 70, right = 150, top = 40, bottom = 55;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  auto px = [&](double x) { return left + (tx(x) - lo) / (hi - lo) * pw; };
  auto py = [&](double y) { return top + ph - std::clamp(y, 0.0, y_max) / y_max * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
    << spec.height << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << spec.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(spec.title) << "</text>\n";

  // axes and ticks
  s << "<g stroke=\"#333\" fill=\"none\"><line x1=\"" << left << "\" y1=\"" << top + ph
    << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph << "\"/><line x1=\"" << left
    << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/></g>\n";
  std::vector<double> xticks;
  for (const auto& [label, pts] : series) {
    for (const auto& p : pts) xticks.push_back(p.x);
  }
  std::sort(xticks.begin(), xticks.end());
  xticks.erase(std::unique(xticks.begin(), xticks.end()), xticks.end());
  for (double x : xticks) {
    s << "<text x=\"" << fmt(px(x), "%.2f") << "\" y=\"" << top + ph + 18
      << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double y = y_max * i / 4.0;
    s << "<text x=\"" << left - 8 << "\" y=\"" << fmt(py(y) + 4, "%.2f")
      << "\" text-anchor=\"end\">" << fmt(y, "%.3g") << "</text>\n";
    s << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << fmt(py(y), "%.2f")
      << "\" y2=\"" << fmt(py(y), "%.2f") << "\" stroke=\"#ddd\"/>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << spec.height - 15
    << "\" text-anchor=\"middle\">" << (by_m ? "m (training samples)" : "n (patches)")
    << "</text>\n";
  s << "<text transform=\"translate(18," << top + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">"
    << (spec.metric == PlotMetric::TestError ? "test error" : "train error") << "</text>\n";

  std::size_t idx = 0;
  for (const auto& label : order) {
    const auto& pts = series[label];
    const char* color = kColors[idx % (sizeof kColors / sizeof *kColors)];
    std::ostringstream band, line;
    for (const auto& p : pts) band << fmt(px(p.x), "%.2f") << ',' << fmt(py(p.mean + p.sd), "%.2f") << ' ';
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      band << fmt(px(it->x), "%.2f") << ',' << fmt(py(it->mean - it->sd), "%.2f") << ' ';
    }
    for (const auto& p : pts) line << fmt(px(p.x), "%.2f") << ',' << fmt(py(p.mean), "%.2f") << ' ';
    s << "<g class=\"series\" data-label=\"" << escape(label) << "\">\n";
    s << "<polygon points=\"" << band.str() << "\" fill=\"" << color
      << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    s << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    for (const auto& p : pts) {
      s << "<circle cx=\"" << fmt(px(p.x), "%.2f") << "\" cy=\"" << fmt(py(p.mean), "%.2f")
        << "\" r=\"3\" fill=\"" << color << "\"><title>" << escape(label) << ' '
        << (by_m ? "m=" : "n=") << fmt(p.x) << " mean=" << fmt(p.mean, "%.6g")
        << " std=" << fmt(p.sd, "%.6g") << "</title></circle>\n";
    }
    s << "</g>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(idx);
    s << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 32 << "\" y1=\"" << ly
      << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">" << escape(label)
      << "</text>\n";
    ++idx;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace poolnet
