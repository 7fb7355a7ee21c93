#pragma once

// Small native SVG 1.1 plotter: stacked panels of polylines, horizontal
// reference lines and circles, with axes, ticks and a legend.

#include "pvm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace pvm::io::svg {

struct Series {
  std::string label;
  std::vector<double> x, y;  // NaN in y breaks the line
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct HLine {
  std::string label;
  double y = 0.0;
  std::string color = "#ff7f0e";
};

struct Circle {
  double cx = 0.0, cy = 0.0, r = 0.0;
};

struct Panel {
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
  std::vector<HLine> hlines;
  std::vector<Circle> circles;
  bool equal_aspect = false;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", std::abs(v) < 5e-3 ? 0.0 : v);
  return buf;
}

inline std::string tick_label(double v, double step) {
  char buf[32];
  const int digits = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
  std::snprintf(buf, sizeof buf, "%.*f", std::clamp(digits, 0, 6),
                std::abs(v) < step * 1e-6 ? 0.0 : v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

inline double nice_step(double span, int target) {
  const double raw = span / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void finish() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-9) {
      const double pad = std::max(1.0, std::abs(lo)) * 0.5;
      lo -= pad;
      hi += pad;
    } else {
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }
};

}  // namespace detail

inline constexpr double kWidth = 720.0;
inline constexpr double kPanelHeight = 300.0;

inline void write(std::ostream& os, const std::string& title, const std::vector<Panel>& panels) {
  using detail::num;
  const double left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;
  const double heading = title.empty() ? 0.0 : 30.0;
  const double total_h = heading + kPanelHeight * static_cast<double>(panels.size());

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kWidth)
     << "\" height=\"" << num(total_h) << "\" viewBox=\"0 0 " << num(kWidth) << ' '
     << num(total_h) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(total_h)
     << "\" fill=\"white\"/>\n";
  if (!title.empty())
    os << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">"
       << detail::escape(title) << "</text>\n";

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& pan = panels[p];
    const double y0 = heading + kPanelHeight * static_cast<double>(p);
    double pw = kWidth - left - right;
    double ph = kPanelHeight - top - bottom;

    detail::Range xr, yr;
    for (const auto& s : pan.series) {
      for (double v : s.x) xr.add(v);
      for (double v : s.y) yr.add(v);
    }
    for (const auto& h : pan.hlines) yr.add(h.y);
    for (const auto& c : pan.circles) {
      xr.add(c.cx - c.r);
      xr.add(c.cx + c.r);
      yr.add(c.cy - c.r);
      yr.add(c.cy + c.r);
    }
    xr.finish();
    yr.finish();
    double ox = left, oy = y0 + top;
    if (pan.equal_aspect) {
      const double sx = pw / (xr.hi - xr.lo), sy = ph / (yr.hi - yr.lo);
      const double s = std::min(sx, sy);
      const double w = s * (xr.hi - xr.lo), h = s * (yr.hi - yr.lo);
      ox += 0.5 * (pw - w);
      oy += 0.5 * (ph - h);
      pw = w;
      ph = h;
    }
    const auto X = [&](double v) { return ox + (v - xr.lo) / (xr.hi - xr.lo) * pw; };
    const auto Y = [&](double v) { return oy + ph - (v - yr.lo) / (yr.hi - yr.lo) * ph; };

    os << "<g>\n";
    os << "<text x=\"" << num(left + (kWidth - left - right) / 2) << "\" y=\"" << num(y0 + 24)
       << "\" text-anchor=\"middle\" font-size=\"14\">" << detail::escape(pan.title)
       << "</text>\n";
    os << "<rect x=\"" << num(ox) << "\" y=\"" << num(oy) << "\" width=\"" << num(pw)
       << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    const double xs = detail::nice_step(xr.hi - xr.lo, 8);
    for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-12; t += xs) {
      os << "<line x1=\"" << num(X(t)) << "\" y1=\"" << num(oy + ph) << "\" x2=\"" << num(X(t))
         << "\" y2=\"" << num(oy + ph + 5) << "\" stroke=\"black\"/>"
         << "<text x=\"" << num(X(t)) << "\" y=\"" << num(oy + ph + 18)
         << "\" text-anchor=\"middle\">" << detail::tick_label(t, xs) << "</text>\n";
    }
    const double ys = detail::nice_step(yr.hi - yr.lo, 5);
    for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-12; t += ys) {
      os << "<line x1=\"" << num(ox - 5) << "\" y1=\"" << num(Y(t)) << "\" x2=\"" << num(ox)
         << "\" y2=\"" << num(Y(t)) << "\" stroke=\"black\"/>"
         << "<text x=\"" << num(ox - 8) << "\" y=\"" << num(Y(t) + 4)
         << "\" text-anchor=\"end\">" << detail::tick_label(t, ys) << "</text>\n";
    }
    os << "<text x=\"" << num(left + (kWidth - left - right) / 2) << "\" y=\""
       << num(y0 + kPanelHeight - 12) << "\" text-anchor=\"middle\">"
       << detail::escape(pan.xlabel) << "</text>\n";
    os << "<text x=\"16\" y=\"" << num(y0 + top + ph / 2) << "\" text-anchor=\"middle\" "
       << "transform=\"rotate(-90 16 " << num(y0 + top + ph / 2) << ")\">"
       << detail::escape(pan.ylabel) << "</text>\n";

    for (const auto& c : pan.circles)
      os << "<circle cx=\"" << num(X(c.cx)) << "\" cy=\"" << num(Y(c.cy)) << "\" r=\""
         << num(c.r / (xr.hi - xr.lo) * pw)
         << "\" fill=\"#d62728\" fill-opacity=\"0.25\" stroke=\"#d62728\"/>\n";
    for (const auto& h : pan.hlines)
      os << "<line x1=\"" << num(ox) << "\" y1=\"" << num(Y(h.y)) << "\" x2=\"" << num(ox + pw)
         << "\" y2=\"" << num(Y(h.y)) << "\" stroke=\"" << h.color << "\" stroke-width=\"1.5\"/>\n";

    for (const auto& s : pan.series) {
      std::string pts;
      const auto flush = [&] {
        if (!pts.empty())
          os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
             << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << pts << "\"/>\n";
        pts.clear();
      };
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
          flush();
          continue;
        }
        if (!pts.empty()) pts += ' ';
        pts += num(X(s.x[i])) + "," + num(Y(s.y[i]));
      }
      flush();
    }

    double ly = oy + 14;
    const double lx = ox + pw - 150;
    const auto legend = [&](const std::string& label, const std::string& color, bool dashed) {
      if (label.empty()) return;
      os << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 24)
         << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
         << (dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>"
         << "<text x=\"" << num(lx + 30) << "\" y=\"" << num(ly) << "\">"
         << detail::escape(label) << "</text>\n";
      ly += 16;
    };
    for (const auto& s : pan.series) legend(s.label, s.color, s.dashed);
    for (const auto& h : pan.hlines) legend(h.label, h.color, false);
    os << "</g>\n";
  }
  os << "</svg>\n";
}

/// Named views of a run for plotting.
struct RunView {
  const sim::SimLog* log = nullptr;
  std::string label;
  std::string color = "#1f77b4";
  bool dashed = false;
};

inline std::vector<Panel> trajectory_panels(const std::vector<RunView>& runs) {
  Panel p;
  p.title = "XY trajectory";
  p.xlabel = "p_x [m]";
  p.ylabel = "p_y [m]";
  p.equal_aspect = true;
  if (!runs.empty()) {
    for (const auto& o : runs.front().log->scenario.obstacles) p.circles.push_back({o.x, o.y, o.radius});
    const auto& g = runs.front().log->scenario.goal;
    p.circles.push_back({g[0], g[1], runs.front().log->config.goal_tol});
  }
  for (const auto& r : runs) {
    Series s{r.label, {}, {}, r.color, r.dashed};
    for (const auto& rec : r.log->records) {
      s.x.push_back(rec.state[0]);
      s.y.push_back(rec.state[1]);
    }
    p.series.push_back(std::move(s));
  }
  return {p};
}

inline std::vector<Panel> radius_panels(const std::vector<RunView>& runs) {
  Panel p;
  p.title = "Chebyshev radius r*(t)";
  p.xlabel = "t [s]";
  p.ylabel = "r*";
  for (const auto& r : runs) {
    Series s{r.label, {}, {}, r.color, r.dashed};
    for (const auto& rec : r.log->records) {
      s.x.push_back(rec.t);
      s.y.push_back(rec.r_star ? *rec.r_star : std::numeric_limits<double>::quiet_NaN());
    }
    p.series.push_back(std::move(s));
  }
  if (!runs.empty()) p.hlines.push_back({"eps0", runs.front().log->config.barrier.eps0});
  return {p};
}

inline std::vector<Panel> input_panels(const std::vector<RunView>& runs) {
  Panel d{"slack delta*(t)", "t [s]", "delta*", {}, {}, {}, false};
  Panel a{"acceleration a*(t)", "t [s]", "a [m/s^2]", {}, {}, {}, false};
  Panel w{"turn rate omega*(t)", "t [s]", "omega [rad/s]", {}, {}, {}, false};
  for (const auto& r : runs) {
    Series sd{r.label, {}, {}, r.color, r.dashed}, sa = sd, sw = sd;
    for (const auto& rec : r.log->records) {
      sd.x.push_back(rec.t);
      sd.y.push_back(rec.delta_star);
      sa.x.push_back(rec.t);
      sa.y.push_back(rec.u_applied[0]);
      sw.x.push_back(rec.t);
      sw.y.push_back(rec.u_applied[1]);
    }
    d.series.push_back(std::move(sd));
    a.series.push_back(std::move(sa));
    w.series.push_back(std::move(sw));
  }
  return {d, a, w};
}

}  // namespace pvm::io::svg
