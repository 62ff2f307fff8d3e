#include "depthkit/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "depthkit/errors.hpp"
#include "depthkit/io.hpp"
#include "depthkit/numeric.hpp"

namespace depthkit::svg {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMargin = 60.0;

// %.6g keeps coordinates short and deterministic.
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
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

std::string header(const std::string& title) {
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n";
  out += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"18\">" + escape(title) + "</text>\n";
  return out;
}

}  // namespace

void write_contour_plot(const std::string& path, const std::string& title,
                        const std::vector<Series>& series) {
  if (series.empty()) throw config_error("contour plot needs at least one series");
  double lim = 0.0;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      lim = std::max({lim, std::abs(p[0]), std::abs(p[1])});
    }
  }
  if (!(lim > 0.0)) lim = 1.0;
  lim *= 1.05;
  const double span = std::min(kWidth, kHeight) - 2.0 * kMargin;
  const double cx = kWidth / 2.0, cy = kHeight / 2.0;
  const double scale = span / (2.0 * lim);
  auto px = [&](double x) { return cx + x * scale; };
  auto py = [&](double y) { return cy - y * scale; };

  std::string out = header(title);
  out += "<line x1=\"" + num(px(-lim)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" +
         num(px(lim)) + "\" y2=\"" + num(py(0)) +
         "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  out += "<line x1=\"" + num(px(0)) + "\" y1=\"" + num(py(-lim)) + "\" x2=\"" +
         num(px(0)) + "\" y2=\"" + num(py(lim)) +
         "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  for (const auto& s : series) {
    if (s.points.empty()) continue;
    out += s.close ? "<polygon" : "<polyline";
    out += " fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (i) out.push_back(' ');
      out += num(px(s.points[i][0])) + "," + num(py(s.points[i][1]));
    }
    out += "\"/>\n";
  }
  double ly = 50.0;
  for (const auto& s : series) {
    out += "<line x1=\"70\" y1=\"" + num(ly) + "\" x2=\"100\" y2=\"" + num(ly) +
           "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"106\" y=\"" + num(ly + 4.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\">" + escape(s.name) +
           "</text>\n";
    ly += 20.0;
  }
  out += "<text x=\"740\" y=\"590\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">axis limit " + num(lim) + "</text>\n";
  out += "</svg>\n";
  io::write_text_file(path, out);
}

void write_boxplot(const std::string& path, const std::string& title,
                   const std::vector<std::string>& groups,
                   const std::vector<std::vector<double>>& values) {
  if (groups.empty() || groups.size() != values.size()) {
    throw config_error("boxplot needs one value set per group");
  }
  struct BoxStats {
    double q1, q2, q3, lo, hi;
    std::vector<double> outliers;
  };
  std::vector<BoxStats> stats;
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();
  for (const auto& v : values) {
    if (v.empty()) throw config_error("boxplot group has no values");
    BoxStats b{};
    b.q1 = num::quantile(v, 0.25);
    b.q2 = num::quantile(v, 0.50);
    b.q3 = num::quantile(v, 0.75);
    const double iqr = b.q3 - b.q1;
    const double fence_lo = b.q1 - 1.5 * iqr, fence_hi = b.q3 + 1.5 * iqr;
    b.lo = b.q1;
    b.hi = b.q3;
    for (double x : v) {
      if (x >= fence_lo && x < b.lo) b.lo = x;
      if (x <= fence_hi && x > b.hi) b.hi = x;
    }
    for (double x : v) {
      if (x < fence_lo || x > fence_hi) b.outliers.push_back(x);
    }
    std::sort(b.outliers.begin(), b.outliers.end());
    ymin = std::min({ymin, b.lo, b.outliers.empty() ? b.lo : b.outliers.front()});
    ymax = std::max({ymax, b.hi, b.outliers.empty() ? b.hi : b.outliers.back()});
    stats.push_back(std::move(b));
  }
  if (ymin == ymax) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const double plot_h = kHeight - 2.0 * kMargin;
  const double plot_w = kWidth - 2.0 * kMargin;
  auto py = [&](double y) {
    return kHeight - kMargin - (y - ymin) / (ymax - ymin) * plot_h;
  };
  const double slot = plot_w / static_cast<double>(groups.size());
  const double box_w = std::min(60.0, slot * 0.5);

  std::string out = header(title);
  out += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kMargin) + "\" x2=\"" +
         num(kMargin) + "\" y2=\"" + num(kHeight - kMargin) +
         "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double y = ymin + (ymax - ymin) * t / 5.0;
    out += "<line x1=\"" + num(kMargin - 5.0) + "\" y1=\"" + num(py(y)) +
           "\" x2=\"" + num(kMargin) + "\" y2=\"" + num(py(y)) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + num(kMargin - 9.0) + "\" y=\"" + num(py(y) + 4.0) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           num(y) + "</text>\n";
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& b = stats[g];
    const double x = kMargin + slot * (static_cast<double>(g) + 0.5);
    const double x0 = x - box_w / 2.0, x1 = x + box_w / 2.0;
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(py(b.lo)) + "\" x2=\"" +
           num(x) + "\" y2=\"" + num(py(b.q1)) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(py(b.q3)) + "\" x2=\"" +
           num(x) + "\" y2=\"" + num(py(b.hi)) + "\" stroke=\"black\"/>\n";
    for (double w : {b.lo, b.hi}) {
      out += "<line x1=\"" + num(x - box_w / 4.0) + "\" y1=\"" + num(py(w)) +
             "\" x2=\"" + num(x + box_w / 4.0) + "\" y2=\"" + num(py(w)) +
             "\" stroke=\"black\"/>\n";
    }
    out += "<rect x=\"" + num(x0) + "\" y=\"" + num(py(b.q3)) + "\" width=\"" +
           num(x1 - x0) + "\" height=\"" + num(py(b.q1) - py(b.q3)) +
           "\" fill=\"#dce6f2\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(py(b.q2)) + "\" x2=\"" +
           num(x1) + "\" y2=\"" + num(py(b.q2)) +
           "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    for (double o : b.outliers) {
      out += "<circle cx=\"" + num(x) + "\" cy=\"" + num(py(o)) +
             "\" r=\"2.5\" fill=\"none\" stroke=\"black\"/>\n";
    }
    out += "<text x=\"" + num(x) + "\" y=\"" + num(kHeight - kMargin + 20.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           escape(groups[g]) + "</text>\n";
  }
  out += "</svg>\n";
  io::write_text_file(path, out);
}

}  // namespace depthkit::svg
