// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#include "aerofl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace aerofl {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

SvgChart::SvgChart(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)) {}

void SvgChart::add_series(const std::string& label, const std::string& color,
                          std::vector<double> xs, std::vector<double> ys,
                          bool step) {
  series_.push_back({label, color, std::move(xs), std::move(ys), step});
}

std::string SvgChart::render(int width, int height) const {
  const double ml = 64, mr = 16, mt = 36, mb = 44;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series_)
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      xmin = std::min(xmin, s.xs[i]);
      xmax = std::max(xmax, s.xs[i]);
      ymin = std::min(ymin, s.ys[i]);
      ymax = std::max(ymax, s.ys[i]);
    }
  if (!(xmin < xmax)) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (!(ymin < ymax)) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double y) { return mt + (1.0 - (y - ymin) / (ymax - ymin)) * ph; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title_ << "</text>\n";

  // Axes.
  out << "<path d=\"M " << fmt(ml) << " " << fmt(mt) << " L " << fmt(ml) << " "
      << fmt(mt + ph) << " L " << fmt(ml + pw) << " " << fmt(mt + ph)
      << "\" stroke=\"black\" fill=\"none\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = xmin + (xmax - xmin) * k / 4.0;
    const double yv = ymin + (ymax - ymin) * k / 4.0;
    out << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(mt + ph + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << fmt(xv) << "</text>\n";
    out << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(py(yv) + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"10\">" << fmt(yv) << "</text>\n";
  }
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"11\">" << x_label_ << "</text>\n";
  out << "<text x=\"14\" y=\"" << height / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
      << "transform=\"rotate(-90 14 " << height / 2 << ")\">" << y_label_
      << "</text>\n";

  int legend_row = 0;
  for (const auto& s : series_) {
    if (s.xs.empty()) continue;
    out << "<path d=\"M " << fmt(px(s.xs[0])) << " " << fmt(py(s.ys[0]));
    for (std::size_t i = 1; i < s.xs.size(); ++i) {
      if (s.step) out << " L " << fmt(px(s.xs[i])) << " " << fmt(py(s.ys[i - 1]));
      out << " L " << fmt(px(s.xs[i])) << " " << fmt(py(s.ys[i]));
    }
    out << "\" stroke=\"" << s.color << "\" fill=\"none\" stroke-width=\"1.5\"/>\n";
    const double ly = mt + 14 + 16 * legend_row++;
    out << "<rect x=\"" << fmt(ml + pw - 120) << "\" y=\"" << fmt(ly - 9)
        << "\" width=\"12\" height=\"3\" fill=\"" << s.color << "\"/>\n";
    out << "<text x=\"" << fmt(ml + pw - 104) << "\" y=\"" << fmt(ly - 4)
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << s.label
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace aerofl
