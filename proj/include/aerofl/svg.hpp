// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>
#include <vector>

namespace aerofl {

// Minimal self-contained SVG line/step chart writer; output is a single
// well-formed <svg> document with path elements, no external renderer.
class SvgChart {
 public:
  SvgChart(std::string title, std::string x_label, std::string y_label);

  void add_series(const std::string& label, const std::string& color,
                  std::vector<double> xs, std::vector<double> ys,
                  bool step = false);

  std::string render(int width = 760, int height = 460) const;

 private:
  struct Series {
    std::string label;
    std::string color;
    std::vector<double> xs, ys;
    bool step;
  };
  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
};

}  // namespace aerofl
