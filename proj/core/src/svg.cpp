// Copyright 2026 The Calipso Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "calipso/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace calipso {

void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<PlotSeries>& series) {
  const int width = 720, height = 480;
  const int ml = 70, mr = 20, mt = 44, mb = 52;  // margins
  const double pw = width - ml - mr, ph = height - mt - mb;

  double x_min = std::numeric_limits<double>::max(), x_max = std::numeric_limits<double>::lowest();
  double y_min = 0, y_max = std::numeric_limits<double>::lowest();
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_max = std::max(y_max, y);
    }
  if (series.empty() || x_max <= x_min) throw std::invalid_argument("plot: no data");
  if (y_max <= y_min) y_max = y_min + 1;
  y_max *= 1.05;

  auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) { return mt + ph - (y - y_min) / (y_max - y_min) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "' viewBox='0 0 " << width << " " << height << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
      << "</text>\n";

  // Axes with 5 ticks each.
  svg << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw << "' y2='" << mt + ph
      << "' stroke='black'/>\n";
  svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << mt + ph
      << "' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x_min + (x_max - x_min) * i / 5.0;
    const double yv = y_min + (y_max - y_min) * i / 5.0;
    svg << "<line x1='" << px(xv) << "' y1='" << mt + ph << "' x2='" << px(xv) << "' y2='"
        << mt + ph + 5 << "' stroke='black'/>\n";
    svg << "<text x='" << px(xv) << "' y='" << mt + ph + 20
        << "' text-anchor='middle' font-size='11'>" << static_cast<int>(std::round(xv))
        << "</text>\n";
    svg << "<line x1='" << ml - 5 << "' y1='" << py(yv) << "' x2='" << ml << "' y2='" << py(yv)
        << "' stroke='black'/>\n";
    std::ostringstream lab;
    lab.precision(3);
    lab << yv;
    svg << "<text x='" << ml - 8 << "' y='" << py(yv) + 4
        << "' text-anchor='end' font-size='11'>" << lab.str() << "</text>\n";
  }
  svg << "<text x='" << ml + pw / 2 << "' y='" << height - 12
      << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
  svg << "<text x='16' y='" << mt + ph / 2 << "' text-anchor='middle' font-size='13' "
      << "transform='rotate(-90 16 " << mt + ph / 2 << ")'>" << y_label << "</text>\n";

  int legend_y = mt + 10;
  for (const auto& s : series) {
    svg << "<polyline fill='none' stroke='" << s.color << "' stroke-width='2' points='";
    for (const auto& [x, y] : s.points) svg << px(x) << "," << py(y) << " ";
    svg << "'/>\n";
    svg << "<line x1='" << ml + pw - 150 << "' y1='" << legend_y << "' x2='" << ml + pw - 120
        << "' y2='" << legend_y << "' stroke='" << s.color << "' stroke-width='2'/>\n";
    svg << "<text x='" << ml + pw - 114 << "' y='" << legend_y + 4 << "' font-size='12'>"
        << s.label << "</text>\n";
    legend_y += 18;
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << svg.str();
}

}  // namespace calipso
