// Copyright 2026 The quadplan Authors
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

#ifndef QUADPLAN_SVG_HPP_
#define QUADPLAN_SVG_HPP_

#include <string>
#include <vector>

namespace quadplan {

// Standalone SVG emission for plan/tracking comparisons, plus the matching
// CSV so the numbers behind every figure stay machine-readable.

struct PlotSeries {
  std::string label;
  std::vector<double> t, y;
  bool dashed = false;  // reference curves are dashed, live curves solid
  std::string color = "#1f77b4";
};

struct Subplot {
  std::string title;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Vertically stacked subplots sharing the x axis (time, seconds).
std::string render_time_series(const std::string& title, const std::vector<Subplot>& subplots);

struct ErrorBarGroup {
  std::string label;
  double mean = 0.0;
  double max = 0.0;
};

/// Bars show the mean, whiskers extend to the max.
std::string render_error_summary(const std::string& title, const std::string& y_label,
                                 const std::vector<ErrorBarGroup>& groups);

/// Long-format CSV: subplot,series,t,value.
std::string series_csv(const std::vector<Subplot>& subplots);
/// CSV: label,mean,max.
std::string error_csv(const std::vector<ErrorBarGroup>& groups);

}  // namespace quadplan

#endif  // QUADPLAN_SVG_HPP_
