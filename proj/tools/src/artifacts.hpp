/*
 * Copyright 2026 The locstruct Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LOCSTRUCT_TOOLS_ARTIFACTS_HPP
#define LOCSTRUCT_TOOLS_ARTIFACTS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "locstruct/bench.hpp"
#include "locstruct/locality.hpp"

namespace locstruct::tools {

inline constexpr const char* kBenchFormatLine = "# format: locstruct-bench-v1";
inline constexpr const char* kBenchHeader =
    "estimator,n,num_parts,gamma,repeat,lambda_chosen,test_error";

// Shortest round-trip decimal form; "nan" and "inf" spelled out.
std::string csv_number(double v);

std::string bench_csv(const BenchResult& result);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string cov_map_csv(const LocalityReport& report, const PartDistanceFn& distance);
std::string constants_csv(const LocalityReport& report, const LocalityConstants& constants);
std::string bound_csv(const std::vector<double>& gammas, const std::vector<std::size_t>& parts,
                      double r_sq);

std::string heatmap_svg(const Eigen::MatrixXd& values, const std::string& title);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

// Polyline plot. Log axes are used only when every value on them is positive.
std::string line_plot_svg(const std::vector<Series>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label, bool log_x,
                          bool log_y);

// One series per (estimator, |P|, gamma): median error against n.
std::vector<Series> bench_series(const std::vector<SummaryRow>& rows);

}  // namespace locstruct::tools

#endif  // LOCSTRUCT_TOOLS_ARTIFACTS_HPP
