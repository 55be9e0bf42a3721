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

#include "artifacts.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace locstruct::tools {
namespace {

std::string xml_escape(const std::string& s) {
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

std::string fixed(double v, int digits = 2) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

std::string short_number(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << v;
  return ss.str();
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string bench_csv(const BenchResult& result) {
  std::string out = std::string(kBenchFormatLine) + "\n" + kBenchHeader + "\n";
  for (const auto& r : result.rows) {
    out += std::string(estimator_name(r.estimator)) + "," + std::to_string(r.n) + "," +
           std::to_string(r.num_parts) + "," + csv_number(r.gamma) + "," +
           std::to_string(r.repeat) + "," + csv_number(r.lambda_chosen) + "," +
           csv_number(r.test_error) + "\n";
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = std::string(kBenchFormatLine) +
                    "\nestimator,n,num_parts,gamma,median,q1,q3,count,failed\n";
  for (const auto& r : rows) {
    out += std::string(estimator_name(r.estimator)) + "," + std::to_string(r.n) + "," +
           std::to_string(r.num_parts) + "," + csv_number(r.gamma) + "," +
           csv_number(r.median) + "," + csv_number(r.q1) + "," + csv_number(r.q3) + "," +
           std::to_string(r.count) + "," + std::to_string(r.failed) + "\n";
  }
  return out;
}

std::string cov_map_csv(const LocalityReport& report, const PartDistanceFn& distance) {
  std::string out = "p,q,distance,cov,std_err\n";
  for (Eigen::Index p = 0; p < report.cov_map.rows(); ++p)
    for (Eigen::Index q = 0; q < report.cov_map.cols(); ++q)
      out += std::to_string(p) + "," + std::to_string(q) + "," +
             csv_number(distance(static_cast<PartIndex>(p), static_cast<PartIndex>(q))) + "," +
             csv_number(report.cov_map(p, q)) + "," + csv_number(report.std_err(p, q)) + "\n";
  return out;
}

std::string constants_csv(const LocalityReport& report, const LocalityConstants& c) {
  std::string out = "name,value\n";
  out += "n_samples," + std::to_string(report.n_samples) + "\n";
  out += "n_pairs," + std::to_string(report.n_pairs) + "\n";
  out += "r_sq," + csv_number(report.r_sq) + "\n";
  out += "q_hat," + csv_number(c.q_hat) + "\n";
  out += "s_hat," + csv_number(c.s_hat) + "\n";
  out += "s_hat_std_err," + csv_number(c.aggregate_std_err) + "\n";
  out += "gamma_hat," +
         (c.gamma_hat ? csv_number(*c.gamma_hat) : std::string("nan")) + "\n";
  out += "gamma_fit_points," + std::to_string(c.fit_points) + "\n";
  return out;
}

std::string bound_csv(const std::vector<double>& gammas, const std::vector<std::size_t>& parts,
                      double r_sq) {
  std::string out = "gamma,num_parts,r_sq,s_exact,s_bound,holds\n";
  for (double g : gammas)
    for (std::size_t p : parts) {
      const auto b = sequence_bound_check(r_sq, g, p);
      out += csv_number(g) + "," + std::to_string(p) + "," + csv_number(r_sq) + "," +
             csv_number(b.s_exact) + "," + csv_number(b.s_bound) + "," +
             (b.holds ? "true" : "false") + "\n";
    }
  return out;
}

std::string heatmap_svg(const Eigen::MatrixXd& values, const std::string& title) {
  const auto rows = values.rows(), cols = values.cols();
  const double cell = std::max(4.0, std::min(40.0, 560.0 / static_cast<double>(std::max(rows, cols))));
  const double left = 40, top = 40;
  const double w = left + cell * static_cast<double>(cols) + 120;
  const double h = top + cell * static_cast<double>(rows) + 40;
  double lo = rows * cols > 0 ? values.minCoeff() : 0.0;
  double hi = rows * cols > 0 ? values.maxCoeff() : 1.0;
  if (!(hi > lo)) hi = lo + 1.0;
  auto color = [&](double v) {
    const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    const int r = static_cast<int>(std::lround(255 + t * (8 - 255)));
    const int g = static_cast<int>(std::lround(255 + t * (48 - 255)));
    const int b = static_cast<int>(std::lround(255 + t * (107 - 255)));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(w) << "\" height=\""
    << fixed(h) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << fixed(left) << "\" y=\"20\" font-size=\"14\">" << xml_escape(title)
    << "</text>\n";
  for (Eigen::Index p = 0; p < rows; ++p)
    for (Eigen::Index q = 0; q < cols; ++q)
      s << "<rect x=\"" << fixed(left + cell * static_cast<double>(q)) << "\" y=\""
        << fixed(top + cell * static_cast<double>(p)) << "\" width=\"" << fixed(cell)
        << "\" height=\"" << fixed(cell) << "\" fill=\"" << color(values(p, q)) << "\"/>\n";
  // Color bar.
  const double bx = left + cell * static_cast<double>(cols) + 20;
  const double bh = cell * static_cast<double>(rows);
  for (int i = 0; i < 20; ++i) {
    const double v = hi - (hi - lo) * (i + 0.5) / 20.0;
    s << "<rect x=\"" << fixed(bx) << "\" y=\"" << fixed(top + bh * i / 20.0)
      << "\" width=\"14\" height=\"" << fixed(bh / 20.0 + 0.5) << "\" fill=\"" << color(v)
      << "\"/>\n";
  }
  s << "<text x=\"" << fixed(bx + 18) << "\" y=\"" << fixed(top + 10) << "\">"
    << short_number(hi) << "</text>\n";
  s << "<text x=\"" << fixed(bx + 18) << "\" y=\"" << fixed(top + bh) << "\">"
    << short_number(lo) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

std::string line_plot_svg(const std::vector<Series>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label, bool log_x,
                          bool log_y) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  bool pos_x = true, pos_y = true;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pos_x = pos_x && s.x[i] > 0;
      pos_y = pos_y && s.y[i] > 0;
    }
  log_x = log_x && pos_x;
  log_y = log_y && pos_y;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!(x1 > x0)) x0 -= 0.5, x1 += 0.5;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;

  const double W = 640, H = 420, L = 70, R = 200, T = 40, B = 50;
  const double pw = W - L - R, ph = H - T - B;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return T + ph - (ty(v) - y0) / (y1 - y0) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << L << "\" y=\"22\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T + ph << "\" x2=\"" << L + pw << "\" y2=\"" << T + ph
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << T + ph
    << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 + (y1 - y0) * i / 4.0;
    const double vx = log_x ? std::pow(10.0, fx) : fx, vy = log_y ? std::pow(10.0, fy) : fy;
    const double sx = L + pw * i / 4.0, sy = T + ph - ph * i / 4.0;
    s << "<text x=\"" << fixed(sx) << "\" y=\"" << fixed(T + ph + 15)
      << "\" text-anchor=\"middle\">" << short_number(vx) << "</text>\n";
    s << "<text x=\"" << fixed(L - 5) << "\" y=\"" << fixed(sy + 4) << "\" text-anchor=\"end\">"
      << short_number(vy) << "</text>\n";
  }
  s << "<text x=\"" << fixed(L + pw / 2) << "\" y=\"" << fixed(H - 12)
    << "\" text-anchor=\"middle\">" << xml_escape(x_label) << (log_x ? " (log)" : "")
    << "</text>\n";
  s << "<text x=\"15\" y=\"" << fixed(T + ph / 2) << "\" transform=\"rotate(-90 15 "
    << fixed(T + ph / 2) << ")\" text-anchor=\"middle\">" << xml_escape(y_label)
    << (log_y ? " (log)" : "") << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& ser = series[k];
    const char* col = kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string pts;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      pts += fixed(px(ser.x[i])) + "," + fixed(py(ser.y[i])) + " ";
      s << "<circle cx=\"" << fixed(px(ser.x[i])) << "\" cy=\"" << fixed(py(ser.y[i]))
        << "\" r=\"3\" fill=\"" << col << "\"/>\n";
    }
    s << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts
      << "\"/>\n";
    s << "<text x=\"" << L + pw + 10 << "\" y=\"" << T + 14 * static_cast<double>(k) + 10
      << "\" fill=\"" << col << "\">" << xml_escape(ser.name) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<Series> bench_series(const std::vector<SummaryRow>& rows) {
  std::vector<Series> out;
  for (const auto& r : rows) {
    std::string name = std::string(estimator_name(r.estimator)) + " P=" +
                       std::to_string(r.num_parts);
    if (!std::isnan(r.gamma)) name += " g=" + short_number(r.gamma);
    auto it = std::find_if(out.begin(), out.end(), [&](const Series& s) { return s.name == name; });
    if (it == out.end()) {
      out.push_back(Series{name, {}, {}});
      it = out.end() - 1;
    }
    it->x.push_back(static_cast<double>(r.n));
    it->y.push_back(r.median);
  }
  return out;
}

}  // namespace locstruct::tools
