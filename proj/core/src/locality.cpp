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

#include "locstruct/locality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "locstruct/errors.hpp"

namespace locstruct {
namespace {

// Per-part n x d feature matrices, or empty when the similarity has to be
// evaluated pair by pair.
struct PartMatrices {
  std::vector<Eigen::MatrixXd> rows;
  std::vector<Eigen::VectorXd> sq_norms;
};

bool matrix_path(const Similarity& s, const std::vector<std::vector<Object>>& pieces) {
  if (!std::holds_alternative<Tensor>(pieces.front().front())) return false;
  if (s.kind() == Similarity::Kind::kRawInner) return true;
  const auto k = s.kernel().kind();
  return k == Kernel::Kind::kLinearParts || k == Kernel::Kind::kGaussianParts;
}

PartMatrices build_matrices(const std::vector<std::vector<Object>>& pieces) {
  PartMatrices out;
  const std::size_t n = pieces.front().size();
  for (const auto& part : pieces) {
    const auto d = static_cast<Eigen::Index>(object_size(part.front()));
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), d);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& v = std::get<Tensor>(part[i]).values;
      if (static_cast<Eigen::Index>(v.size()) != d) throw ShapeError("parts of different sizes");
      m.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), d);
    }
    out.sq_norms.push_back(m.rowwise().squaredNorm());
    out.rows.push_back(std::move(m));
  }
  return out;
}

// S(x_ip, x_i'q) for all (i, i').
Eigen::MatrixXd cross_matrix(const Similarity& s, const PartMatrices& pm, std::size_t p,
                             std::size_t q) {
  Eigen::MatrixXd g = pm.rows[p] * pm.rows[q].transpose();
  if (s.kind() == Similarity::Kind::kRawInner) return g;
  if (s.kernel().kind() == Kernel::Kind::kLinearParts) return g.array().square().matrix();
  const double h = s.kernel().bandwidth();
  Eigen::MatrixXd d2 = (-2.0 * g).colwise() + pm.sq_norms[p];
  d2.rowwise() += pm.sq_norms[q].transpose();
  // exp(-d2 / (2 h^2)) squared.
  return (-d2.array().max(0.0) / (h * h)).exp().matrix();
}

struct CellSums {
  double within = 0.0;
  double cross = 0.0;
  std::vector<double> a;  // within term of sample i
  std::vector<double> b;  // cross terms involving sample i
  double max_abs = 0.0;
};

}  // namespace

Similarity Similarity::squared_kernel(Kernel kernel) {
  switch (kernel.kind()) {
    case Kernel::Kind::kLinearParts:
    case Kernel::Kind::kGaussianParts:
    case Kernel::Kind::kRestriction: break;
    default: throw UnsupportedError("squared-kernel similarity needs a part kernel");
  }
  return Similarity(Kind::kSquaredKernel, std::move(kernel));
}

double Similarity::operator()(const Object& a, const Object& b) const {
  const double k = kernel_.eval_parts(a, b);
  return kind_ == Kind::kRawInner ? k : k * k;
}

LocalityReport empirical_cov_map(std::span<const Object> samples, const PartScheme& scheme,
                                 const Similarity& similarity, const CovMapOptions& options) {
  const std::size_t n = samples.size();
  if (n < 2) throw InsufficientDataError("covariance map needs at least 2 samples");
  const std::size_t np = scheme.num_parts();

  std::vector<std::vector<Object>> pieces(np, std::vector<Object>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (PartIndex p = 0; p < np; ++p) pieces[p][i] = scheme.extract(samples[i], p);

  // Pair design: all ordered distinct pairs, or circulant offsets.
  const std::size_t all_pairs = n * (n - 1);
  std::vector<std::size_t> offsets;
  const bool full = options.max_pairs == 0 || options.max_pairs >= all_pairs;
  if (!full) {
    const std::size_t l = std::clamp<std::size_t>(options.max_pairs / n, 1, n - 1);
    for (std::size_t k = 0; k < l; ++k) offsets.push_back(1 + k * (n - 1) / l);
  }
  const std::size_t n_pairs = full ? all_pairs : n * offsets.size();
  const double involved = full ? 2.0 * static_cast<double>(n - 1)
                               : 2.0 * static_cast<double>(offsets.size());

  const bool use_matrix = full && matrix_path(similarity, pieces);
  PartMatrices pm;
  if (use_matrix) pm = build_matrices(pieces);

  LocalityReport report;
  report.cov_map = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(np),
                                         static_cast<Eigen::Index>(np));
  report.std_err = report.cov_map;
  report.n_samples = n;
  report.n_pairs = n_pairs;
  report.similarity = similarity.kind();

  const double dn = static_cast<double>(n);
  const double dpairs = static_cast<double>(n_pairs);
  CellSums c;
  c.a.resize(n);
  c.b.resize(n);
  std::vector<double> loo(n);
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t q = p; q < np; ++q) {
      std::fill(c.b.begin(), c.b.end(), 0.0);
      c.within = c.cross = c.max_abs = 0.0;
      if (use_matrix) {
        const Eigen::MatrixXd g = cross_matrix(similarity, pm, p, q);
        const Eigen::VectorXd rows = g.rowwise().sum();
        const Eigen::VectorXd cols = g.colwise().sum().transpose();
        for (std::size_t i = 0; i < n; ++i) {
          const auto ii = static_cast<Eigen::Index>(i);
          c.a[i] = g(ii, ii);
          c.b[i] = rows(ii) + cols(ii) - 2.0 * g(ii, ii);
          c.within += c.a[i];
        }
        c.cross = g.sum() - g.trace();
        c.max_abs = g.cwiseAbs().maxCoeff();
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          c.a[i] = similarity(pieces[p][i], pieces[q][i]);
          c.within += c.a[i];
          c.max_abs = std::max(c.max_abs, std::fabs(c.a[i]));
        }
        auto add_pair = [&](std::size_t i, std::size_t k) {
          const double v = similarity(pieces[p][i], pieces[q][k]);
          c.cross += v;
          c.b[i] += v;
          c.b[k] += v;
          c.max_abs = std::max(c.max_abs, std::fabs(v));
        };
        if (full) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
              if (k != i) add_pair(i, k);
        } else {
          for (std::size_t o : offsets)
            for (std::size_t i = 0; i < n; ++i) add_pair(i, (i + o) % n);
        }
      }
      report.r_sq = std::max(report.r_sq, c.max_abs);

      const double value = c.within / dn - c.cross / dpairs;
      double se = std::numeric_limits<double>::infinity();
      if (dpairs - involved > 0.0) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          loo[i] = (c.within - c.a[i]) / (dn - 1.0) - (c.cross - c.b[i]) / (dpairs - involved);
          mean += loo[i];
        }
        mean /= dn;
        double ss = 0.0;
        for (double v : loo) ss += (v - mean) * (v - mean);
        se = std::sqrt((dn - 1.0) / dn * ss);
      }
      const auto pi = static_cast<Eigen::Index>(p), qi = static_cast<Eigen::Index>(q);
      report.cov_map(pi, qi) = report.cov_map(qi, pi) = value;
      report.std_err(pi, qi) = report.std_err(qi, pi) = se;
    }
  }
  return report;
}

LocalityConstants locality_constants(const LocalityReport& report, const PartScheme& scheme,
                                     const PartDistribution& pi,
                                     const PartDistanceFn& distance) {
  if (!pi.is_uniform())
    throw UnsupportedError("locality constants are defined for a uniform part distribution");
  const auto np = report.cov_map.rows();
  if (np == 0 || report.cov_map.cols() != np ||
      static_cast<std::size_t>(np) != scheme.num_parts() ||
      pi.num_parts() != scheme.num_parts())
    throw ShapeError("covariance map does not match the scheme");
  const double dp = static_cast<double>(np);

  LocalityConstants out;
  out.q_hat = report.cov_map.sum() / (dp * dp);
  out.s_hat = dp * out.q_hat;
  out.aggregate_std_err = std::sqrt(report.std_err.array().square().sum()) / dp;

  std::vector<double> xs, ys;
  if (report.r_sq > 0.0) {
    for (Eigen::Index p = 0; p < np; ++p) {
      for (Eigen::Index q = 0; q < np; ++q) {
        if (p == q) continue;
        const double v = report.cov_map(p, q);
        if (!(v > 3.0 * report.std_err(p, q))) continue;
        const auto pp = static_cast<PartIndex>(p), qq = static_cast<PartIndex>(q);
        const double d = distance ? distance(pp, qq) : scheme.distance(pp, qq);
        xs.push_back(-d);
        ys.push_back(std::log(v / report.r_sq));
      }
    }
  }
  out.fit_points = xs.size();
  if (xs.size() >= 3) {
    const double k = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx > 0.0) out.gamma_hat = sxy / sxx;
  }
  return out;
}

SequenceBound sequence_bound_check(double r_sq, double gamma, std::size_t num_parts) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be positive");
  if (num_parts == 0) throw DomainError("num_parts must be positive");
  if (!(r_sq >= 0.0)) throw DomainError("r_sq must be nonnegative");
  double total = 0.0;
  for (std::size_t p = 0; p < num_parts; ++p)
    for (std::size_t q = 0; q < num_parts; ++q)
      total += std::exp(-gamma * static_cast<double>(p > q ? p - q : q - p));
  SequenceBound b;
  b.s_exact = r_sq / static_cast<double>(num_parts) * total;
  b.s_bound = 2.0 * r_sq / (1.0 - std::exp(-gamma));
  b.holds = b.s_exact <= b.s_bound + 1e-12;
  return b;
}

}  // namespace locstruct
