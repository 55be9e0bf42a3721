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

#ifndef LOCSTRUCT_LOCALITY_HPP
#define LOCSTRUCT_LOCALITY_HPP

#include <functional>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "locstruct/kernels.hpp"
#include "locstruct/parts.hpp"

namespace locstruct {

// S(a, b) between two parts: <a, b> (RawInner) or kbar(a, b)^2 (SquaredKernel).
class Similarity {
 public:
  enum class Kind { kRawInner, kSquaredKernel };

  static Similarity raw_inner() { return Similarity(Kind::kRawInner, Kernel::linear_parts()); }
  // `kernel` must be a part kernel.
  static Similarity squared_kernel(Kernel kernel);

  Kind kind() const { return kind_; }
  const Kernel& kernel() const { return kernel_; }
  double operator()(const Object& a, const Object& b) const;

 private:
  Similarity(Kind kind, Kernel kernel) : kind_(kind), kernel_(std::move(kernel)) {}
  Kind kind_;
  Kernel kernel_;
};

struct CovMapOptions {
  // Cap on the ordered cross-sample pairs used for E_{x,x'}; 0 uses all
  // n(n-1). Beyond the cap, pairs (i, i + o mod n) are taken over evenly
  // spaced offsets o so every sample enters the same number of pairs.
  // Cells are estimated for p <= q and mirrored.
  std::size_t max_pairs = 0;
};

struct LocalityReport {
  // C(p, q) = mean_i S(x_ip, x_iq) - mean_{i != i'} S(x_ip, x_i'q).
  Eigen::MatrixXd cov_map;
  // Jackknife (leave-one-sample-out) standard errors; +inf when n = 2.
  Eigen::MatrixXd std_err;
  // Largest |S| observed.
  double r_sq = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_pairs = 0;
  Similarity::Kind similarity = Similarity::Kind::kRawInner;
};

LocalityReport empirical_cov_map(std::span<const Object> samples, const PartScheme& scheme,
                                 const Similarity& similarity, const CovMapOptions& options = {});

struct LocalityConstants {
  double s_hat = 0.0;  // |P| q_hat
  double q_hat = 0.0;  // mean of C over all (p, q)
  // Decay rate of C / r^2 against d(p, q), fitted on off-diagonal cells with
  // C > 3 std_err. Absent with fewer than three such cells.
  std::optional<double> gamma_hat;
  std::size_t fit_points = 0;
  // Standard error of the sum of C entries, from the per-cell errors.
  double aggregate_std_err = 0.0;
};

using PartDistanceFn = std::function<double(PartIndex, PartIndex)>;

// Needs a uniform part distribution. The distance defaults to the scheme's.
LocalityConstants locality_constants(const LocalityReport& report, const PartScheme& scheme,
                                     const PartDistribution& pi,
                                     const PartDistanceFn& distance = {});

struct SequenceBound {
  double s_exact = 0.0;  // (r^2 / |P|) sum_{p,q} exp(-gamma |p - q|)
  double s_bound = 0.0;  // 2 r^2 / (1 - exp(-gamma))
  bool holds = false;
};

SequenceBound sequence_bound_check(double r_sq, double gamma, std::size_t num_parts);

}  // namespace locstruct

#endif  // LOCSTRUCT_LOCALITY_HPP
