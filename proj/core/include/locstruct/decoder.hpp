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

#ifndef LOCSTRUCT_DECODER_HPP
#define LOCSTRUCT_DECODER_HPP

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "locstruct/losses.hpp"
#include "locstruct/parts.hpp"
#include "locstruct/rng.hpp"
#include "locstruct/training.hpp"

namespace locstruct {

// Everything needed to evaluate
//   f(x) = argmin_z sum_p sum_j alpha_j(x, p) pi(p|x) L_p(z_p, eta_j | x_p)
// for one query x. `aux` must outlive the problem.
struct DecodeProblem {
  PartScheme scheme;
  PartDistribution distribution = PartDistribution::uniform(1);
  std::optional<Object> input;
  std::span<const AuxiliarySample> aux;
  Eigen::MatrixXd alpha;  // m x |P|, column p is alpha(x, p)
  double kernel_sup = 1.0;
};

DecodeProblem make_decode_problem(const AlphaModel& model, const Object& x,
                                  const PartDistribution& pi);

struct DecodeResult {
  Object z;
  // Set when any part or coordinate fell back to a degenerate branch:
  // near-zero weight sums (least squares), a zero resultant (angular), or no
  // informative SGM iteration.
  bool degenerate = false;
  std::size_t degenerate_count = 0;
};

// The decoding objective at a candidate output.
double decode_objective(const DecodeProblem& problem, const Loss& loss, const Object& z);

// Finite per-coordinate output alphabet: characters for text outputs or
// numeric values otherwise. Exactly one of the two is non-empty.
struct OutputAlphabet {
  std::string symbols;
  std::vector<double> values;
};

struct ExactOptions {
  std::size_t budget = 1'000'000;
  OutputAlphabet alphabet;
};

// Enumerates every candidate; ties go to the lexicographically smallest.
DecodeResult decode_exact(const DecodeProblem& problem, const Loss& loss,
                          const ExactOptions& options);

enum class LeastSquaresMode {
  // z_p = sum_j w_j eta_j / sum_j w_j, the argmin of sum_j w_j |z - eta_j|^2.
  kNormalized,
  // z_p = sum_j w_j eta_j, the kernel ridge regression readout.
  kUnnormalized,
};

// Closed form for SquaredVector. Overlapping parts are merged per coordinate
// by pi-weighted averaging.
DecodeResult decode_least_squares(const DecodeProblem& problem,
                                  LeastSquaresMode mode = LeastSquaresMode::kNormalized);

// Closed form for AngularSinSq: theta* = atan2(s, c) / 2 with
// c = sum w cos 2 theta_j, s = sum w sin 2 theta_j per coordinate.
DecodeResult decode_angular(const DecodeProblem& problem);

// Closed-form combiners on precomputed per-part moments, shared by the
// decoders above and by readout-based batch prediction.
//   sums(e, p)   = sum_j alpha_j(x, p) eta_j[e]
//   totals(p)    = sum_j alpha_j(x, p)
DecodeResult combine_least_squares(const PartScheme& scheme, const PartDistribution& pi,
                                   const Eigen::MatrixXd& sums, const Eigen::VectorXd& totals,
                                   LeastSquaresMode mode, std::size_t channels = 1);
//   cos_sums(e, p) = sum_j alpha_j(x, p) cos(2 eta_j[e]), likewise sin_sums.
//   abs_totals(p)  = sum_j |alpha_j(x, p)|, scale of the degeneracy test.
DecodeResult combine_angular(const PartScheme& scheme, const PartDistribution& pi,
                             const Eigen::MatrixXd& cos_sums, const Eigen::MatrixXd& sin_sums,
                             const Eigen::VectorXd& abs_totals);

struct SgmOptions {
  std::size_t iterations = 20000;
  // gamma_t = c / sqrt(t); defaults to 1 / kernel_sup.
  std::optional<double> step_constant;
  // Average the last ceil(T/2) iterates; false returns z_T.
  bool tail_average = true;
  // Box for SquaredVector outputs.
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

// Stochastic subgradient decoding: sample p ~ pi, j ~ |alpha_j(x,p)| / A(x,p),
// step along sign(alpha_j) A(x,p) dL_p(z_p, eta_j), project, repeat.
DecodeResult decode_sgm(const DecodeProblem& problem, const Loss& loss,
                        const SgmOptions& options, Rng& rng);

// Wrap to [-pi, pi).
double wrap_angle(double a);

}  // namespace locstruct

#endif  // LOCSTRUCT_DECODER_HPP
