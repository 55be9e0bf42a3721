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

#ifndef LOCSTRUCT_TRAINING_HPP
#define LOCSTRUCT_TRAINING_HPP

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "locstruct/kernels.hpp"
#include "locstruct/parts.hpp"
#include "locstruct/rng.hpp"

namespace locstruct {

struct Sample {
  Object x;
  Object y;
};

// (chi_j, p_j, eta_j) with chi_j = inputs[chi_ref] and eta_j = [y_chi_ref]_p.
struct AuxiliarySample {
  std::size_t chi_ref = 0;
  PartIndex part = 0;
  Object eta;
};

// Draws m samples: i_j uniform on the training set with replacement,
// p_j ~ pi, eta_j = [y_{i_j}]_{p_j}.
std::vector<AuxiliarySample> generate_auxiliary(std::span<const Sample> train, std::size_t m,
                                                const PartScheme& scheme,
                                                const PartDistribution& pi, Rng& rng);

// Every (i, p) pair, i-major.
std::vector<AuxiliarySample> full_auxiliary(std::span<const Sample> train,
                                            const PartScheme& scheme);

enum class SolverKind {
  kAuto,
  // Cholesky of K + m lambda I with diagonal jitter escalation.
  kDenseCholesky,
  // For linear part kernels K = Phi Phi^T with Phi the m x d matrix of part
  // features: exact solve through (Phi^T Phi + m lambda I), O(m d^2).
  kLinearFeatures,
};

struct FitOptions {
  SolverKind solver = SolverKind::kAuto;
};

class AlphaModel {
 public:
  // `inputs` are the training inputs referenced by aux[j].chi_ref.
  static AlphaModel fit(std::vector<Object> inputs, std::vector<AuxiliarySample> aux,
                        Kernel kernel, double lambda, PartScheme scheme,
                        FitOptions options = {});

  std::size_t size() const { return aux_.size(); }
  const std::vector<AuxiliarySample>& aux() const { return aux_; }
  const std::vector<Object>& inputs() const { return *inputs_; }
  const Kernel& kernel() const { return kernel_; }
  double lambda() const { return lambda_; }
  const PartScheme& scheme() const { return scheme_; }
  SolverKind solver() const { return solver_; }
  // Diagonal jitter added before the factorization succeeded.
  double jitter() const { return jitter_; }
  // max_j K_jj.
  double kernel_sup() const { return kernel_sup_; }

  // (K + m lambda I)^{-1} v.
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& v) const;
  // (K + m lambda I) a, without the jitter.
  Eigen::VectorXd apply_system(const Eigen::VectorXd& a) const;
  // Recomputed Gram matrix K.
  Eigen::MatrixXd gram() const;

  // v(x, p)_j = k((chi_j, p_j), (x, p)).
  Eigen::VectorXd kernel_column(const Object& x, PartIndex p) const;
  Eigen::VectorXd alpha_at(const Object& x, PartIndex p) const;
  // m x |P| matrix whose column p is alpha(x, p).
  Eigen::MatrixXd alpha_all_parts(const Object& x) const;

  // Precomputes B = (K + m lambda I)^{-1} H for per-anchor targets H (m x t)
  // so that readout_at(x, p) = sum_j alpha_j(x, p) H_j costs one kernel
  // column (or one d-dimensional product for linear features).
  class Readout {
   public:
    Eigen::VectorXd at(const Object& x, PartIndex p) const;
    std::size_t dim() const { return static_cast<std::size_t>(coef_.cols()); }

   private:
    friend class AlphaModel;
    const AlphaModel* model_ = nullptr;
    Eigen::MatrixXd coef_;
  };
  Readout make_readout(const Eigen::MatrixXd& targets) const;

 private:
  AlphaModel() = default;
  void factorize();

  std::shared_ptr<const std::vector<Object>> inputs_;
  std::vector<AuxiliarySample> aux_;
  std::vector<PreparedAnchor> anchors_;
  Kernel kernel_;
  double lambda_ = 0.0;
  PartScheme scheme_;
  SolverKind solver_ = SolverKind::kDenseCholesky;
  double jitter_ = 0.0;
  double kernel_sup_ = 0.0;

  Eigen::LLT<Eigen::MatrixXd> llt_;  // of K + (m lambda + jitter) I, or of G
  Eigen::MatrixXd features_;         // Phi, m x d (linear features only)
};

AlphaModel fit_alpha(std::span<const Sample> train, std::vector<AuxiliarySample> aux,
                     const Kernel& kernel, double lambda, const PartScheme& scheme,
                     FitOptions options = {});

}  // namespace locstruct

#endif  // LOCSTRUCT_TRAINING_HPP
