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

#ifndef LOCSTRUCT_KERNELS_HPP
#define LOCSTRUCT_KERNELS_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "locstruct/parts.hpp"

namespace locstruct {

// A kernel on (input, part) pairs.
//
// LinearParts and GaussianParts are kernels on extracted parts; evaluated on
// (x, p), (x', q) they act as their own restriction. Gaussian kernels use
// exp(-|a - b|^2 / (2 sigma^2)). Text parts are compared through their
// one-hot embedding: <a, b> counts agreeing positions and |a - b|^2 is twice
// the number of mismatches.
class Kernel {
 public:
  enum class Kind { kLinearParts, kGaussianParts, kRestriction, kGaussianGlobal, kSum };

  static Kernel linear_parts();
  static Kernel gaussian_parts(double bandwidth);
  static Kernel restriction(Kernel base);
  // k0(x, x') * [p == q] with k0 Gaussian on whole inputs.
  static Kernel gaussian_global(double bandwidth);
  static Kernel sum(Kernel universal, Kernel local);

  Kind kind() const { return kind_; }
  double bandwidth() const { return bandwidth_; }
  const Kernel& base() const { return children_.at(0); }
  const Kernel& universal() const { return children_.at(0); }
  const Kernel& local() const { return children_.at(1); }

  // Kernel between two extracted parts. Only for part kernels
  // (LinearParts, GaussianParts, Restriction).
  double eval_parts(const Object& a, const Object& b) const;

  // Full evaluation. `part_a`/`part_b` must be the extracted parts
  // scheme.extract(x, p) and scheme.extract(x2, q).
  double eval(const Object& x, PartIndex p, const Object& part_a, const Object& x2,
              PartIndex q, const Object& part_b) const;

  // True when the kernel only looks at the extracted parts.
  bool is_local() const;

  // kernel(x, x') = <phi(x_p), phi(x'_q)> with phi the flattened numeric
  // part. Holds for (restricted) LinearParts.
  bool has_linear_part_features() const;

  bool operator==(const Kernel&) const = default;

 private:
  Kind kind_ = Kind::kLinearParts;
  double bandwidth_ = 0.0;
  std::vector<Kernel> children_;
};

double kernel_eval(const Kernel& kernel, const Object& x, PartIndex p, const Object& x2,
                   PartIndex q, const PartScheme& scheme);

// (input, part) anchor. The input must outlive the anchor.
struct Anchor {
  const Object* input = nullptr;
  PartIndex part = 0;
};

// Anchor with its part extracted once.
struct PreparedAnchor {
  const Object* input = nullptr;
  PartIndex part = 0;
  Object piece;
};

std::vector<PreparedAnchor> prepare_anchors(std::span<const Anchor> anchors,
                                            const PartScheme& scheme);

// Dense symmetric Gram matrix; only the upper triangle is evaluated.
Eigen::MatrixXd gram_matrix(const Kernel& kernel, std::span<const Anchor> anchors,
                            const PartScheme& scheme);
Eigen::MatrixXd gram_matrix(const Kernel& kernel, std::span<const PreparedAnchor> anchors);

// v_j = k(anchor_j, (x, p)).
Eigen::VectorXd kernel_column(const Kernel& kernel, std::span<const PreparedAnchor> anchors,
                              const Object& x, PartIndex p, const Object& part);

// Numeric view of a part. Text parts throw UnsupportedError.
Eigen::VectorXd part_features(const Object& part);

}  // namespace locstruct

#endif  // LOCSTRUCT_KERNELS_HPP
