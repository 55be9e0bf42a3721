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

#ifndef LOCSTRUCT_LOSSES_HPP
#define LOCSTRUCT_LOSSES_HPP

#include <span>
#include <string_view>

#include "locstruct/parts.hpp"

namespace locstruct {

struct DecoderCaps {
  bool has_closed_form = false;
  bool is_subdifferentiable = false;
  bool parts_enumerable = false;
};

// Per-part loss L_p(z_p, y_p | x_p). The input part is part of the signature
// but none of the built-in losses read it.
class Loss {
 public:
  enum class Kind { kZeroOneWindow, kSquaredVector, kAngularSinSq };

  explicit Loss(Kind kind) : kind_(kind) {}
  static Loss from_name(std::string_view name);

  Kind kind() const { return kind_; }
  std::string_view name() const;
  DecoderCaps caps() const;

  double part_loss(const Object& z, const Object& y, const Object& x) const;

  // A subgradient of part_loss in z for numeric parts, written into `out`.
  // ZeroOneWindow has none and throws UnsupportedError.
  void part_subgradient(std::span<const double> z, std::span<const double> y,
                        std::span<double> out) const;

  bool operator==(const Loss&) const = default;

 private:
  Kind kind_;
};

// Delta(z, y | x) = sum_p pi(p|x) L_p(z_p, y_p | x_p).
double structured_loss(const Loss& loss, const Object& z, const Object& y, const Object& x,
                       const PartScheme& scheme, const PartDistribution& pi);

// Same weighted sum with arbitrary nonnegative per-part weights.
double weighted_part_loss_sum(const Loss& loss, const Object& z, const Object& y,
                              const Object& x, const PartScheme& scheme,
                              std::span<const double> weights);

}  // namespace locstruct

#endif  // LOCSTRUCT_LOSSES_HPP
