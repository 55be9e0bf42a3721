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

#include "locstruct/losses.hpp"

#include <cmath>

#include "locstruct/errors.hpp"

namespace locstruct {
namespace {

const std::vector<double>& numeric(const Object& o, const char* what) {
  const auto* t = std::get_if<Tensor>(&o);
  if (!t) throw ShapeError(std::string(what) + " needs numeric parts");
  return t->values;
}

}  // namespace

Loss Loss::from_name(std::string_view name) {
  if (name == "zero_one_window") return Loss(Kind::kZeroOneWindow);
  if (name == "squared_vector") return Loss(Kind::kSquaredVector);
  if (name == "angular_sin_sq") return Loss(Kind::kAngularSinSq);
  throw DomainError("unknown loss '" + std::string(name) + "'");
}

std::string_view Loss::name() const {
  switch (kind_) {
    case Kind::kZeroOneWindow: return "zero_one_window";
    case Kind::kSquaredVector: return "squared_vector";
    case Kind::kAngularSinSq: return "angular_sin_sq";
  }
  return "";
}

DecoderCaps Loss::caps() const {
  switch (kind_) {
    case Kind::kZeroOneWindow: return {false, false, true};
    case Kind::kSquaredVector: return {true, true, false};
    case Kind::kAngularSinSq: return {true, true, false};
  }
  return {};
}

double Loss::part_loss(const Object& z, const Object& y, const Object& /*x*/) const {
  switch (kind_) {
    case Kind::kZeroOneWindow:
      if (z.index() != y.index() || object_size(z) != object_size(y))
        throw ShapeError("zero-one window loss on parts of different shape");
      return z == y ? 0.0 : 1.0;
    case Kind::kSquaredVector: {
      const auto& a = numeric(z, "squared loss");
      const auto& b = numeric(y, "squared loss");
      if (a.size() != b.size()) throw ShapeError("squared loss on parts of different sizes");
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      return s;
    }
    case Kind::kAngularSinSq: {
      const auto& a = numeric(z, "angular loss");
      const auto& b = numeric(y, "angular loss");
      if (a.size() != b.size()) throw ShapeError("angular loss on parts of different sizes");
      if (a.empty()) return 0.0;
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::sin(a[i] - b[i]);
        s += d * d;
      }
      return s / static_cast<double>(a.size());
    }
  }
  return 0.0;
}

void Loss::part_subgradient(std::span<const double> z, std::span<const double> y,
                            std::span<double> out) const {
  if (z.size() != y.size() || out.size() != z.size())
    throw ShapeError("subgradient on parts of different sizes");
  switch (kind_) {
    case Kind::kZeroOneWindow:
      throw UnsupportedError("zero-one window loss is not subdifferentiable");
    case Kind::kSquaredVector:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = 2.0 * (z[i] - y[i]);
      return;
    case Kind::kAngularSinSq: {
      // d/dz sin^2(z - y) = sin(2 (z - y)).
      const double scale = 1.0 / static_cast<double>(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = scale * std::sin(2.0 * (z[i] - y[i]));
      return;
    }
  }
}

double structured_loss(const Loss& loss, const Object& z, const Object& y, const Object& x,
                       const PartScheme& scheme, const PartDistribution& pi) {
  return weighted_part_loss_sum(loss, z, y, x, scheme, pi.probabilities());
}

double weighted_part_loss_sum(const Loss& loss, const Object& z, const Object& y,
                              const Object& x, const PartScheme& scheme,
                              std::span<const double> weights) {
  if (weights.size() != scheme.num_parts())
    throw ShapeError("part weights do not match the scheme");
  double total = 0.0;
  for (PartIndex p = 0; p < scheme.num_parts(); ++p) {
    const double w = weights[p];
    if (w == 0.0) continue;
    total += w * loss.part_loss(scheme.extract(z, p), scheme.extract(y, p), scheme.extract(x, p));
  }
  return total;
}

}  // namespace locstruct
