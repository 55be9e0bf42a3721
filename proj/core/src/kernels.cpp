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

#include "locstruct/kernels.hpp"

#include <cmath>

#include "locstruct/errors.hpp"

namespace locstruct {
namespace {

void check_bandwidth(double bw) {
  if (!(bw > 0.0) || !std::isfinite(bw))
    throw DomainError("kernel bandwidth must be strictly positive");
}

struct InnerAndDistance {
  double inner = 0.0;
  double sq_dist = 0.0;
};

InnerAndDistance compare(const Object& a, const Object& b) {
  if (a.index() != b.index())
    throw ShapeError("cannot compare a text part with a numeric part");
  InnerAndDistance r;
  if (const auto* sa = std::get_if<std::string>(&a)) {
    const auto& sb = std::get<std::string>(b);
    if (sa->size() != sb.size())
      throw ShapeError("text parts of different lengths (" + std::to_string(sa->size()) +
                       " vs " + std::to_string(sb.size()) + ")");
    std::size_t same = 0;
    for (std::size_t i = 0; i < sa->size(); ++i) same += ((*sa)[i] == sb[i]);
    r.inner = static_cast<double>(same);
    r.sq_dist = 2.0 * static_cast<double>(sa->size() - same);
    return r;
  }
  const auto& ta = std::get<Tensor>(a).values;
  const auto& tb = std::get<Tensor>(b).values;
  if (ta.size() != tb.size())
    throw ShapeError("numeric parts of different sizes (" + std::to_string(ta.size()) +
                     " vs " + std::to_string(tb.size()) + ")");
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const double d = ta[i] - tb[i];
    r.inner += ta[i] * tb[i];
    r.sq_dist += d * d;
  }
  return r;
}

double linear(const Object& a, const Object& b) {
  if (std::holds_alternative<std::string>(a)) return compare(a, b).inner;
  const auto& ta = std::get<Tensor>(a).values;
  const auto* tb = std::get_if<Tensor>(&b);
  if (!tb) throw ShapeError("cannot compare a text part with a numeric part");
  if (ta.size() != tb->values.size())
    throw ShapeError("numeric parts of different sizes (" + std::to_string(ta.size()) +
                     " vs " + std::to_string(tb->values.size()) + ")");
  double s = 0.0;
  for (std::size_t i = 0; i < ta.size(); ++i) s += ta[i] * tb->values[i];
  return s;
}

double gaussian(const Object& a, const Object& b, double bw) {
  double sq = 0.0;
  if (std::holds_alternative<std::string>(a)) {
    sq = compare(a, b).sq_dist;
  } else {
    const auto& ta = std::get<Tensor>(a).values;
    const auto* tb = std::get_if<Tensor>(&b);
    if (!tb) throw ShapeError("cannot compare a text part with a numeric part");
    if (ta.size() != tb->values.size())
      throw ShapeError("numeric parts of different sizes (" + std::to_string(ta.size()) +
                       " vs " + std::to_string(tb->values.size()) + ")");
    for (std::size_t i = 0; i < ta.size(); ++i) {
      const double d = ta[i] - tb->values[i];
      sq += d * d;
    }
  }
  return std::exp(-sq / (2.0 * bw * bw));
}

}  // namespace

Kernel Kernel::linear_parts() { return Kernel{}; }

Kernel Kernel::gaussian_parts(double bandwidth) {
  check_bandwidth(bandwidth);
  Kernel k;
  k.kind_ = Kind::kGaussianParts;
  k.bandwidth_ = bandwidth;
  return k;
}

Kernel Kernel::restriction(Kernel base) {
  if (base.kind_ != Kind::kLinearParts && base.kind_ != Kind::kGaussianParts)
    throw DomainError("restriction kernels wrap a part kernel (linear or gaussian)");
  Kernel k;
  k.kind_ = Kind::kRestriction;
  k.children_.push_back(std::move(base));
  return k;
}

Kernel Kernel::gaussian_global(double bandwidth) {
  check_bandwidth(bandwidth);
  Kernel k;
  k.kind_ = Kind::kGaussianGlobal;
  k.bandwidth_ = bandwidth;
  return k;
}

Kernel Kernel::sum(Kernel universal, Kernel local) {
  Kernel k;
  k.kind_ = Kind::kSum;
  k.children_.push_back(std::move(universal));
  k.children_.push_back(std::move(local));
  return k;
}

bool Kernel::is_local() const {
  switch (kind_) {
    case Kind::kLinearParts:
    case Kind::kGaussianParts:
    case Kind::kRestriction: return true;
    case Kind::kGaussianGlobal: return false;
    case Kind::kSum: return children_[0].is_local() && children_[1].is_local();
  }
  return false;
}

bool Kernel::has_linear_part_features() const {
  return kind_ == Kind::kLinearParts ||
         (kind_ == Kind::kRestriction && children_[0].kind_ == Kind::kLinearParts);
}

double Kernel::eval_parts(const Object& a, const Object& b) const {
  switch (kind_) {
    case Kind::kLinearParts: return linear(a, b);
    case Kind::kGaussianParts: return gaussian(a, b, bandwidth_);
    case Kind::kRestriction: return children_[0].eval_parts(a, b);
    default: throw DomainError("eval_parts called on a kernel that needs whole inputs");
  }
}

double Kernel::eval(const Object& x, PartIndex p, const Object& part_a, const Object& x2,
                    PartIndex q, const Object& part_b) const {
  switch (kind_) {
    case Kind::kLinearParts:
    case Kind::kGaussianParts:
    case Kind::kRestriction: return eval_parts(part_a, part_b);
    case Kind::kGaussianGlobal:
      if (p != q) return 0.0;
      return gaussian(x, x2, bandwidth_);
    case Kind::kSum:
      return children_[0].eval(x, p, part_a, x2, q, part_b) +
             children_[1].eval(x, p, part_a, x2, q, part_b);
  }
  return 0.0;
}

double kernel_eval(const Kernel& kernel, const Object& x, PartIndex p, const Object& x2,
                   PartIndex q, const PartScheme& scheme) {
  const Object a = scheme.extract(x, p);
  const Object b = scheme.extract(x2, q);
  return kernel.eval(x, p, a, x2, q, b);
}

std::vector<PreparedAnchor> prepare_anchors(std::span<const Anchor> anchors,
                                            const PartScheme& scheme) {
  std::vector<PreparedAnchor> out;
  out.reserve(anchors.size());
  for (const Anchor& a : anchors)
    out.push_back(PreparedAnchor{a.input, a.part, scheme.extract(*a.input, a.part)});
  return out;
}

Eigen::MatrixXd gram_matrix(const Kernel& kernel, std::span<const PreparedAnchor> anchors) {
  if (anchors.empty()) throw DomainError("gram matrix of an empty anchor list");
  const auto m = static_cast<Eigen::Index>(anchors.size());
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& a = anchors[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i; j < m; ++j) {
      const auto& b = anchors[static_cast<std::size_t>(j)];
      const double v = kernel.eval(*a.input, a.part, a.piece, *b.input, b.part, b.piece);
      K(i, j) = v;
      K(j, i) = v;
    }
  }
  return K;
}

Eigen::MatrixXd gram_matrix(const Kernel& kernel, std::span<const Anchor> anchors,
                            const PartScheme& scheme) {
  const auto prepared = prepare_anchors(anchors, scheme);
  return gram_matrix(kernel, std::span<const PreparedAnchor>(prepared));
}

Eigen::VectorXd kernel_column(const Kernel& kernel, std::span<const PreparedAnchor> anchors,
                              const Object& x, PartIndex p, const Object& part) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(anchors.size()));
  for (std::size_t j = 0; j < anchors.size(); ++j) {
    const auto& a = anchors[j];
    v(static_cast<Eigen::Index>(j)) = kernel.eval(*a.input, a.part, a.piece, x, p, part);
  }
  return v;
}

Eigen::VectorXd part_features(const Object& part) {
  const auto* t = std::get_if<Tensor>(&part);
  if (!t) throw UnsupportedError("explicit features are only defined for numeric parts");
  return Eigen::Map<const Eigen::VectorXd>(t->values.data(),
                                           static_cast<Eigen::Index>(t->values.size()));
}

}  // namespace locstruct
