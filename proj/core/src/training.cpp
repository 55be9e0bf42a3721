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

#include "locstruct/training.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "locstruct/errors.hpp"

namespace locstruct {

std::vector<AuxiliarySample> generate_auxiliary(std::span<const Sample> train, std::size_t m,
                                                const PartScheme& scheme,
                                                const PartDistribution& pi, Rng& rng) {
  if (train.empty()) throw InsufficientDataError("auxiliary set from an empty training set");
  if (m == 0) throw DomainError("auxiliary set size must be positive");
  if (pi.num_parts() != scheme.num_parts())
    throw ShapeError("part distribution does not match the scheme");
  std::uniform_int_distribution<std::size_t> pick(0, train.size() - 1);
  std::vector<AuxiliarySample> aux;
  aux.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t i = pick(rng);
    const PartIndex p = pi.sample(rng);
    aux.push_back(AuxiliarySample{i, p, scheme.extract(train[i].y, p)});
  }
  return aux;
}

std::vector<AuxiliarySample> full_auxiliary(std::span<const Sample> train,
                                            const PartScheme& scheme) {
  std::vector<AuxiliarySample> aux;
  aux.reserve(train.size() * scheme.num_parts());
  for (std::size_t i = 0; i < train.size(); ++i)
    for (PartIndex p = 0; p < scheme.num_parts(); ++p)
      aux.push_back(AuxiliarySample{i, p, scheme.extract(train[i].y, p)});
  return aux;
}

AlphaModel AlphaModel::fit(std::vector<Object> inputs, std::vector<AuxiliarySample> aux,
                           Kernel kernel, double lambda, PartScheme scheme,
                           FitOptions options) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw DomainError("lambda must be strictly positive");
  if (aux.empty()) throw InsufficientDataError("cannot fit on an empty auxiliary set");
  for (const auto& a : aux) {
    if (a.chi_ref >= inputs.size())
      throw IndexError("auxiliary sample references input " + std::to_string(a.chi_ref) +
                       " of " + std::to_string(inputs.size()));
    if (a.part >= scheme.num_parts())
      throw IndexError("auxiliary sample part " + std::to_string(a.part) + " out of range");
  }

  AlphaModel model;
  model.inputs_ = std::make_shared<const std::vector<Object>>(std::move(inputs));
  model.aux_ = std::move(aux);
  model.kernel_ = std::move(kernel);
  model.lambda_ = lambda;
  model.scheme_ = std::move(scheme);

  std::vector<Anchor> anchors;
  anchors.reserve(model.aux_.size());
  for (const auto& a : model.aux_) anchors.push_back({&(*model.inputs_)[a.chi_ref], a.part});
  model.anchors_ = prepare_anchors(anchors, model.scheme_);

  const bool numeric = std::holds_alternative<Tensor>(model.anchors_.front().piece);
  const bool linear = model.kernel_.has_linear_part_features() && numeric;
  switch (options.solver) {
    case SolverKind::kAuto: {
      const std::size_t d = object_size(model.anchors_.front().piece);
      model.solver_ = linear && d < model.aux_.size() ? SolverKind::kLinearFeatures
                                                      : SolverKind::kDenseCholesky;
      break;
    }
    case SolverKind::kLinearFeatures:
      if (!linear)
        throw UnsupportedError("linear-feature solver needs a linear kernel on numeric parts");
      model.solver_ = SolverKind::kLinearFeatures;
      break;
    case SolverKind::kDenseCholesky: model.solver_ = SolverKind::kDenseCholesky; break;
  }
  model.factorize();
  return model;
}

void AlphaModel::factorize() {
  const auto m = static_cast<Eigen::Index>(aux_.size());
  const double mu = static_cast<double>(m) * lambda_;

  if (solver_ == SolverKind::kLinearFeatures) {
    const auto d = static_cast<Eigen::Index>(object_size(anchors_.front().piece));
    features_.resize(m, d);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto f = part_features(anchors_[static_cast<std::size_t>(j)].piece);
      if (f.size() != d) throw ShapeError("auxiliary parts of different sizes");
      features_.row(j) = f.transpose();
    }
    kernel_sup_ = features_.rowwise().squaredNorm().maxCoeff();
    Eigen::MatrixXd g = features_.transpose() * features_;
    g.diagonal().array() += mu;
    llt_.compute(g);
    if (llt_.info() != Eigen::Success)
      throw NumericalError("feature-space system is not positive definite");
    jitter_ = 0.0;
    return;
  }

  Eigen::MatrixXd K = gram_matrix(kernel_, std::span<const PreparedAnchor>(anchors_));
  kernel_sup_ = K.diagonal().maxCoeff();
  const double scale = std::max(K.trace() / static_cast<double>(m), 0.0);
  K.diagonal().array() += mu;

  // Jitter schedule: 0, then 1e-12 .. 1e-6 times trace(K)/m.
  std::vector<double> schedule = {0.0};
  for (double f = 1e-12; f <= 1e-6 * (1 + 1e-9); f *= 10.0) schedule.push_back(f * scale);
  double applied = 0.0;
  for (double jitter : schedule) {
    K.diagonal().array() += jitter - applied;
    applied = jitter;
    llt_.compute(K);
    if (llt_.info() == Eigen::Success) {
      jitter_ = jitter;
      return;
    }
  }
  const double rcond = Eigen::LDLT<Eigen::MatrixXd>(K).rcond();
  const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  std::ostringstream msg;
  msg << "Cholesky of K + m*lambda*I failed after jitter " << applied
      << " (condition estimate " << cond << ")";
  throw NumericalError(msg.str(), cond);
}

Eigen::VectorXd AlphaModel::apply_inverse(const Eigen::VectorXd& v) const {
  if (v.size() != static_cast<Eigen::Index>(aux_.size()))
    throw ShapeError("apply_inverse: vector length does not match m");
  if (solver_ == SolverKind::kLinearFeatures) {
    // Woodbury: (Phi Phi^T + mu I)^{-1} v = (v - Phi G^{-1} Phi^T v) / mu.
    const double mu = static_cast<double>(aux_.size()) * lambda_;
    const Eigen::VectorXd t = llt_.solve(features_.transpose() * v);
    return (v - features_ * t) / mu;
  }
  return llt_.solve(v);
}

Eigen::VectorXd AlphaModel::apply_system(const Eigen::VectorXd& a) const {
  const double mu = static_cast<double>(aux_.size()) * lambda_;
  if (solver_ == SolverKind::kLinearFeatures)
    return features_ * (features_.transpose() * a) + mu * a;
  return gram() * a + mu * a;
}

Eigen::MatrixXd AlphaModel::gram() const {
  if (solver_ == SolverKind::kLinearFeatures) return features_ * features_.transpose();
  return gram_matrix(kernel_, std::span<const PreparedAnchor>(anchors_));
}

Eigen::VectorXd AlphaModel::kernel_column(const Object& x, PartIndex p) const {
  const Object part = scheme_.extract(x, p);
  return locstruct::kernel_column(kernel_, anchors_, x, p, part);
}

Eigen::VectorXd AlphaModel::alpha_at(const Object& x, PartIndex p) const {
  if (solver_ == SolverKind::kLinearFeatures) {
    // alpha = (Phi Phi^T + mu I)^{-1} Phi f = Phi G^{-1} f.
    const Object part = scheme_.extract(x, p);
    const Eigen::VectorXd f = part_features(part);
    if (f.size() != features_.cols()) throw ShapeError("query part size does not match");
    return features_ * llt_.solve(f);
  }
  return llt_.solve(kernel_column(x, p));
}

Eigen::MatrixXd AlphaModel::alpha_all_parts(const Object& x) const {
  const auto m = static_cast<Eigen::Index>(aux_.size());
  const auto np = static_cast<Eigen::Index>(scheme_.num_parts());
  if (solver_ == SolverKind::kLinearFeatures) {
    Eigen::MatrixXd F(features_.cols(), np);
    for (Eigen::Index p = 0; p < np; ++p) {
      const Eigen::VectorXd f = part_features(scheme_.extract(x, static_cast<PartIndex>(p)));
      if (f.size() != features_.cols()) throw ShapeError("query part size does not match");
      F.col(p) = f;
    }
    return features_ * llt_.solve(F);
  }
  Eigen::MatrixXd V(m, np);
  for (Eigen::Index p = 0; p < np; ++p) V.col(p) = kernel_column(x, static_cast<PartIndex>(p));
  return llt_.solve(V);
}

AlphaModel::Readout AlphaModel::make_readout(const Eigen::MatrixXd& targets) const {
  if (targets.rows() != static_cast<Eigen::Index>(aux_.size()))
    throw ShapeError("readout targets need one row per auxiliary sample");
  Readout r;
  r.model_ = this;
  if (solver_ == SolverKind::kLinearFeatures) {
    // sum_j alpha_j H_j = H^T Phi G^{-1} f = (G^{-1} Phi^T H)^T f.
    r.coef_ = llt_.solve(features_.transpose() * targets);
  } else {
    r.coef_ = llt_.solve(targets);
  }
  return r;
}

Eigen::VectorXd AlphaModel::Readout::at(const Object& x, PartIndex p) const {
  if (model_->solver_ == SolverKind::kLinearFeatures) {
    const Eigen::VectorXd f = part_features(model_->scheme_.extract(x, p));
    if (f.size() != coef_.rows()) throw ShapeError("query part size does not match");
    return coef_.transpose() * f;
  }
  return coef_.transpose() * model_->kernel_column(x, p);
}

AlphaModel fit_alpha(std::span<const Sample> train, std::vector<AuxiliarySample> aux,
                     const Kernel& kernel, double lambda, const PartScheme& scheme,
                     FitOptions options) {
  std::vector<Object> inputs;
  inputs.reserve(train.size());
  for (const auto& s : train) inputs.push_back(s.x);
  return AlphaModel::fit(std::move(inputs), std::move(aux), kernel, lambda, scheme, options);
}

}  // namespace locstruct
