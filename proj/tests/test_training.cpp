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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "locstruct/errors.hpp"
#include "locstruct/training.hpp"
#include "support/test_support.hpp"

namespace locstruct {
namespace {

using testing::normal_vector;
using testing::uniform_int;

std::vector<Sample> vector_samples(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<Sample> out;
  for (std::size_t i = 0; i < n; ++i)
    out.push_back({normal_vector(rng, dim), normal_vector(rng, dim)});
  return out;
}

TEST(GenerateAuxiliary, SingleTrainingPoint) {
  Rng rng(1);
  auto s = PartScheme::vector_blocks(2, 3);
  auto train = vector_samples(rng, 1, 6);
  auto aux = generate_auxiliary(train, 50, s, PartDistribution::uniform(3), rng);
  ASSERT_EQ(aux.size(), 50u);
  for (const auto& a : aux) {
    EXPECT_EQ(a.chi_ref, 0u);
    EXPECT_EQ(a.eta, s.extract(train[0].y, a.part));
  }
}

TEST(GenerateAuxiliary, RequestedSize) {
  Rng rng(2);
  auto s = PartScheme::grid_patches(GridSpec{8, 8, 4, 4, 2, true});
  std::vector<Sample> train;
  for (int i = 0; i < 5; ++i)
    train.push_back({testing::normal_tensor(rng, {8, 8}), testing::normal_tensor(rng, {8, 8})});
  auto aux = generate_auxiliary(train, 30000, s, PartDistribution::uniform(s.num_parts()), rng);
  EXPECT_EQ(aux.size(), 30000u);
}

TEST(GenerateAuxiliary, CellFrequenciesWithinThreeSigma) {
  Rng rng = make_stream(2024, {});
  auto s = PartScheme::vector_blocks(1, 4);
  auto train = vector_samples(rng, 10, 4);
  const std::size_t m = 40000;
  auto aux = generate_auxiliary(train, m, s, PartDistribution::uniform(4), rng);
  std::vector<int> counts(40, 0);
  for (const auto& a : aux) ++counts[a.chi_ref * 4 + a.part];
  const double p = 1.0 / 40.0;
  const double sigma = std::sqrt(p * (1 - p) / m);
  for (int c : counts) EXPECT_NEAR(c / double(m), p, 3 * sigma);
}

TEST(GenerateAuxiliary, Errors) {
  Rng rng(3);
  auto s = PartScheme::vector_blocks(1, 4);
  std::vector<Sample> empty;
  EXPECT_THROW(generate_auxiliary(empty, 5, s, PartDistribution::uniform(4), rng),
               InsufficientDataError);
  auto train = vector_samples(rng, 2, 4);
  EXPECT_THROW(generate_auxiliary(train, 0, s, PartDistribution::uniform(4), rng), DomainError);
  EXPECT_THROW(generate_auxiliary(train, 5, s, PartDistribution::uniform(3), rng), ShapeError);
}

TEST(FullAuxiliary, IMajorOrder) {
  Rng rng(4);
  auto s = PartScheme::vector_blocks(2, 3);
  auto train = vector_samples(rng, 2, 6);
  auto aux = full_auxiliary(train, s);
  ASSERT_EQ(aux.size(), 6u);
  for (std::size_t j = 0; j < aux.size(); ++j) {
    EXPECT_EQ(aux[j].chi_ref, j / 3);
    EXPECT_EQ(aux[j].part, j % 3);
  }
}

AlphaModel one_anchor_model() {
  std::vector<Object> inputs = {Tensor::vector({0.5, -1.0})};
  std::vector<AuxiliarySample> aux = {{0, 0, Tensor::vector({1.0})}};
  return AlphaModel::fit(inputs, aux, Kernel::gaussian_parts(1.0), 1.0,
                         PartScheme::vector_blocks(2, 1));
}

TEST(FitAlpha, SingleAnchorInverse) {
  auto model = one_anchor_model();
  Eigen::VectorXd v(1);
  v << 1.0;
  EXPECT_NEAR(model.apply_inverse(v)(0), 0.5, 1e-15);
  EXPECT_NEAR(model.alpha_at(model.inputs()[0], 0)(0), 0.5, 1e-15);
  EXPECT_EQ(model.kernel_sup(), 1.0);
}

TEST(FitAlpha, DuplicateAnchorsHandSolved) {
  // (K + 2 * 0.5 I) a = [1, 1] with K = [[1, 1], [1, 1]]: 2a + a = 1.
  std::vector<Object> inputs = {Tensor::vector({0.0})};
  std::vector<AuxiliarySample> aux = {{0, 0, Tensor::vector({1.0})}, {0, 0, Tensor::vector({2.0})}};
  auto model = AlphaModel::fit(inputs, aux, Kernel::gaussian_parts(1.0), 0.5,
                               PartScheme::vector_blocks(1, 1));
  auto a = model.apply_inverse(Eigen::VectorXd::Ones(2));
  EXPECT_NEAR(a(0), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(a(1), 1.0 / 3.0, 1e-14);
}

TEST(FitAlpha, ResidualOnRandomModels) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto rm = testing::random_model(rng, uniform_int(rng, 1, 120));
    const auto& model = rm.model;
    for (int r = 0; r < 10; ++r) {
      Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(
          static_cast<Eigen::Index>(model.size()), [&] { return testing::uniform_real(rng, -1, 1); });
      const Eigen::VectorXd back = model.apply_system(model.apply_inverse(v));
      ASSERT_LE((back - v).norm() / v.norm(), 1e-8);
    }
  }
}

TEST(FitAlpha, ApplySystemMatchesGram) {
  Rng rng(6);
  auto rm = testing::random_model(rng, 20);
  Eigen::MatrixXd sys = rm.model.gram();
  sys.diagonal().array() += 20 * rm.model.lambda();
  Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(20, -1, 1);
  EXPECT_LE((sys * a - rm.model.apply_system(a)).norm(), 1e-10 * sys.norm());
}

TEST(AlphaAt, ZeroColumnGivesZeroAlpha) {
  std::vector<Object> inputs = {Tensor::vector({1, 2}), Tensor::vector({0, 3})};
  std::vector<AuxiliarySample> aux = {{0, 0, Tensor::vector({1})}, {1, 0, Tensor::vector({2})}};
  auto model = AlphaModel::fit(inputs, aux, Kernel::gaussian_global(1.0), 0.1,
                               PartScheme::vector_blocks(1, 2));
  const auto alpha = model.alpha_at(Tensor::vector({1, 2}), 1);
  EXPECT_EQ(alpha.cwiseAbs().maxCoeff(), 0.0);
}

TEST(AlphaAt, NeumannBoundAtLargeLambda) {
  Rng rng(7);
  std::vector<Object> inputs;
  for (int i = 0; i < 8; ++i) inputs.push_back(normal_vector(rng, 3));
  std::vector<AuxiliarySample> aux;
  for (std::size_t i = 0; i < inputs.size(); ++i) aux.push_back({i, 0, Tensor::vector({0.0})});
  const double lambda = 1e6;
  auto model = AlphaModel::fit(inputs, aux, Kernel::gaussian_parts(1.0), lambda,
                               PartScheme::vector_blocks(3, 1));
  const Object q = normal_vector(rng, 3);
  const auto v = model.kernel_column(q, 0);
  const auto alpha = model.alpha_at(q, 0);
  const double m = static_cast<double>(aux.size());
  EXPECT_LE(alpha.cwiseAbs().maxCoeff(), v.cwiseAbs().maxCoeff() / (m * lambda) + 1e-9);
}

TEST(AlphaAt, AuxPermutationPermutesAlpha) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto rm = testing::random_model(rng, uniform_int(rng, 2, 40));
    const auto& model = rm.model;
    std::vector<std::size_t> perm(model.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<AuxiliarySample> shuffled;
    for (auto j : perm) shuffled.push_back(model.aux()[j]);
    auto other = AlphaModel::fit(model.inputs(), shuffled, model.kernel(), model.lambda(),
                                 model.scheme());
    const Object q = testing::random_object(rng, rm.shape);
    const PartIndex p = uniform_int(rng, 0, model.scheme().num_parts() - 1);
    const auto a = model.alpha_at(q, p);
    const auto b = other.alpha_at(q, p);
    for (std::size_t j = 0; j < perm.size(); ++j)
      ASSERT_NEAR(b(static_cast<Eigen::Index>(j)), a(static_cast<Eigen::Index>(perm[j])),
                  1e-9 * (1 + a.cwiseAbs().maxCoeff()));
  }
}

TEST(AlphaAt, RestrictionDependsOnQueryPartOnly) {
  Rng rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    auto rm = testing::random_model(rng, uniform_int(rng, 1, 30), testing::KernelChoice::kRestriction);
    const auto& s = rm.model.scheme();
    const PartIndex p = uniform_int(rng, 0, s.num_parts() - 1);
    const PartIndex p2 = uniform_int(rng, 0, s.num_parts() - 1);
    auto x = testing::random_object(rng, rm.shape);
    auto x2 = testing::random_object(rng, rm.shape);
    const auto src = s.element_offsets(p, rm.shape.channels);
    const auto dst = s.element_offsets(p2, rm.shape.channels);
    for (std::size_t e = 0; e < src.size(); ++e) x2.values[dst[e]] = x.values[src[e]];
    ASSERT_EQ(s.extract(x, p), s.extract(x2, p2));
    const auto a = rm.model.alpha_at(x, p);
    const auto b = rm.model.alpha_at(x2, p2);
    ASSERT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Solvers, LinearFeaturesMatchDense) {
  Rng rng(10);
  auto s = PartScheme::vector_blocks(3, 4);
  auto train = vector_samples(rng, 25, 12);
  auto aux = full_auxiliary(train, s);
  auto kernel = Kernel::restriction(Kernel::linear_parts());
  for (double lambda : {1e-5, 1e-2, 1.0}) {
    auto dense = fit_alpha(train, aux, kernel, lambda, s, {SolverKind::kDenseCholesky});
    auto feat = fit_alpha(train, aux, kernel, lambda, s, {SolverKind::kLinearFeatures});
    auto automatic = fit_alpha(train, aux, kernel, lambda, s);
    EXPECT_EQ(automatic.solver(), SolverKind::kLinearFeatures);
    EXPECT_DOUBLE_EQ(dense.kernel_sup(), feat.kernel_sup());
    const Object q = normal_vector(rng, 12);
    for (PartIndex p = 0; p < 4; ++p) {
      const auto a = dense.alpha_at(q, p);
      const auto b = feat.alpha_at(q, p);
      ASSERT_LE((a - b).norm(), 1e-7 * (1 + a.norm()));
    }
  }
}

TEST(Solvers, Readout) {
  Rng rng(11);
  for (auto solver : {SolverKind::kDenseCholesky, SolverKind::kLinearFeatures}) {
    auto s = PartScheme::vector_blocks(2, 3);
    auto train = vector_samples(rng, 10, 6);
    auto aux = full_auxiliary(train, s);
    auto model = fit_alpha(train, aux, Kernel::restriction(Kernel::linear_parts()), 0.1, s,
                           {solver});
    Eigen::MatrixXd h(static_cast<Eigen::Index>(aux.size()), 3);
    for (Eigen::Index j = 0; j < h.rows(); ++j)
      h.row(j) << testing::uniform_real(rng, -1, 1), testing::uniform_real(rng, -1, 1), 1.0;
    auto readout = model.make_readout(h);
    EXPECT_EQ(readout.dim(), 3u);
    const Object q = normal_vector(rng, 6);
    for (PartIndex p = 0; p < 3; ++p) {
      const Eigen::VectorXd expect = h.transpose() * model.alpha_at(q, p);
      ASSERT_LE((readout.at(q, p) - expect).norm(), 1e-10 * (1 + expect.norm()));
    }
    EXPECT_THROW(model.make_readout(Eigen::MatrixXd::Ones(3, 1)), ShapeError);
  }
}

TEST(Solvers, JitterRescuesSingularSystems) {
  // Identical linear anchors with a tiny lambda stay solvable.
  std::vector<Object> inputs = {Tensor::vector({1.0, 2.0})};
  std::vector<AuxiliarySample> aux(6, AuxiliarySample{0, 0, Tensor::vector({0.0})});
  auto model = AlphaModel::fit(inputs, aux, Kernel::linear_parts(), 1e-300,
                               PartScheme::vector_blocks(2, 1), {SolverKind::kDenseCholesky});
  EXPECT_GT(model.jitter(), 0.0);
}

TEST(FitAlpha, Errors) {
  std::vector<Object> inputs = {Tensor::vector({1.0})};
  std::vector<AuxiliarySample> aux = {{0, 0, Tensor::vector({0.0})}};
  auto s = PartScheme::vector_blocks(1, 1);
  EXPECT_THROW(AlphaModel::fit(inputs, aux, Kernel::linear_parts(), 0.0, s), DomainError);
  EXPECT_THROW(AlphaModel::fit(inputs, {}, Kernel::linear_parts(), 1.0, s), InsufficientDataError);
  std::vector<AuxiliarySample> bad_ref = {{3, 0, Tensor::vector({0.0})}};
  EXPECT_THROW(AlphaModel::fit(inputs, bad_ref, Kernel::linear_parts(), 1.0, s), IndexError);
  std::vector<AuxiliarySample> bad_part = {{0, 2, Tensor::vector({0.0})}};
  EXPECT_THROW(AlphaModel::fit(inputs, bad_part, Kernel::linear_parts(), 1.0, s), IndexError);
  EXPECT_THROW(AlphaModel::fit(inputs, aux, Kernel::gaussian_parts(1.0), 1.0, s,
                               {SolverKind::kLinearFeatures}),
               UnsupportedError);
}

}  // namespace
}  // namespace locstruct
