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

#include "locstruct/bench.hpp"
#include "locstruct/errors.hpp"
#include "locstruct/locality.hpp"
#include "support/test_support.hpp"

namespace locstruct {
namespace {

using testing::uniform_int;

// Vector-block samples as raw arrays for the naive oracle.
struct Blocks {
  std::size_t dim = 1;
  std::size_t parts = 1;
  std::vector<std::vector<double>> x;  // n samples of length dim * parts

  std::vector<Object> objects() const {
    std::vector<Object> out;
    for (const auto& v : x) out.push_back(Tensor::vector(v));
    return out;
  }
  PartScheme scheme() const { return PartScheme::vector_blocks(dim, parts); }
};

Blocks random_blocks(Rng& rng, std::size_t n, std::size_t dim, std::size_t parts) {
  Blocks b{dim, parts, {}};
  for (std::size_t i = 0; i < n; ++i) b.x.push_back(testing::normal_values(rng, dim * parts));
  return b;
}

// S(x_ip, x_kq) written out by hand; bandwidth 0 means raw inner product,
// otherwise the squared Gaussian exp(-|a - b|^2 / bandwidth^2).
double naive_similarity(const Blocks& b, std::size_t i, std::size_t p, std::size_t k,
                        std::size_t q, double bandwidth) {
  double dot = 0.0, d2 = 0.0;
  for (std::size_t e = 0; e < b.dim; ++e) {
    const double u = b.x[i][p * b.dim + e], v = b.x[k][q * b.dim + e];
    dot += u * v;
    d2 += (u - v) * (u - v);
  }
  if (bandwidth == 0.0) return dot;
  return std::exp(-d2 / (bandwidth * bandwidth));
}

double naive_cell(const Blocks& b, const std::vector<std::size_t>& keep, std::size_t p,
                  std::size_t q, double bandwidth) {
  double within = 0.0, cross = 0.0;
  std::size_t pairs = 0;
  for (auto i : keep) {
    within += naive_similarity(b, i, p, i, q, bandwidth);
    for (auto k : keep) {
      if (k == i) continue;
      cross += naive_similarity(b, i, p, k, q, bandwidth);
      ++pairs;
    }
  }
  return within / static_cast<double>(keep.size()) - cross / static_cast<double>(pairs);
}

TEST(CovMap, MatchesNaiveDoubleLoopAndJackknife) {
  Rng rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = uniform_int(rng, 3, 9);
    auto b = random_blocks(rng, n, uniform_int(rng, 1, 3), uniform_int(rng, 1, 4));
    const double bw = trial % 2 == 0 ? 0.0 : 1.3;
    const auto sim = bw == 0.0 ? Similarity::raw_inner()
                               : Similarity::squared_kernel(Kernel::gaussian_parts(bw));
    const auto objects = b.objects();
    const auto report = empirical_cov_map(objects, b.scheme(), sim);
    EXPECT_EQ(report.n_pairs, n * (n - 1));
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    double r_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t p = 0; p < b.parts; ++p)
          for (std::size_t q = 0; q < b.parts; ++q)
            r_sq = std::max(r_sq, std::fabs(naive_similarity(b, i, p, k, q, bw)));
    EXPECT_NEAR(report.r_sq, r_sq, 1e-12 * r_sq);
    for (std::size_t p = 0; p < b.parts; ++p) {
      for (std::size_t q = 0; q < b.parts; ++q) {
        const double full = naive_cell(b, all, p, q, bw);
        ASSERT_NEAR(report.cov_map(p, q), full, 1e-10 * (1 + std::fabs(full)))
            << trial << " " << p << " " << q << " n=" << n << " dim=" << b.dim;
        std::vector<double> loo;
        for (std::size_t drop = 0; drop < n; ++drop) {
          std::vector<std::size_t> keep;
          for (auto i : all)
            if (i != drop) keep.push_back(i);
          loo.push_back(naive_cell(b, keep, p, q, bw));
        }
        const double mean = std::accumulate(loo.begin(), loo.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : loo) ss += (v - mean) * (v - mean);
        const double se = std::sqrt((n - 1.0) / n * ss);
        ASSERT_NEAR(report.std_err(p, q), se, 1e-9 * (1 + se));
      }
    }
  }
}

TEST(CovMap, TextPartsUseLoopPath) {
  std::vector<Object> xs = {std::string("abab"), std::string("abba"), std::string("bbaa")};
  auto s = PartScheme::sequence_windows(4, 2);
  auto r = empirical_cov_map(xs, s, Similarity::raw_inner());
  // part 0 with itself: within mean 2; cross agreements ab/ab 2, ab/bb 1 (x2), ...
  double cross = 0.0;
  const std::vector<std::string> p0 = {"ab", "ab", "bb"};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      if (i != k)
        for (int e = 0; e < 2; ++e) cross += p0[i][e] == p0[k][e];
  EXPECT_NEAR(r.cov_map(0, 0), 2.0 - cross / 6.0, 1e-12);
}

TEST(CovMap, IndependentSignsAreUncorrelated) {
  Rng rng(4);
  const std::size_t n = 500, parts = 6;
  std::vector<Object> xs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(parts);
    for (auto& e : v) e = uniform_int(rng, 0, 1) ? 1.0 : -1.0;
    xs.push_back(Tensor::vector(v));
  }
  auto r = empirical_cov_map(xs, PartScheme::vector_blocks(1, parts), Similarity::raw_inner());
  std::size_t ok = 0, total = 0;
  for (std::size_t p = 0; p < parts; ++p)
    for (std::size_t q = 0; q < parts; ++q)
      if (p != q) ++total, ok += std::fabs(r.cov_map(p, q)) <= 3 * r.std_err(p, q);
  EXPECT_GE(ok, total - 2);
  for (std::size_t p = 0; p < parts; ++p) EXPECT_NEAR(r.cov_map(p, p), 1.0, 0.05);
}

TEST(CovMap, DuplicatedSignsFullyCorrelated) {
  Rng rng(5);
  std::vector<Object> xs;
  for (int i = 0; i < 2000; ++i) {
    const double s = uniform_int(rng, 0, 1) ? 1.0 : -1.0;
    xs.push_back(Tensor::vector({s, s, s}));
  }
  auto r = empirical_cov_map(xs, PartScheme::vector_blocks(1, 3), Similarity::raw_inner());
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) EXPECT_NEAR(r.cov_map(p, q), 1.0, 0.05);
}

TEST(CovMap, GaussianSquaredKernelDiagonal) {
  Rng rng(6);
  auto b = random_blocks(rng, 40, 2, 1);
  auto objects = b.objects();
  auto r = empirical_cov_map(objects, b.scheme(), Similarity::squared_kernel(Kernel::gaussian_parts(1.0)));
  double cross = 0.0;
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t k = 0; k < 40; ++k)
      if (i != k) cross += naive_similarity(b, i, 0, k, 0, 1.0);
  const double expect = 1.0 - cross / (40.0 * 39.0);
  EXPECT_GT(expect, 0.0);
  EXPECT_NEAR(r.cov_map(0, 0), expect, 1e-12);
}

TEST(CovMap, SymmetricAndPermutationInvariant) {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    auto b = random_blocks(rng, uniform_int(rng, 2, 30), uniform_int(rng, 1, 3), uniform_int(rng, 1, 5));
    auto objects = b.objects();
    for (const auto& sim : {Similarity::raw_inner(),
                            Similarity::squared_kernel(Kernel::gaussian_parts(1.0)),
                            Similarity::squared_kernel(Kernel::restriction(Kernel::linear_parts()))}) {
      auto r = empirical_cov_map(objects, b.scheme(), sim);
      ASSERT_TRUE(r.cov_map.isApprox(r.cov_map.transpose(), 0.0));
      auto shuffled = objects;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      auto r2 = empirical_cov_map(shuffled, b.scheme(), sim);
      const double scale = 1.0 + r.cov_map.cwiseAbs().maxCoeff();
      ASSERT_LE((r.cov_map - r2.cov_map).cwiseAbs().maxCoeff(), 1e-10 * scale);
      if (objects.size() > 2) {
        ASSERT_LE((r.std_err - r2.std_err).cwiseAbs().maxCoeff(),
                  1e-8 * (1 + r.std_err.cwiseAbs().maxCoeff()));
      }
      if (sim.kind() == Similarity::Kind::kSquaredKernel)
        for (Eigen::Index p = 0; p < r.cov_map.rows(); ++p)
          ASSERT_GE(r.cov_map(p, p), -3 * r.std_err(p, p));
    }
  }
}

TEST(CovMap, TwoSamplesHaveInfiniteError) {
  std::vector<Object> xs = {Tensor::vector({1, 2}), Tensor::vector({0, 1})};
  auto r = empirical_cov_map(xs, PartScheme::vector_blocks(1, 2), Similarity::raw_inner());
  EXPECT_TRUE(std::isinf(r.std_err(0, 1)));
  std::vector<Object> one = {Tensor::vector({1, 2})};
  EXPECT_THROW(empirical_cov_map(one, PartScheme::vector_blocks(1, 2), Similarity::raw_inner()),
               InsufficientDataError);
  EXPECT_THROW(Similarity::squared_kernel(Kernel::gaussian_global(1.0)), UnsupportedError);
}

TEST(CovMap, CirculantPairSubsample) {
  Rng rng(8);
  const std::size_t n = 50;
  auto b = random_blocks(rng, n, 2, 3);
  auto objects = b.objects();
  CovMapOptions opts;
  opts.max_pairs = 400;  // 8 offsets per sample
  auto r = empirical_cov_map(objects, b.scheme(), Similarity::raw_inner(), opts);
  EXPECT_EQ(r.n_pairs, 400u);
  std::vector<std::size_t> offsets;
  for (std::size_t k = 0; k < 8; ++k) offsets.push_back(1 + k * (n - 1) / 8);
  // Cells are estimated for p <= q and mirrored.
  for (std::size_t p = 0; p < 3; ++p) {
    for (std::size_t q = p; q < 3; ++q) {
      double within = 0.0, cross = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        within += naive_similarity(b, i, p, i, q, 0.0);
        for (auto o : offsets) cross += naive_similarity(b, i, p, (i + o) % n, q, 0.0);
      }
      ASSERT_NEAR(r.cov_map(p, q), within / n - cross / 400.0, 1e-10);
      ASSERT_EQ(r.cov_map(q, p), r.cov_map(p, q));
      ASSERT_TRUE(std::isfinite(r.std_err(p, q)));
    }
  }
  opts.max_pairs = n * (n - 1);
  auto all = empirical_cov_map(objects, b.scheme(), Similarity::raw_inner(), opts);
  auto ref = empirical_cov_map(objects, b.scheme(), Similarity::raw_inner());
  EXPECT_EQ(all.cov_map, ref.cov_map);
}

std::vector<Object> synthetic_inputs(std::size_t n, std::size_t parts, std::size_t dim,
                                     double gamma, std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.num_parts = parts;
  cfg.block_dim = dim;
  cfg.gamma = gamma;
  cfg.n_train = n;
  cfg.n_test = 1;
  cfg.noise_std = 0.0;
  Rng rng(seed);
  auto data = gen_synthetic_dataset(cfg, rng);
  std::vector<Object> xs;
  for (auto& s : data.train) xs.push_back(s.x);
  return xs;
}

TEST(LocalityConstants, IdenticalCopiesReachWorstCase) {
  const std::size_t parts = 8;
  auto xs = synthetic_inputs(300, parts, 6, 0.0, 1);
  auto scheme = PartScheme::vector_blocks(6, parts);
  auto r = empirical_cov_map(xs, scheme, Similarity::squared_kernel(Kernel::gaussian_parts(1.0)));
  auto c = locality_constants(r, scheme, PartDistribution::uniform(parts));
  EXPECT_NEAR(r.r_sq, 1.0, 1e-12);
  EXPECT_NEAR(c.s_hat, r.r_sq * parts, 0.1 * r.r_sq * parts);
  EXPECT_NEAR(c.q_hat * parts, c.s_hat, 1e-12);
}

TEST(LocalityConstants, IndependentPartsOnlyDiagonal) {
  Rng rng(9);
  const std::size_t n = 400, parts = 5;
  std::vector<Object> xs;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(parts);
    for (auto& e : v) e = uniform_int(rng, 0, 1) ? 1.0 : -1.0;
    xs.push_back(Tensor::vector(v));
  }
  auto scheme = PartScheme::vector_blocks(1, parts);
  auto r = empirical_cov_map(xs, scheme, Similarity::raw_inner());
  auto c = locality_constants(r, scheme, PartDistribution::uniform(parts));
  EXPECT_LE(std::fabs(c.s_hat - r.r_sq), 3 * c.aggregate_std_err);
  EXPECT_FALSE(c.gamma_hat.has_value());
}

TEST(LocalityConstants, RecoversDecayRate) {
  const std::size_t parts = 16;
  auto xs = synthetic_inputs(2000, parts, 5, 2.0, 2);
  auto scheme = PartScheme::vector_blocks(5, parts);
  auto r = empirical_cov_map(xs, scheme, Similarity::raw_inner());
  auto c = locality_constants(r, scheme, PartDistribution::uniform(parts),
                              [&](PartIndex p, PartIndex q) { return scheme.distance(p, q) / parts; });
  ASSERT_TRUE(c.gamma_hat.has_value());
  EXPECT_GE(*c.gamma_hat, 1.5);
  EXPECT_LE(*c.gamma_hat, 2.5);
  EXPECT_GE(c.fit_points, 3u);
}

TEST(LocalityConstants, Errors) {
  std::vector<Object> xs = {Tensor::vector({1, 2}), Tensor::vector({0, 1}), Tensor::vector({3, 1})};
  auto scheme = PartScheme::vector_blocks(1, 2);
  auto r = empirical_cov_map(xs, scheme, Similarity::raw_inner());
  EXPECT_THROW(locality_constants(r, scheme, PartDistribution::weighted({0.25, 0.75})),
               UnsupportedError);
  EXPECT_THROW(locality_constants(r, PartScheme::vector_blocks(1, 3), PartDistribution::uniform(3)),
               ShapeError);
}

double hand_sequence_sum(double r_sq, double gamma, std::size_t parts) {
  double total = 0.0;
  for (std::size_t p = 0; p < parts; ++p)
    for (std::size_t q = 0; q < parts; ++q)
      total += std::exp(-gamma * std::fabs(double(p) - double(q)));
  return r_sq * total / parts;
}

TEST(SequenceBound, Examples) {
  auto b = sequence_bound_check(1.0, std::log(2.0), 2);
  EXPECT_NEAR(b.s_exact, 1.5, 1e-12);
  EXPECT_NEAR(b.s_bound, 4.0, 1e-12);
  EXPECT_TRUE(b.holds);
  auto single = sequence_bound_check(0.7, 3.0, 1);
  EXPECT_DOUBLE_EQ(single.s_exact, 0.7);
  EXPECT_TRUE(single.holds);
  auto big = sequence_bound_check(1.0, 5.0, 100);
  EXPECT_LE(big.s_exact, 2.0 / (1.0 - std::exp(-5.0)));
  EXPECT_NEAR(2.0 / (1.0 - std::exp(-5.0)), 2.0136, 1e-4);
}

TEST(SequenceBound, HoldsOnGrid) {
  for (double gamma : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    for (std::size_t parts : {2u, 8u, 32u, 128u}) {
      auto b = sequence_bound_check(1.0, gamma, parts);
      EXPECT_NEAR(b.s_exact, hand_sequence_sum(1.0, gamma, parts), 1e-10 * b.s_exact);
      EXPECT_TRUE(b.holds) << gamma << " " << parts;
      EXPECT_LE(b.s_exact, b.s_bound);
    }
  }
}

TEST(SequenceBound, Errors) {
  EXPECT_THROW(sequence_bound_check(1.0, 0.0, 4), DomainError);
  EXPECT_THROW(sequence_bound_check(1.0, -1.0, 4), DomainError);
  EXPECT_THROW(sequence_bound_check(1.0, 1.0, 0), DomainError);
}

}  // namespace
}  // namespace locstruct
