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

#ifndef LOCSTRUCT_BENCH_HPP
#define LOCSTRUCT_BENCH_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "locstruct/parts.hpp"
#include "locstruct/training.hpp"

namespace locstruct {

enum class Estimator {
  kGlobalLS,            // ridge regression on whole vectors
  kIndependentPartsLS,  // one ridge regression per part index
  kLocalLS,             // restriction linear kernel on the pooled part dataset
  kLocalDelta,          // restriction Gaussian kernel, angular decoding
  kGlobalDelta,         // Gaussian kernel on whole grids, angular decoding
};

std::string_view estimator_name(Estimator e);
Estimator estimator_from_name(std::string_view name);

enum class ErrorMetric {
  kMse,        // against the noisy test outputs
  kExcessMse,  // against the noiseless regression function
};

// log-spaced grid of `count` values over [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);

struct SyntheticConfig {
  std::size_t num_parts = 16;
  std::size_t block_dim = 50;
  double gamma = 1.0;
  std::size_t n_train = 100;
  std::size_t n_test = 500;
  double noise_std = 0.5;
  std::uint64_t seed = 0;
  std::vector<double> lambda_grid = log_grid(1e-6, 10.0, 8);
  std::vector<Estimator> estimators = {Estimator::kGlobalLS, Estimator::kIndependentPartsLS,
                                       Estimator::kLocalLS};
  double holdout_fraction = 0.2;
  ErrorMetric metric = ErrorMetric::kMse;
  std::size_t threads = 1;  // 0 = hardware concurrency

  void validate() const;
};

// M(gamma)_{pq} = exp(-gamma |p - q| / |P|).
Eigen::MatrixXd block_covariance(std::size_t num_parts, double gamma);

struct SyntheticDataset {
  std::vector<Sample> train;
  std::vector<Sample> test;
  Eigen::VectorXd w_bar;
  // Noiseless outputs w_bar^T x_p repeated over each block.
  std::vector<Tensor> train_mean;
  std::vector<Tensor> test_mean;
};

// x ~ N(0, M(gamma) (x) I_k), y_{p,c} = w_bar^T x_p + eps_{p,c}.
SyntheticDataset gen_synthetic_dataset(const SyntheticConfig& cfg, Rng& rng);

struct BenchRow {
  Estimator estimator = Estimator::kGlobalLS;
  std::size_t n = 0;
  std::size_t num_parts = 0;
  double gamma = 0.0;
  std::size_t repeat = 0;
  double lambda_chosen = 0.0;
  double test_error = 0.0;
  bool failed = false;
  std::string failure;
};

struct BenchResult {
  std::vector<BenchRow> rows;
};

// Trains GlobalLS / IndependentPartsLS / LocalLS on shared data per repeat.
// Repeat r uses the stream derive_seed(cfg.seed, {n, |P|, gamma, r}).
BenchResult run_estimator_comparison(const SyntheticConfig& cfg, std::size_t repeats);

struct PredictionSet {
  std::vector<Tensor> predictions;
  double lambda = 0.0;
};

// One estimator on one dataset with hold-out lambda selection.
PredictionSet fit_predict_synthetic(Estimator estimator, const SyntheticDataset& data,
                                    const SyntheticConfig& cfg);
double mean_squared_error(const std::vector<Tensor>& predictions,
                          const std::vector<Tensor>& targets);

struct AngularConfig {
  std::size_t grid_size = 12;
  std::size_t patch_size = 4;
  std::size_t stride = 2;
  std::size_t max_frequency = 2;  // band limit of the phase field
  double noise_std = 0.2;
  double bandwidth = 2.0;
  std::size_t n_train = 40;
  std::size_t n_test = 50;
  std::size_t max_aux = 1200;
  std::uint64_t seed = 0;
  std::vector<double> lambda_grid = log_grid(1e-6, 10.0, 8);
  std::vector<Estimator> estimators = {Estimator::kLocalDelta, Estimator::kGlobalDelta};
  double holdout_fraction = 0.2;
  std::size_t threads = 1;

  void validate() const;
  PartScheme scheme() const;
};

struct AngularDataset {
  std::vector<Sample> train;  // x: H x W x 2 (cos 2 theta, sin 2 theta) + noise, y: theta
  std::vector<Sample> test;
};

AngularDataset gen_angular_dataset(const AngularConfig& cfg, Rng& rng);

// Mean over test fields of the structured angular loss under uniform pi.
double angular_structured_error(const std::vector<Object>& predictions,
                                const std::vector<Sample>& test, const PartScheme& scheme);

enum class LearningTask { kSyntheticLS, kSyntheticAngular };

// Per-n sweep; cfg.n_train is replaced by each grid value.
BenchResult run_learning_curve(const std::vector<std::size_t>& n_grid,
                               const SyntheticConfig& cfg, std::size_t repeats);
BenchResult run_learning_curve(const std::vector<std::size_t>& n_grid,
                               const AngularConfig& cfg, std::size_t repeats);

struct SummaryRow {
  Estimator estimator = Estimator::kGlobalLS;
  std::size_t n = 0;
  std::size_t num_parts = 0;
  double gamma = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::size_t count = 0;
  std::size_t failed = 0;
};

// Medians and quartiles (linear interpolation) per (estimator, n, |P|, gamma).
std::vector<SummaryRow> summarize(const BenchResult& result);

// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

// Least-squares slope of log(error) against log(n).
double loglog_slope(const std::vector<double>& n, const std::vector<double>& error);

}  // namespace locstruct

#endif  // LOCSTRUCT_BENCH_HPP
