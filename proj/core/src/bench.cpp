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

#include "locstruct/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <thread>

#include "locstruct/decoder.hpp"
#include "locstruct/errors.hpp"
#include "locstruct/losses.hpp"

namespace locstruct {
namespace {

constexpr std::uint64_t kSyntheticTag = 0x53594e;
constexpr std::uint64_t kAngularTag = 0x414e47;

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  for (auto& th : pool) th.join();
}

void check_lambdas(const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("lambda grid is empty");
  for (double l : grid)
    if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("lambda grid entries must be > 0");
}

std::size_t holdout_size(std::size_t n, double fraction) {
  const auto h = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  if (n < 2 || fraction <= 0.0) return 0;
  return std::clamp<std::size_t>(h, 1, n - 1);
}

// Hold-out selection over the grid: fit on the leading samples, score on the
// trailing ones, keep the first minimizer. Without a hold-out set the middle
// of the grid is used.
template <class Score>
double select_lambda(const std::vector<double>& grid, std::size_t n_hold, Score&& score) {
  if (n_hold == 0) return grid[grid.size() / 2];
  double best = grid.front();
  double best_err = std::numeric_limits<double>::infinity();
  for (double l : grid) {
    double err;
    try {
      err = score(l);
    } catch (const NumericalError&) {
      continue;
    }
    if (err < best_err) {
      best_err = err;
      best = l;
    }
  }
  if (!std::isfinite(best_err)) throw NumericalError("no lambda on the grid could be fitted");
  return best;
}

// Least-squares training and prediction on a vector-block scheme with the
// decoder's unnormalized combiner.
std::vector<Tensor> ls_fit_predict(std::span<const Sample> train, std::span<const Object> queries,
                                   const PartScheme& scheme, const Kernel& kernel,
                                   double lambda) {
  auto aux = full_auxiliary(train, scheme);
  const std::size_t e = scheme.block_dim();
  Eigen::MatrixXd H(static_cast<Eigen::Index>(aux.size()), static_cast<Eigen::Index>(e + 1));
  for (std::size_t j = 0; j < aux.size(); ++j) {
    const auto& v = std::get<Tensor>(aux[j].eta).values;
    for (std::size_t c = 0; c < e; ++c)
      H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = v[c];
    H(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(e)) = 1.0;
  }
  const AlphaModel model = fit_alpha(train, std::move(aux), kernel, lambda, scheme);
  const auto readout = model.make_readout(H);
  const auto pi = PartDistribution::uniform(scheme.num_parts());
  const auto np = static_cast<Eigen::Index>(scheme.num_parts());
  std::vector<Tensor> out;
  out.reserve(queries.size());
  Eigen::MatrixXd sums(static_cast<Eigen::Index>(e), np);
  Eigen::VectorXd totals(np);
  for (const auto& x : queries) {
    for (Eigen::Index p = 0; p < np; ++p) {
      const Eigen::VectorXd r = readout.at(x, static_cast<PartIndex>(p));
      sums.col(p) = r.head(static_cast<Eigen::Index>(e));
      totals(p) = r(static_cast<Eigen::Index>(e));
    }
    auto res = combine_least_squares(scheme, pi, sums, totals, LeastSquaresMode::kUnnormalized);
    out.push_back(std::get<Tensor>(std::move(res.z)));
  }
  return out;
}

std::vector<Tensor> predict_synthetic(Estimator est, std::span<const Sample> train,
                                      std::span<const Object> queries,
                                      const SyntheticConfig& cfg, double lambda) {
  const std::size_t k = cfg.block_dim, np = cfg.num_parts;
  switch (est) {
    case Estimator::kGlobalLS:
      return ls_fit_predict(train, queries, PartScheme::vector_blocks(k * np, 1),
                            Kernel::linear_parts(), lambda);
    case Estimator::kLocalLS:
      return ls_fit_predict(train, queries, PartScheme::vector_blocks(k, np),
                            Kernel::restriction(Kernel::linear_parts()), lambda);
    case Estimator::kIndependentPartsLS: {
      const auto blocks = PartScheme::vector_blocks(k, np);
      const auto single = PartScheme::vector_blocks(k, 1);
      std::vector<Tensor> out(queries.size(), Tensor::zeros({k * np}));
      std::vector<Sample> part_train(train.size());
      std::vector<Object> part_queries(queries.size());
      for (PartIndex p = 0; p < np; ++p) {
        for (std::size_t i = 0; i < train.size(); ++i)
          part_train[i] = Sample{blocks.extract(train[i].x, p), blocks.extract(train[i].y, p)};
        for (std::size_t i = 0; i < queries.size(); ++i)
          part_queries[i] = blocks.extract(queries[i], p);
        const auto pred =
            ls_fit_predict(part_train, part_queries, single, Kernel::linear_parts(), lambda);
        for (std::size_t i = 0; i < queries.size(); ++i)
          std::copy(pred[i].values.begin(), pred[i].values.end(),
                    out[i].values.begin() + static_cast<std::ptrdiff_t>(p * k));
      }
      return out;
    }
    default:
      throw UnsupportedError("estimator " + std::string(estimator_name(est)) +
                             " is not defined for the synthetic regression task");
  }
}

std::vector<Object> inputs_of(std::span<const Sample> s) {
  std::vector<Object> out;
  out.reserve(s.size());
  for (const auto& x : s) out.push_back(x.x);
  return out;
}

std::vector<Tensor> outputs_of(std::span<const Sample> s) {
  std::vector<Tensor> out;
  out.reserve(s.size());
  for (const auto& x : s) out.push_back(std::get<Tensor>(x.y));
  return out;
}

PartScheme whole_grid(const AngularConfig& cfg) {
  return PartScheme::grid_patches(GridSpec{cfg.grid_size, cfg.grid_size, cfg.grid_size,
                                           cfg.grid_size, cfg.grid_size, false});
}

std::vector<Object> predict_angular(Estimator est, std::span<const Sample> train,
                                    std::span<const Object> queries, const AngularConfig& cfg,
                                    double lambda, Rng& rng) {
  PartScheme scheme = cfg.scheme();
  Kernel kernel = Kernel::restriction(Kernel::gaussian_parts(cfg.bandwidth));
  if (est == Estimator::kGlobalDelta) {
    // Same per-pixel length scale on the whole field.
    scheme = whole_grid(cfg);
    kernel = Kernel::gaussian_parts(cfg.bandwidth * static_cast<double>(cfg.grid_size) /
                                    static_cast<double>(cfg.patch_size));
  } else if (est != Estimator::kLocalDelta) {
    throw UnsupportedError("estimator " + std::string(estimator_name(est)) +
                           " is not defined for the angular task");
  }
  const auto pi = PartDistribution::uniform(scheme.num_parts());
  auto aux = train.size() * scheme.num_parts() <= cfg.max_aux
                 ? full_auxiliary(train, scheme)
                 : generate_auxiliary(train, cfg.max_aux, scheme, pi, rng);
  const AlphaModel model = fit_alpha(train, std::move(aux), kernel, lambda, scheme);
  std::vector<Object> out;
  out.reserve(queries.size());
  for (const auto& x : queries) {
    const auto problem = make_decode_problem(model, x, pi);
    out.push_back(decode_angular(problem).z);
  }
  return out;
}

double excess_or_mse(const SyntheticConfig& cfg, const SyntheticDataset& data,
                     const std::vector<Tensor>& pred) {
  if (cfg.metric == ErrorMetric::kExcessMse) return mean_squared_error(pred, data.test_mean);
  return mean_squared_error(pred, outputs_of(data.test));
}

void check_ascending(const std::vector<std::size_t>& grid) {
  if (grid.empty()) throw DomainError("n grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1]) throw DomainError("n grid must be strictly ascending");
}

}  // namespace

std::string_view estimator_name(Estimator e) {
  switch (e) {
    case Estimator::kGlobalLS: return "GlobalLS";
    case Estimator::kIndependentPartsLS: return "IndependentPartsLS";
    case Estimator::kLocalLS: return "LocalLS";
    case Estimator::kLocalDelta: return "LocalDelta";
    case Estimator::kGlobalDelta: return "GlobalDelta";
  }
  return "";
}

Estimator estimator_from_name(std::string_view name) {
  for (auto e : {Estimator::kGlobalLS, Estimator::kIndependentPartsLS, Estimator::kLocalLS,
                 Estimator::kLocalDelta, Estimator::kGlobalDelta})
    if (estimator_name(e) == name) return e;
  throw DomainError("unknown estimator '" + std::string(name) + "'");
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw DomainError("invalid log grid");
  if (count == 1) return {lo};
  std::vector<double> g(count);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

void SyntheticConfig::validate() const {
  if (num_parts == 0 || block_dim == 0) throw DomainError("num_parts and block_dim must be >= 1");
  if (n_train == 0 || n_test == 0) throw DomainError("n_train and n_test must be >= 1");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) throw DomainError("noise_std must be >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be >= 0");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0))
    throw DomainError("holdout_fraction must be in [0, 1)");
  check_lambdas(lambda_grid);
  if (estimators.empty()) throw DomainError("no estimators requested");
  for (auto e : estimators)
    if (e == Estimator::kLocalDelta || e == Estimator::kGlobalDelta)
      throw UnsupportedError(std::string(estimator_name(e)) +
                             " is only available for the angular task");
}

Eigen::MatrixXd block_covariance(std::size_t num_parts, double gamma) {
  const auto n = static_cast<Eigen::Index>(num_parts);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = 0; q < n; ++q)
      m(p, q) = std::exp(-gamma * static_cast<double>(std::abs(p - q)) / static_cast<double>(n));
  return m;
}

SyntheticDataset gen_synthetic_dataset(const SyntheticConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto np = static_cast<Eigen::Index>(cfg.num_parts);
  const auto k = static_cast<Eigen::Index>(cfg.block_dim);

  // Square-root factor F with F F^T = M. Pivoted LDLT keeps the rank-one
  // gamma = 0 case exact: every row of F is then the same.
  const Eigen::MatrixXd M = block_covariance(cfg.num_parts, cfg.gamma);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  const Eigen::VectorXd D = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || D.minCoeff() < -1e-10)
    throw NumericalError("factorization of the block covariance failed");
  Eigen::MatrixXd L = ldlt.matrixL();
  Eigen::MatrixXd F = L * D.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  F = ldlt.transpositionsP().transpose() * F;

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SyntheticDataset data;
  Eigen::VectorXd dir(k);
  for (Eigen::Index c = 0; c < k; ++c) dir(c) = normal(rng);
  const double radius = std::pow(unit(rng), 1.0 / static_cast<double>(k));
  data.w_bar = dir.normalized() * radius;

  const std::size_t dim = cfg.num_parts * cfg.block_dim;
  auto draw = [&](std::vector<Sample>& set, std::vector<Tensor>& mean, std::size_t count) {
    set.reserve(count);
    mean.reserve(count);
    Eigen::MatrixXd Z(np, k);
    for (std::size_t i = 0; i < count; ++i) {
      for (Eigen::Index p = 0; p < np; ++p)
        for (Eigen::Index c = 0; c < k; ++c) Z(p, c) = normal(rng);
      const Eigen::MatrixXd X = F * Z;
      const Eigen::VectorXd resp = X * data.w_bar;
      Tensor x = Tensor::zeros({dim}), y = Tensor::zeros({dim}), f = Tensor::zeros({dim});
      for (Eigen::Index p = 0; p < np; ++p) {
        for (Eigen::Index c = 0; c < k; ++c) {
          const auto idx = static_cast<std::size_t>(p * k + c);
          x.values[idx] = X(p, c);
          f.values[idx] = resp(p);
          y.values[idx] = resp(p) + cfg.noise_std * normal(rng);
        }
      }
      set.push_back(Sample{std::move(x), std::move(y)});
      mean.push_back(std::move(f));
    }
  };
  draw(data.train, data.train_mean, cfg.n_train);
  draw(data.test, data.test_mean, cfg.n_test);
  return data;
}

double mean_squared_error(const std::vector<Tensor>& predictions,
                          const std::vector<Tensor>& targets) {
  if (predictions.size() != targets.size() || predictions.empty())
    throw ShapeError("prediction and target counts differ");
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& a = predictions[i].values;
    const auto& b = targets[i].values;
    if (a.size() != b.size()) throw ShapeError("prediction and target sizes differ");
    for (std::size_t c = 0; c < a.size(); ++c) total += (a[c] - b[c]) * (a[c] - b[c]);
    count += a.size();
  }
  return total / static_cast<double>(count);
}

PredictionSet fit_predict_synthetic(Estimator estimator, const SyntheticDataset& data,
                                    const SyntheticConfig& cfg) {
  const std::span<const Sample> train(data.train);
  const std::size_t n_hold = holdout_size(train.size(), cfg.holdout_fraction);
  const auto fit_part = train.first(train.size() - n_hold);
  const auto hold_part = train.last(n_hold);
  const auto hold_x = inputs_of(hold_part);
  const auto hold_y = outputs_of(hold_part);
  PredictionSet out;
  out.lambda = select_lambda(cfg.lambda_grid, n_hold, [&](double l) {
    return mean_squared_error(predict_synthetic(estimator, fit_part, hold_x, cfg, l), hold_y);
  });
  out.predictions = predict_synthetic(estimator, train, inputs_of(data.test), cfg, out.lambda);
  return out;
}

BenchResult run_estimator_comparison(const SyntheticConfig& cfg, std::size_t repeats) {
  cfg.validate();
  if (repeats == 0) throw DomainError("repeats must be >= 1");
  const std::size_t ne = cfg.estimators.size();
  BenchResult result;
  result.rows.resize(repeats * ne);
  parallel_for(repeats, cfg.threads, [&](std::size_t r) {
    Rng rng = make_stream(cfg.seed, {kSyntheticTag, cfg.n_train, cfg.num_parts,
                                     coord_of(cfg.gamma), r});
    std::optional<SyntheticDataset> data;
    std::string data_error;
    try {
      data = gen_synthetic_dataset(cfg, rng);
    } catch (const std::exception& e) {
      data_error = e.what();
    }
    for (std::size_t e = 0; e < ne; ++e) {
      BenchRow& row = result.rows[r * ne + e];
      row.estimator = cfg.estimators[e];
      row.n = cfg.n_train;
      row.num_parts = cfg.num_parts;
      row.gamma = cfg.gamma;
      row.repeat = r;
      try {
        if (!data) throw NumericalError(data_error);
        const auto pred = fit_predict_synthetic(row.estimator, *data, cfg);
        row.lambda_chosen = pred.lambda;
        row.test_error = excess_or_mse(cfg, *data, pred.predictions);
        if (!std::isfinite(row.test_error)) throw NumericalError("non-finite test error");
      } catch (const std::exception& ex) {
        row.failed = true;
        row.failure = ex.what();
        row.lambda_chosen = row.test_error = std::numeric_limits<double>::quiet_NaN();
      }
    }
  });
  return result;
}

BenchResult run_learning_curve(const std::vector<std::size_t>& n_grid,
                               const SyntheticConfig& cfg, std::size_t repeats) {
  check_ascending(n_grid);
  BenchResult result;
  for (std::size_t n : n_grid) {
    SyntheticConfig c = cfg;
    c.n_train = n;
    auto part = run_estimator_comparison(c, repeats);
    result.rows.insert(result.rows.end(), part.rows.begin(), part.rows.end());
  }
  return result;
}

void AngularConfig::validate() const {
  if (grid_size == 0 || patch_size == 0 || stride == 0 || patch_size > grid_size)
    throw DomainError("invalid angular grid geometry");
  if (n_train == 0 || n_test == 0) throw DomainError("n_train and n_test must be >= 1");
  if (!(noise_std >= 0.0)) throw DomainError("noise_std must be >= 0");
  if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be > 0");
  if (max_aux == 0) throw DomainError("max_aux must be >= 1");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0))
    throw DomainError("holdout_fraction must be in [0, 1)");
  check_lambdas(lambda_grid);
  if (estimators.empty()) throw DomainError("no estimators requested");
  for (auto e : estimators)
    if (e != Estimator::kLocalDelta && e != Estimator::kGlobalDelta)
      throw UnsupportedError(std::string(estimator_name(e)) +
                             " is not available for the angular task");
}

PartScheme AngularConfig::scheme() const {
  return PartScheme::grid_patches(
      GridSpec{grid_size, grid_size, patch_size, patch_size, stride, true});
}

AngularDataset gen_angular_dataset(const AngularConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t g = cfg.grid_size;
  const auto f = static_cast<int>(cfg.max_frequency);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
  const std::size_t terms = static_cast<std::size_t>((2 * f + 1) * (2 * f + 1) - 1);
  const double amp = terms > 0 ? 1.0 / std::sqrt(static_cast<double>(terms)) : 0.0;

  auto draw = [&](std::size_t count) {
    std::vector<Sample> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<double> field(g * g, phase(rng));
      for (int a = -f; a <= f; ++a) {
        for (int b = -f; b <= f; ++b) {
          if (a == 0 && b == 0) continue;
          const double ca = amp * normal(rng), cb = amp * normal(rng);
          for (std::size_t u = 0; u < g; ++u)
            for (std::size_t v = 0; v < g; ++v) {
              const double t = 2.0 * std::numbers::pi *
                               (a * static_cast<double>(u) + b * static_cast<double>(v)) /
                               static_cast<double>(g);
              field[u * g + v] += ca * std::cos(t) + cb * std::sin(t);
            }
        }
      }
      Tensor x = Tensor::zeros({g, g, 2}), y = Tensor::zeros({g, g});
      for (std::size_t c = 0; c < g * g; ++c) {
        const double theta = wrap_angle(field[c]);
        y.values[c] = theta;
        x.values[2 * c] = std::cos(2.0 * theta) + cfg.noise_std * normal(rng);
        x.values[2 * c + 1] = std::sin(2.0 * theta) + cfg.noise_std * normal(rng);
      }
      out.push_back(Sample{std::move(x), std::move(y)});
    }
    return out;
  };
  AngularDataset data;
  data.train = draw(cfg.n_train);
  data.test = draw(cfg.n_test);
  return data;
}

double angular_structured_error(const std::vector<Object>& predictions,
                                const std::vector<Sample>& test, const PartScheme& scheme) {
  if (predictions.size() != test.size() || test.empty())
    throw ShapeError("prediction and target counts differ");
  const Loss loss(Loss::Kind::kAngularSinSq);
  const auto pi = PartDistribution::uniform(scheme.num_parts());
  double total = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i)
    total += structured_loss(loss, predictions[i], test[i].y, test[i].x, scheme, pi);
  return total / static_cast<double>(test.size());
}

BenchResult run_learning_curve(const std::vector<std::size_t>& n_grid, const AngularConfig& cfg,
                               std::size_t repeats) {
  cfg.validate();
  check_ascending(n_grid);
  if (repeats == 0) throw DomainError("repeats must be >= 1");
  const std::size_t ne = cfg.estimators.size();
  const PartScheme scheme = cfg.scheme();
  BenchResult result;
  result.rows.resize(n_grid.size() * repeats * ne);
  parallel_for(n_grid.size() * repeats, cfg.threads, [&](std::size_t job) {
    const std::size_t ni = job / repeats, r = job % repeats;
    AngularConfig c = cfg;
    c.n_train = n_grid[ni];
    const std::uint64_t data_seed = derive_seed(cfg.seed, {kAngularTag, c.n_train, r});
    Rng rng(data_seed);
    const AngularDataset data = gen_angular_dataset(c, rng);
    const std::span<const Sample> train(data.train);
    const std::size_t n_hold = holdout_size(train.size(), c.holdout_fraction);
    const auto fit_part = train.first(train.size() - n_hold);
    const auto hold_part = train.last(n_hold);
    const std::vector<Sample> hold(hold_part.begin(), hold_part.end());
    const auto hold_x = inputs_of(hold_part);
    for (std::size_t e = 0; e < ne; ++e) {
      BenchRow& row = result.rows[job * ne + e];
      row.estimator = c.estimators[e];
      row.n = c.n_train;
      row.num_parts = scheme.num_parts();
      row.gamma = std::numeric_limits<double>::quiet_NaN();
      row.repeat = r;
      try {
        const double lambda = select_lambda(c.lambda_grid, n_hold, [&](double l) {
          Rng aux_rng = make_stream(data_seed, {static_cast<std::uint64_t>(row.estimator),
                                                coord_of(l)});
          return angular_structured_error(
              predict_angular(row.estimator, fit_part, hold_x, c, l, aux_rng), hold, scheme);
        });
        Rng aux_rng = make_stream(data_seed, {static_cast<std::uint64_t>(row.estimator)});
        const auto pred = predict_angular(row.estimator, train, inputs_of(data.test), c, lambda,
                                          aux_rng);
        row.lambda_chosen = lambda;
        row.test_error = angular_structured_error(pred, data.test, scheme);
      } catch (const std::exception& ex) {
        row.failed = true;
        row.failure = ex.what();
        row.lambda_chosen = row.test_error = std::numeric_limits<double>::quiet_NaN();
      }
    }
  });
  return result;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return values[lo] + t * (values[hi] - values[lo]);
}

std::vector<SummaryRow> summarize(const BenchResult& result) {
  using Key = std::tuple<int, std::size_t, std::size_t, std::uint64_t>;
  std::map<Key, std::size_t> index;
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> values;
  for (const auto& row : result.rows) {
    const Key key{static_cast<int>(row.estimator), row.n, row.num_parts, coord_of(row.gamma)};
    auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) {
      SummaryRow s;
      s.estimator = row.estimator;
      s.n = row.n;
      s.num_parts = row.num_parts;
      s.gamma = row.gamma;
      out.push_back(s);
      values.emplace_back();
    }
    SummaryRow& s = out[it->second];
    if (row.failed) {
      ++s.failed;
    } else {
      ++s.count;
      values[it->second].push_back(row.test_error);
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].median = quantile(values[i], 0.5);
    out[i].q1 = quantile(values[i], 0.25);
    out[i].q3 = quantile(values[i], 0.75);
  }
  return out;
}

double loglog_slope(const std::vector<double>& n, const std::vector<double>& error) {
  if (n.size() != error.size() || n.size() < 2) throw DomainError("slope needs >= 2 points");
  double mx = 0.0, my = 0.0;
  const double k = static_cast<double>(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(n[i] > 0.0) || !(error[i] > 0.0)) throw DomainError("log-log slope needs positive values");
    mx += std::log(n[i]);
    my += std::log(error[i]);
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double dx = std::log(n[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(error[i]) - my);
  }
  if (sxx == 0.0) throw DomainError("slope needs distinct n values");
  return sxy / sxx;
}

}  // namespace locstruct
