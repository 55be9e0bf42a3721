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

#include "locstruct/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "locstruct/errors.hpp"

namespace locstruct {
namespace {

void check_problem(const DecodeProblem& problem) {
  const auto np = static_cast<Eigen::Index>(problem.scheme.num_parts());
  if (problem.distribution.num_parts() != problem.scheme.num_parts())
    throw ShapeError("part distribution does not match the scheme");
  if (problem.alpha.cols() != np ||
      problem.alpha.rows() != static_cast<Eigen::Index>(problem.aux.size()))
    throw ShapeError("alpha must be m x |P|");
}

// Part values per grid pixel for the outputs stored in the auxiliary set.
std::size_t output_channels(const DecodeProblem& problem) {
  if (problem.aux.empty() || problem.scheme.kind() != PartScheme::Kind::kGridPatches) return 1;
  const auto* t = std::get_if<Tensor>(&problem.aux.front().eta);
  if (t && t->shape.size() == 3) return t->shape[2];
  return 1;
}

Tensor numeric_output(const PartScheme& scheme, std::size_t channels) {
  switch (scheme.kind()) {
    case PartScheme::Kind::kSequenceWindows: return Tensor::zeros({scheme.seq_len()});
    case PartScheme::Kind::kVectorBlocks: return Tensor::zeros({scheme.num_coordinates()});
    case PartScheme::Kind::kGridPatches:
      if (channels == 1) return Tensor::zeros({scheme.grid().height, scheme.grid().width});
      return Tensor::zeros({scheme.grid().height, scheme.grid().width, channels});
  }
  return {};
}

const std::vector<double>& eta_values(const AuxiliarySample& a) {
  const auto* t = std::get_if<Tensor>(&a.eta);
  if (!t) throw ShapeError("closed-form decoders need numeric auxiliary outputs");
  return t->values;
}

Object input_part(const DecodeProblem& problem, PartIndex p) {
  if (!problem.input) return Tensor{};
  return problem.scheme.extract(*problem.input, p);
}

}  // namespace

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = a - two_pi * std::floor((a + std::numbers::pi) / two_pi);
  if (r >= std::numbers::pi) r -= two_pi;
  if (r < -std::numbers::pi) r += two_pi;
  return r;
}

DecodeProblem make_decode_problem(const AlphaModel& model, const Object& x,
                                  const PartDistribution& pi) {
  DecodeProblem problem;
  problem.scheme = model.scheme();
  problem.distribution = pi;
  problem.input = x;
  problem.aux = model.aux();
  problem.alpha = model.alpha_all_parts(x);
  problem.kernel_sup = model.kernel_sup();
  check_problem(problem);
  return problem;
}

double decode_objective(const DecodeProblem& problem, const Loss& loss, const Object& z) {
  check_problem(problem);
  double total = 0.0;
  for (PartIndex p = 0; p < problem.scheme.num_parts(); ++p) {
    const double w = problem.distribution.prob(p);
    if (w == 0.0) continue;
    const Object zp = problem.scheme.extract(z, p);
    const Object xp = input_part(problem, p);
    double part_sum = 0.0;
    for (std::size_t j = 0; j < problem.aux.size(); ++j) {
      const double a = problem.alpha(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p));
      if (a == 0.0) continue;
      part_sum += a * loss.part_loss(zp, problem.aux[j].eta, xp);
    }
    total += w * part_sum;
  }
  return total;
}

DecodeResult decode_exact(const DecodeProblem& problem, const Loss& loss,
                          const ExactOptions& options) {
  check_problem(problem);
  const bool text = !options.alphabet.symbols.empty();
  if (text == !options.alphabet.values.empty())
    throw DomainError("exact decoding needs exactly one of a symbol or a value alphabet");
  if (text && problem.scheme.kind() != PartScheme::Kind::kSequenceWindows)
    throw DomainError("text alphabets are only defined for sequence schemes");

  std::string symbols = options.alphabet.symbols;
  std::sort(symbols.begin(), symbols.end());
  symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
  std::vector<double> values = options.alphabet.values;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const std::size_t base = text ? symbols.size() : values.size();
  const std::size_t length = problem.scheme.num_coordinates();

  std::size_t count = 1;
  for (std::size_t i = 0; i < length; ++i) {
    if (count > options.budget / base + 1) {
      count = options.budget + 1;
      break;
    }
    count *= base;
  }
  if (count > options.budget)
    throw CapacityError("exact decoding needs " + std::to_string(base) + "^" +
                        std::to_string(length) + " candidates, budget is " +
                        std::to_string(options.budget));

  // Odometer in lexicographic order: coordinate 0 is the most significant.
  std::vector<std::size_t> digits(length, 0);
  Object candidate;
  if (text) {
    candidate = std::string(length, symbols.front());
  } else {
    Tensor t = numeric_output(problem.scheme, 1);
    std::fill(t.values.begin(), t.values.end(), values.front());
    candidate = std::move(t);
  }
  Object best = candidate;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < count; ++n) {
    const double v = decode_objective(problem, loss, candidate);
    const double tol = 1e-12 * std::max(1.0, std::fabs(best_value));
    if (!std::isfinite(best_value) || v < best_value - tol) {
      best_value = v;
      best = candidate;
    }
    for (std::size_t i = length; i-- > 0;) {
      if (++digits[i] < base) {
        if (text) std::get<std::string>(candidate)[i] = symbols[digits[i]];
        else std::get<Tensor>(candidate).values[i] = values[digits[i]];
        break;
      }
      digits[i] = 0;
      if (text) std::get<std::string>(candidate)[i] = symbols[0];
      else std::get<Tensor>(candidate).values[i] = values[0];
    }
  }
  return DecodeResult{std::move(best), false, 0};
}

DecodeResult combine_least_squares(const PartScheme& scheme, const PartDistribution& pi,
                                   const Eigen::MatrixXd& sums, const Eigen::VectorXd& totals,
                                   LeastSquaresMode mode, std::size_t channels) {
  const auto np = static_cast<Eigen::Index>(scheme.num_parts());
  if (sums.cols() != np || totals.size() != np)
    throw ShapeError("least-squares moments need one column per part");
  Tensor z = numeric_output(scheme, channels);
  std::vector<double> weight(z.size(), 0.0);
  DecodeResult result;
  for (PartIndex p = 0; p < scheme.num_parts(); ++p) {
    const double w = pi.prob(p);
    if (w == 0.0) continue;
    const auto offsets = scheme.element_offsets(p, channels);
    if (static_cast<Eigen::Index>(offsets.size()) != sums.rows())
      throw ShapeError("least-squares moments do not match the part size");
    const auto col = static_cast<Eigen::Index>(p);
    double scale = 1.0;
    if (mode == LeastSquaresMode::kNormalized) {
      if (totals(col) > 1e-10) {
        scale = 1.0 / totals(col);
      } else {
        result.degenerate = true;
        ++result.degenerate_count;
      }
    }
    for (std::size_t e = 0; e < offsets.size(); ++e) {
      z.values[offsets[e]] += w * scale * sums(static_cast<Eigen::Index>(e), col);
      weight[offsets[e]] += w;
    }
  }
  for (std::size_t c = 0; c < z.size(); ++c)
    if (weight[c] > 0.0) z.values[c] /= weight[c];
  result.z = std::move(z);
  return result;
}

DecodeResult decode_least_squares(const DecodeProblem& problem, LeastSquaresMode mode) {
  check_problem(problem);
  if (problem.aux.empty()) throw InsufficientDataError("decoding with an empty auxiliary set");
  const auto d = static_cast<Eigen::Index>(eta_values(problem.aux.front()).size());
  const auto m = static_cast<Eigen::Index>(problem.aux.size());
  Eigen::MatrixXd H(m, d);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& v = eta_values(problem.aux[static_cast<std::size_t>(j)]);
    if (static_cast<Eigen::Index>(v.size()) != d)
      throw ShapeError("auxiliary outputs of different sizes");
    H.row(j) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), d);
  }
  const Eigen::MatrixXd sums = H.transpose() * problem.alpha;
  const Eigen::VectorXd totals = problem.alpha.colwise().sum().transpose();
  return combine_least_squares(problem.scheme, problem.distribution, sums, totals, mode,
                               output_channels(problem));
}

DecodeResult combine_angular(const PartScheme& scheme, const PartDistribution& pi,
                             const Eigen::MatrixXd& cos_sums, const Eigen::MatrixXd& sin_sums,
                             const Eigen::VectorXd& abs_totals) {
  const auto np = static_cast<Eigen::Index>(scheme.num_parts());
  if (cos_sums.cols() != np || sin_sums.cols() != np || abs_totals.size() != np ||
      cos_sums.rows() != sin_sums.rows())
    throw ShapeError("angular moments need one column per part");
  Tensor z = numeric_output(scheme, 1);
  std::vector<double> c(z.size(), 0.0), s(z.size(), 0.0), scale(z.size(), 0.0);
  for (PartIndex p = 0; p < scheme.num_parts(); ++p) {
    const double w = pi.prob(p);
    if (w == 0.0) continue;
    const auto offsets = scheme.element_offsets(p, 1);
    if (static_cast<Eigen::Index>(offsets.size()) != cos_sums.rows())
      throw ShapeError("angular moments do not match the part size");
    const auto col = static_cast<Eigen::Index>(p);
    for (std::size_t e = 0; e < offsets.size(); ++e) {
      const auto row = static_cast<Eigen::Index>(e);
      c[offsets[e]] += w * cos_sums(row, col);
      s[offsets[e]] += w * sin_sums(row, col);
      scale[offsets[e]] += w * abs_totals(col);
    }
  }
  DecodeResult result;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (scale[k] == 0.0 || std::hypot(c[k], s[k]) <= 1e-12 * scale[k]) {
      z.values[k] = 0.0;
      result.degenerate = true;
      ++result.degenerate_count;
      continue;
    }
    z.values[k] = 0.5 * std::atan2(s[k], c[k]);
    // atan2 is in [-pi, pi] so the half angle is already inside [-pi, pi).
  }
  result.z = std::move(z);
  return result;
}

DecodeResult decode_angular(const DecodeProblem& problem) {
  check_problem(problem);
  if (problem.aux.empty()) throw InsufficientDataError("decoding with an empty auxiliary set");
  const auto d = static_cast<Eigen::Index>(eta_values(problem.aux.front()).size());
  const auto m = static_cast<Eigen::Index>(problem.aux.size());
  Eigen::MatrixXd C(m, d), S(m, d);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& v = eta_values(problem.aux[static_cast<std::size_t>(j)]);
    if (static_cast<Eigen::Index>(v.size()) != d)
      throw ShapeError("auxiliary outputs of different sizes");
    for (Eigen::Index e = 0; e < d; ++e) {
      C(j, e) = std::cos(2.0 * v[static_cast<std::size_t>(e)]);
      S(j, e) = std::sin(2.0 * v[static_cast<std::size_t>(e)]);
    }
  }
  const Eigen::MatrixXd cos_sums = C.transpose() * problem.alpha;
  const Eigen::MatrixXd sin_sums = S.transpose() * problem.alpha;
  const Eigen::VectorXd abs_totals = problem.alpha.cwiseAbs().colwise().sum().transpose();
  return combine_angular(problem.scheme, problem.distribution, cos_sums, sin_sums, abs_totals);
}

DecodeResult decode_sgm(const DecodeProblem& problem, const Loss& loss,
                        const SgmOptions& options, Rng& rng) {
  check_problem(problem);
  if (!loss.caps().is_subdifferentiable)
    throw UnsupportedError("SGM decoding needs a subdifferentiable loss");
  if (options.iterations == 0) throw DomainError("SGM needs at least one iteration");
  const bool angular = loss.kind() == Loss::Kind::kAngularSinSq;
  const std::size_t channels = output_channels(problem);
  const std::size_t np = problem.scheme.num_parts();
  const double c = options.step_constant.value_or(
      problem.kernel_sup > 0.0 ? 1.0 / problem.kernel_sup : 1.0);

  // Per-part |alpha| totals, cumulative sampling tables and output offsets.
  std::vector<double> mass(np, 0.0);
  std::vector<std::vector<double>> cumulative(np);
  std::vector<std::vector<std::size_t>> offsets(np);
  for (PartIndex p = 0; p < np; ++p) {
    offsets[p] = problem.scheme.element_offsets(p, channels);
    auto& cum = cumulative[p];
    cum.resize(problem.aux.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < problem.aux.size(); ++j) {
      acc += std::fabs(problem.alpha(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p)));
      cum[j] = acc;
    }
    mass[p] = acc;
  }

  Tensor z = numeric_output(problem.scheme, channels);  // z_0 = 0
  std::vector<double> tail_sum(z.size(), 0.0), reference;
  const std::size_t tail = (options.iterations + 1) / 2;
  const std::size_t tail_start = options.iterations - tail + 1;
  std::size_t informative = 0;
  std::vector<double> zp, grad;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t t = 1; t <= options.iterations; ++t) {
    const PartIndex p = problem.distribution.sample(rng);
    if (mass[p] > 0.0) {
      ++informative;
      const auto& cum = cumulative[p];
      const double r = unit(rng) * mass[p];
      std::size_t j = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), r) -
                                               cum.begin());
      if (j >= cum.size()) j = cum.size() - 1;
      while (j > 0 && cum[j] == cum[j - 1]) --j;  // skip zero-weight anchors
      const double a = problem.alpha(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p));
      const auto& eta = eta_values(problem.aux[j]);
      const auto& off = offsets[p];
      if (eta.size() != off.size()) throw ShapeError("auxiliary output does not match the part");
      zp.resize(off.size());
      grad.resize(off.size());
      for (std::size_t e = 0; e < off.size(); ++e) zp[e] = z.values[off[e]];
      loss.part_subgradient(zp, eta, grad);
      const double step = c / std::sqrt(static_cast<double>(t));
      const double weight = (a > 0.0 ? 1.0 : -1.0) * mass[p];
      for (std::size_t e = 0; e < off.size(); ++e) {
        double v = zp[e] - step * weight * grad[e];
        v = angular ? wrap_angle(v) : std::clamp(v, options.lower, options.upper);
        z.values[off[e]] = v;
      }
    }
    if (options.tail_average && t >= tail_start) {
      if (angular) {
        if (reference.empty()) reference = z.values;
        for (std::size_t k = 0; k < z.size(); ++k)
          tail_sum[k] += wrap_angle(z.values[k] - reference[k]);
      } else {
        for (std::size_t k = 0; k < z.size(); ++k) tail_sum[k] += z.values[k];
      }
    }
  }

  DecodeResult result;
  if (informative == 0) {
    result.z = numeric_output(problem.scheme, channels);
    result.degenerate = true;
    result.degenerate_count = options.iterations;
    return result;
  }
  if (options.tail_average) {
    for (std::size_t k = 0; k < z.size(); ++k) {
      const double mean = tail_sum[k] / static_cast<double>(tail);
      z.values[k] = angular ? wrap_angle(reference[k] + mean)
                            : std::clamp(mean, options.lower, options.upper);
    }
  }
  result.degenerate_count = options.iterations - informative;
  result.z = std::move(z);
  return result;
}

}  // namespace locstruct
