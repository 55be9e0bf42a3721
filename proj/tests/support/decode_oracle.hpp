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

// Random decoding instances and a brute-force argmin that shares no code
// with the library decoder: its own part selection, its own losses and a
// reversed enumeration order.

#ifndef LOCSTRUCT_TESTS_DECODE_ORACLE_HPP
#define LOCSTRUCT_TESTS_DECODE_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "locstruct/decoder.hpp"
#include "support/test_support.hpp"

namespace locstruct::testing {

// Owns the auxiliary set that problem.aux points into.
struct DecodeInstance {
  std::vector<AuxiliarySample> aux;
  DecodeProblem problem;
  Loss loss{Loss::Kind::kZeroOneWindow};
  OutputAlphabet alphabet;

  DecodeInstance() = default;
  DecodeInstance(const DecodeInstance& o)
      : aux(o.aux), problem(o.problem), loss(o.loss), alphabet(o.alphabet) {
    problem.aux = aux;
  }
  DecodeInstance& operator=(const DecodeInstance& o) {
    aux = o.aux;
    problem = o.problem;
    problem.aux = aux;
    loss = o.loss;
    alphabet = o.alphabet;
    return *this;
  }
};

inline PartDistribution random_distribution(Rng& rng, std::size_t parts) {
  if (uniform_int(rng, 0, 2) == 0) return PartDistribution::uniform(parts);
  std::vector<double> w(parts);
  double total = 0;
  for (auto& v : w) total += (v = uniform_real(rng, 0.05, 1.0));
  double acc = 0;
  for (std::size_t p = 0; p + 1 < parts; ++p) acc += (w[p] /= total);
  w.back() = 1.0 - acc;
  return PartDistribution::weighted(w);
}

inline Eigen::MatrixXd random_alpha(Rng& rng, std::size_t m, std::size_t parts, double lo,
                                    double hi) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(parts));
  for (Eigen::Index j = 0; j < a.rows(); ++j)
    for (Eigen::Index p = 0; p < a.cols(); ++p)
      a(j, p) = uniform_int(rng, 0, 4) == 0 ? 0.0 : uniform_real(rng, lo, hi);
  return a;
}

// Alphabet <= 4, parts <= 4, m <= 6.
inline DecodeInstance random_exact_instance(Rng& rng) {
  DecodeInstance inst;
  const std::size_t m = uniform_int(rng, 1, 6);
  const std::size_t kind = uniform_int(rng, 0, 3);
  if (kind == 0) {
    const std::size_t k = uniform_int(rng, 1, 5);
    const std::size_t l = uniform_int(rng, k > 3 ? k - 3 : 1, k);
    inst.problem.scheme = PartScheme::sequence_windows(k, l);
    const std::string symbols = std::string("abcd").substr(0, uniform_int(rng, 1, 4));
    std::string shuffled = symbols;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    inst.alphabet.symbols = shuffled;
    const std::size_t parts = inst.problem.scheme.num_parts();
    for (std::size_t j = 0; j < m; ++j)
      inst.aux.push_back({0, uniform_int(rng, 0, parts - 1), random_string(rng, l, "abcde")});
    inst.loss = Loss(Loss::Kind::kZeroOneWindow);
  } else {
    const std::size_t dim = uniform_int(rng, 1, 2);
    const std::size_t parts = uniform_int(rng, 1, dim == 1 ? 4 : 2);
    inst.problem.scheme = PartScheme::vector_blocks(dim, parts);
    const std::size_t size = uniform_int(rng, 1, 4);
    for (std::size_t v = 0; v < size; ++v)
      inst.alphabet.values.push_back(std::round(uniform_real(rng, -2.0, 2.0) * 8.0) / 8.0);
    for (std::size_t j = 0; j < m; ++j) {
      Tensor eta = normal_tensor(rng, {dim});
      // Some anchors sit on the alphabet so the zero-one loss can vanish.
      if (uniform_int(rng, 0, 1) == 0)
        for (auto& e : eta.values)
          e = inst.alphabet.values[uniform_int(rng, 0, inst.alphabet.values.size() - 1)];
      inst.aux.push_back({0, uniform_int(rng, 0, parts - 1), eta});
    }
    inst.loss = Loss(kind == 1   ? Loss::Kind::kSquaredVector
                     : kind == 2 ? Loss::Kind::kAngularSinSq
                                 : Loss::Kind::kZeroOneWindow);
  }
  const std::size_t parts = inst.problem.scheme.num_parts();
  inst.problem.distribution = random_distribution(rng, parts);
  inst.problem.aux = inst.aux;
  inst.problem.alpha = random_alpha(rng, m, parts, -1.0, 1.0);
  return inst;
}

// Closed-form test instances: numeric outputs over overlapping windows,
// vector blocks or small grids.
inline DecodeInstance random_numeric_instance(Rng& rng) {
  DecodeInstance inst;
  const std::size_t kind = uniform_int(rng, 0, 2);
  if (kind == 0) {
    const std::size_t k = uniform_int(rng, 1, 6);
    inst.problem.scheme = PartScheme::sequence_windows(k, uniform_int(rng, 1, k));
  } else if (kind == 1) {
    inst.problem.scheme = PartScheme::vector_blocks(uniform_int(rng, 1, 3), uniform_int(rng, 1, 4));
  } else {
    GridSpec g;
    g.width = uniform_int(rng, 2, 5);
    g.height = uniform_int(rng, 2, 5);
    g.patch_width = uniform_int(rng, 1, g.width);
    g.patch_height = uniform_int(rng, 1, g.height);
    g.stride = 1;
    g.circular = uniform_int(rng, 0, 1) == 1;
    inst.problem.scheme = PartScheme::grid_patches(g);
  }
  const auto& s = inst.problem.scheme;
  const std::size_t parts = s.num_parts();
  const std::size_t part_size = s.element_offsets(0).size();
  std::vector<std::size_t> shape = {part_size};
  if (s.kind() == PartScheme::Kind::kGridPatches) shape = {s.grid().patch_height, s.grid().patch_width};
  const std::size_t m = uniform_int(rng, 1, 8);
  for (std::size_t j = 0; j < m; ++j)
    inst.aux.push_back({0, uniform_int(rng, 0, parts - 1), normal_tensor(rng, shape, 2.0)});
  inst.problem.distribution = random_distribution(rng, parts);
  inst.problem.aux = inst.aux;
  inst.problem.alpha = random_alpha(rng, m, parts, -1.0, 1.0);
  inst.loss = Loss(Loss::Kind::kSquaredVector);
  return inst;
}

namespace oracle {

// Coordinates of part p for sequence windows and vector blocks.
inline std::vector<std::size_t> part_coords(const PartScheme& s, PartIndex p) {
  std::vector<std::size_t> c;
  if (s.kind() == PartScheme::Kind::kSequenceWindows) {
    for (std::size_t i = 0; i < s.window_len(); ++i) c.push_back(p + i);
  } else {
    for (std::size_t i = 0; i < s.block_dim(); ++i) c.push_back(p * s.block_dim() + i);
  }
  return c;
}

// Candidate as alphabet digits; eta as symbols or values.
inline double part_loss(const DecodeInstance& inst, const std::vector<std::size_t>& digits,
                        const std::vector<std::size_t>& coords, const Object& eta,
                        const std::string& symbols, const std::vector<double>& values) {
  const auto kind = inst.loss.kind();
  if (is_text(eta)) {
    const auto& e = std::get<std::string>(eta);
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (symbols[digits[coords[i]]] != e[i]) return 1.0;
    return 0.0;
  }
  const auto& e = std::get<Tensor>(eta).values;
  if (kind == Loss::Kind::kZeroOneWindow) {
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (values[digits[coords[i]]] != e[i]) return 1.0;
    return 0.0;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double d = values[digits[coords[i]]] - e[i];
    acc += kind == Loss::Kind::kSquaredVector ? d * d : std::sin(d) * std::sin(d);
  }
  return kind == Loss::Kind::kSquaredVector ? acc : acc / static_cast<double>(coords.size());
}

}  // namespace oracle

inline Object brute_force_argmin(const DecodeInstance& inst) {
  const auto& s = inst.problem.scheme;
  std::string symbols = inst.alphabet.symbols;
  std::sort(symbols.begin(), symbols.end());
  symbols.erase(std::unique(symbols.begin(), symbols.end()), symbols.end());
  std::vector<double> values = inst.alphabet.values;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const bool text = !symbols.empty();
  const std::size_t base = text ? symbols.size() : values.size();
  const std::size_t length = s.num_coordinates();
  std::size_t total = 1;
  for (std::size_t i = 0; i < length; ++i) total *= base;

  std::vector<double> objective(total, 0.0);
  std::vector<std::vector<std::size_t>> candidates(total, std::vector<std::size_t>(length));
  for (std::size_t n = 0; n < total; ++n) {
    // Coordinate 0 is the least significant digit here.
    std::size_t rest = n;
    for (std::size_t i = 0; i < length; ++i) {
      candidates[n][i] = rest % base;
      rest /= base;
    }
    // Anchor-major accumulation.
    double v = 0.0;
    for (std::size_t j = 0; j < inst.aux.size(); ++j) {
      for (PartIndex p = 0; p < s.num_parts(); ++p) {
        const double a = inst.problem.alpha(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(p));
        const double w = inst.problem.distribution.prob(p);
        if (a == 0.0 || w == 0.0) continue;
        v += w * a *
             oracle::part_loss(inst, candidates[n], oracle::part_coords(s, p), inst.aux[j].eta,
                               symbols, values);
      }
    }
    objective[n] = v;
  }
  const double best = *std::min_element(objective.begin(), objective.end());
  const double tol = 1e-9 * std::max(1.0, std::fabs(best));
  const std::vector<std::size_t>* winner = nullptr;
  for (std::size_t n = 0; n < total; ++n) {
    if (objective[n] > best + tol) continue;
    if (!winner || candidates[n] < *winner) winner = &candidates[n];
  }
  if (text) {
    std::string z(length, ' ');
    for (std::size_t i = 0; i < length; ++i) z[i] = symbols[(*winner)[i]];
    return z;
  }
  std::vector<double> z(length);
  for (std::size_t i = 0; i < length; ++i) z[i] = values[(*winner)[i]];
  return Tensor::vector(z);
}

}  // namespace locstruct::testing

#endif  // LOCSTRUCT_TESTS_DECODE_ORACLE_HPP
