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

#include "locstruct/parts.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "locstruct/errors.hpp"

namespace locstruct {

Tensor Tensor::zeros(std::vector<std::size_t> s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return Tensor(std::move(s), std::vector<double>(n, 0.0));
}

std::size_t object_size(const Object& o) {
  if (const auto* s = std::get_if<std::string>(&o)) return s->size();
  return std::get<Tensor>(o).size();
}

PartScheme PartScheme::sequence_windows(std::size_t seq_len, std::size_t window_len) {
  if (window_len == 0 || window_len > seq_len)
    throw ShapeError("sequence windows need 1 <= l <= k (got k=" + std::to_string(seq_len) +
                     ", l=" + std::to_string(window_len) + ")");
  PartScheme s;
  s.kind_ = Kind::kSequenceWindows;
  s.seq_len_ = seq_len;
  s.window_len_ = window_len;
  s.num_parts_ = seq_len - window_len + 1;
  return s;
}

PartScheme PartScheme::grid_patches(const GridSpec& grid) {
  if (grid.width == 0 || grid.height == 0 || grid.patch_width == 0 ||
      grid.patch_height == 0 || grid.stride == 0)
    throw ShapeError("grid patches need positive width, height, patch size and stride");
  PartScheme s;
  s.kind_ = Kind::kGridPatches;
  s.grid_ = grid;
  if (grid.circular) {
    if (grid.patch_width > grid.width || grid.patch_height > grid.height)
      throw ShapeError("circular patch larger than the grid");
    s.rows_ = (grid.height + grid.stride - 1) / grid.stride;
    s.cols_ = (grid.width + grid.stride - 1) / grid.stride;
  } else {
    // Only fully contained patches are indexed.
    if (grid.patch_width > grid.width || grid.patch_height > grid.height)
      throw ShapeError("patch does not fit inside the grid");
    s.rows_ = (grid.height - grid.patch_height) / grid.stride + 1;
    s.cols_ = (grid.width - grid.patch_width) / grid.stride + 1;
  }
  s.num_parts_ = s.rows_ * s.cols_;
  return s;
}

PartScheme PartScheme::vector_blocks(std::size_t block_dim, std::size_t num_blocks) {
  if (block_dim == 0 || num_blocks == 0)
    throw ShapeError("vector blocks need positive block_dim and num_blocks");
  PartScheme s;
  s.kind_ = Kind::kVectorBlocks;
  s.block_dim_ = block_dim;
  s.num_parts_ = num_blocks;
  return s;
}

void PartScheme::check_index(PartIndex p) const {
  if (p >= num_parts_)
    throw IndexError("part index " + std::to_string(p) + " out of range (num_parts=" +
                     std::to_string(num_parts_) + ")");
}

std::pair<std::size_t, std::size_t> PartScheme::patch_origin(PartIndex p) const {
  check_index(p);
  return {(p / cols_) * grid_.stride, (p % cols_) * grid_.stride};
}

std::size_t PartScheme::num_coordinates() const {
  switch (kind_) {
    case Kind::kSequenceWindows: return seq_len_;
    case Kind::kVectorBlocks: return block_dim_ * num_parts_;
    case Kind::kGridPatches: return grid_.width * grid_.height;
  }
  return 0;
}

std::size_t PartScheme::check_object(const Object& x) const {
  switch (kind_) {
    case Kind::kSequenceWindows: {
      const std::size_t n = object_size(x);
      if (n != seq_len_)
        throw ShapeError("sequence of length " + std::to_string(n) + " does not match k=" +
                         std::to_string(seq_len_));
      if (const auto* t = std::get_if<Tensor>(&x); t && t->shape.size() != 1)
        throw ShapeError("sequence tensors must be 1-D");
      return 1;
    }
    case Kind::kVectorBlocks: {
      const auto* t = std::get_if<Tensor>(&x);
      if (!t || t->shape.size() != 1 || t->size() != block_dim_ * num_parts_)
        throw ShapeError("vector object must be a 1-D tensor of length " +
                         std::to_string(block_dim_ * num_parts_));
      return 1;
    }
    case Kind::kGridPatches: {
      const auto* t = std::get_if<Tensor>(&x);
      if (!t || t->shape.size() < 2 || t->shape.size() > 3 || t->shape[0] != grid_.height ||
          t->shape[1] != grid_.width)
        throw ShapeError("grid object must be a tensor of shape {" +
                         std::to_string(grid_.height) + ", " + std::to_string(grid_.width) +
                         "[, C]}");
      return t->shape.size() == 3 ? t->shape[2] : 1;
    }
  }
  return 1;
}

std::vector<std::size_t> PartScheme::element_offsets(PartIndex p, std::size_t channels) const {
  check_index(p);
  std::vector<std::size_t> out;
  switch (kind_) {
    case Kind::kSequenceWindows:
      out.resize(window_len_);
      std::iota(out.begin(), out.end(), p);
      break;
    case Kind::kVectorBlocks:
      out.resize(block_dim_);
      std::iota(out.begin(), out.end(), p * block_dim_);
      break;
    case Kind::kGridPatches: {
      const auto [r0, c0] = patch_origin(p);
      out.reserve(grid_.patch_height * grid_.patch_width * channels);
      for (std::size_t i = 0; i < grid_.patch_height; ++i) {
        const std::size_t r = (r0 + i) % grid_.height;
        for (std::size_t j = 0; j < grid_.patch_width; ++j) {
          const std::size_t c = (c0 + j) % grid_.width;
          for (std::size_t ch = 0; ch < channels; ++ch)
            out.push_back((r * grid_.width + c) * channels + ch);
        }
      }
      break;
    }
  }
  return out;
}

std::vector<std::size_t> PartScheme::coordinates(PartIndex p) const {
  return element_offsets(p, 1);
}

Object PartScheme::extract(const Object& x, PartIndex p) const {
  const std::size_t channels = check_object(x);
  check_index(p);
  if (const auto* s = std::get_if<std::string>(&x)) return s->substr(p, window_len_);
  const auto& t = std::get<Tensor>(x);
  const auto offsets = element_offsets(p, channels);
  std::vector<double> values(offsets.size());
  for (std::size_t e = 0; e < offsets.size(); ++e) values[e] = t.values[offsets[e]];
  std::vector<std::size_t> shape;
  switch (kind_) {
    case Kind::kSequenceWindows: shape = {window_len_}; break;
    case Kind::kVectorBlocks: shape = {block_dim_}; break;
    case Kind::kGridPatches:
      shape = {grid_.patch_height, grid_.patch_width};
      if (t.shape.size() == 3) shape.push_back(channels);
      break;
  }
  return Tensor(std::move(shape), std::move(values));
}

Object extract_patch_at(const Object& x, const GridSpec& grid, std::size_t row,
                        std::size_t col) {
  const auto* t = std::get_if<Tensor>(&x);
  if (!t || t->shape.size() < 2 || t->shape[0] != grid.height || t->shape[1] != grid.width)
    throw ShapeError("grid object does not match the grid geometry");
  const std::size_t channels = t->shape.size() == 3 ? t->shape[2] : 1;
  if (!grid.circular &&
      (row + grid.patch_height > grid.height || col + grid.patch_width > grid.width))
    throw ShapeError("patch leaves a non-circular grid");
  std::vector<double> values;
  values.reserve(grid.patch_height * grid.patch_width * channels);
  for (std::size_t i = 0; i < grid.patch_height; ++i) {
    const std::size_t r = (row + i) % grid.height;
    for (std::size_t j = 0; j < grid.patch_width; ++j) {
      const std::size_t c = (col + j) % grid.width;
      for (std::size_t ch = 0; ch < channels; ++ch)
        values.push_back(t->values[(r * grid.width + c) * channels + ch]);
    }
  }
  std::vector<std::size_t> shape = {grid.patch_height, grid.patch_width};
  if (t->shape.size() == 3) shape.push_back(channels);
  return Tensor(std::move(shape), std::move(values));
}

double PartScheme::distance(PartIndex p, PartIndex q) const {
  check_index(p);
  check_index(q);
  if (kind_ != Kind::kGridPatches)
    return std::fabs(static_cast<double>(p) - static_cast<double>(q));
  // Patch centers sit at top-left + ((h-1)/2, (w-1)/2); the offset cancels.
  const auto [rp, cp] = patch_origin(p);
  const auto [rq, cq] = patch_origin(q);
  double dr = std::fabs(static_cast<double>(rp) - static_cast<double>(rq));
  double dc = std::fabs(static_cast<double>(cp) - static_cast<double>(cq));
  if (grid_.circular) {
    dr = std::min(dr, static_cast<double>(grid_.height) - dr);
    dc = std::min(dc, static_cast<double>(grid_.width) - dc);
  }
  return std::hypot(dr, dc);
}

Object PartScheme::blank(std::size_t channels, char fill) const {
  switch (kind_) {
    case Kind::kSequenceWindows: return std::string(seq_len_, fill);
    case Kind::kVectorBlocks: return Tensor::zeros({block_dim_ * num_parts_});
    case Kind::kGridPatches:
      if (channels == 1) return Tensor::zeros({grid_.height, grid_.width});
      return Tensor::zeros({grid_.height, grid_.width, channels});
  }
  return Tensor{};
}

PartDistribution PartDistribution::uniform(std::size_t num_parts) {
  if (num_parts == 0) throw DomainError("distribution over zero parts");
  PartDistribution d;
  d.uniform_ = true;
  d.probs_.assign(num_parts, 1.0 / static_cast<double>(num_parts));
  d.cumulative_.resize(num_parts);
  std::partial_sum(d.probs_.begin(), d.probs_.end(), d.cumulative_.begin());
  return d;
}

PartDistribution PartDistribution::weighted(std::vector<double> probabilities) {
  if (probabilities.empty()) throw DomainError("distribution over zero parts");
  double total = 0.0;
  for (double w : probabilities) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw DomainError("part probabilities must be finite and nonnegative");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw DomainError("part probabilities must sum to 1 (sum=" + std::to_string(total) + ")");
  PartDistribution d;
  d.uniform_ = std::all_of(probabilities.begin(), probabilities.end(),
                           [&](double w) { return w == probabilities.front(); });
  d.probs_ = std::move(probabilities);
  d.cumulative_.resize(d.probs_.size());
  std::partial_sum(d.probs_.begin(), d.probs_.end(), d.cumulative_.begin());
  return d;
}

PartIndex PartDistribution::sample(Rng& rng) const {
  if (uniform_) {
    std::uniform_int_distribution<std::size_t> pick(0, probs_.size() - 1);
    return pick(rng);
  }
  std::uniform_real_distribution<double> u(0.0, cumulative_.back());
  const double r = u(rng);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  std::size_t p = static_cast<std::size_t>(it - cumulative_.begin());
  if (p >= probs_.size()) p = probs_.size() - 1;
  // Never return a zero-probability part at a cumulative plateau.
  while (probs_[p] == 0.0 && p > 0) --p;
  while (probs_[p] == 0.0 && p + 1 < probs_.size()) ++p;
  return p;
}

}  // namespace locstruct
