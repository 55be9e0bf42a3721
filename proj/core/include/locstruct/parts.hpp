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

#ifndef LOCSTRUCT_PARTS_HPP
#define LOCSTRUCT_PARTS_HPP

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "locstruct/rng.hpp"

namespace locstruct {

// Dense row-major numeric array.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  Tensor() = default;
  Tensor(std::vector<std::size_t> s, std::vector<double> v)
      : shape(std::move(s)), values(std::move(v)) {}
  static Tensor vector(std::vector<double> v) {
    const std::size_t n = v.size();
    return Tensor({n}, std::move(v));
  }
  static Tensor zeros(std::vector<std::size_t> s);

  std::size_t size() const { return values.size(); }
  bool operator==(const Tensor&) const = default;
};

// An input, an output, or a part of either: a character sequence or a tensor.
using Object = std::variant<std::string, Tensor>;

inline bool is_text(const Object& o) { return std::holds_alternative<std::string>(o); }
std::size_t object_size(const Object& o);

using PartIndex = std::size_t;

struct GridSpec {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t patch_width = 0;
  std::size_t patch_height = 0;
  std::size_t stride = 1;
  bool circular = false;

  bool operator==(const GridSpec&) const = default;
};

// How an object decomposes into indexed parts. Part ids are dense
// 0..num_parts-1; grid patch positions are linearized row-major.
//
// Grid objects are tensors of shape {height, width} or {height, width, C};
// a patch keeps the trailing channel axis. Vector objects are 1-D tensors of
// length block_dim * num_blocks. Sequence objects are strings of length k.
class PartScheme {
 public:
  enum class Kind { kSequenceWindows, kGridPatches, kVectorBlocks };

  static PartScheme sequence_windows(std::size_t seq_len, std::size_t window_len);
  static PartScheme grid_patches(const GridSpec& grid);
  static PartScheme vector_blocks(std::size_t block_dim, std::size_t num_blocks);

  Kind kind() const { return kind_; }
  std::size_t num_parts() const { return num_parts_; }

  // SequenceWindows / VectorBlocks parameters.
  std::size_t seq_len() const { return seq_len_; }
  std::size_t window_len() const { return window_len_; }
  std::size_t block_dim() const { return block_dim_; }
  const GridSpec& grid() const { return grid_; }
  // Patch positions per axis (grid schemes only).
  std::size_t patches_per_row() const { return cols_; }
  std::size_t patches_per_col() const { return rows_; }

  // Top-left (row, col) of grid patch p, before wrapping.
  std::pair<std::size_t, std::size_t> patch_origin(PartIndex p) const;

  Object extract(const Object& x, PartIndex p) const;

  // Flat offsets into an object's value array for every element of part p, in
  // the element order of extract(). `channels` is the trailing channel count
  // of grid objects (ignored otherwise).
  std::vector<std::size_t> element_offsets(PartIndex p, std::size_t channels = 1) const;

  // Offsets of the coordinates (sequence positions, vector entries, pixels)
  // covered by part p.
  std::vector<std::size_t> coordinates(PartIndex p) const;
  // Number of coordinates of a full object (k, k*|P|, or W*H).
  std::size_t num_coordinates() const;

  double distance(PartIndex p, PartIndex q) const;

  // Throws ShapeError when x does not conform to this scheme. Returns the
  // channel count of grid tensors (1 for everything else).
  std::size_t check_object(const Object& x) const;

  // Zero-valued object with this scheme's layout and `channels` values per
  // grid pixel; for sequence schemes a string of `fill` characters.
  Object blank(std::size_t channels = 1, char fill = '\0') const;

  bool operator==(const PartScheme&) const = default;

 private:
  void check_index(PartIndex p) const;

  Kind kind_ = Kind::kVectorBlocks;
  std::size_t num_parts_ = 0;
  std::size_t seq_len_ = 0;
  std::size_t window_len_ = 0;
  std::size_t block_dim_ = 0;
  GridSpec grid_{};
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

// Extract the patch whose top-left corner is (row, col) regardless of the
// stride lattice. Circular grids wrap; non-circular grids throw ShapeError
// when the patch leaves the image.
Object extract_patch_at(const Object& x, const GridSpec& grid, std::size_t row,
                        std::size_t col);

// pi(.|x); the built-in distributions do not depend on x.
class PartDistribution {
 public:
  static PartDistribution uniform(std::size_t num_parts);
  static PartDistribution weighted(std::vector<double> probabilities);

  bool is_uniform() const { return uniform_; }
  std::size_t num_parts() const { return probs_.size(); }
  double prob(PartIndex p) const { return probs_.at(p); }
  const std::vector<double>& probabilities() const { return probs_; }

  PartIndex sample(Rng& rng) const;

 private:
  bool uniform_ = true;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

}  // namespace locstruct

#endif  // LOCSTRUCT_PARTS_HPP
