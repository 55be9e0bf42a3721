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

#ifndef LOCSTRUCT_RNG_HPP
#define LOCSTRUCT_RNG_HPP

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace locstruct {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed-splitting rule: the stream for a job is a pure function of the master
// seed and the job's coordinates, folded in order through splitmix64.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> coords) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t c : coords) s = splitmix64(s ^ splitmix64(c));
  return s;
}

inline Rng make_stream(std::uint64_t master,
                       std::initializer_list<std::uint64_t> coords) {
  return Rng(derive_seed(master, coords));
}

inline std::uint64_t coord_of(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace locstruct

#endif  // LOCSTRUCT_RNG_HPP
