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

#ifndef LOCSTRUCT_IO_HPP
#define LOCSTRUCT_IO_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "locstruct/kernels.hpp"
#include "locstruct/losses.hpp"
#include "locstruct/parts.hpp"
#include "locstruct/training.hpp"

namespace locstruct {

inline constexpr std::string_view kModelFormat = "locstruct-model";
inline constexpr int kModelVersion = 1;

// Objects map to JSON strings (text) or nested numeric arrays (tensors).
nlohmann::json object_to_json(const Object& o);
Object object_from_json(const nlohmann::json& j);

nlohmann::json scheme_to_json(const PartScheme& s);
PartScheme scheme_from_json(const nlohmann::json& j);

nlohmann::json kernel_to_json(const Kernel& k);
Kernel kernel_from_json(const nlohmann::json& j);

// Throws ParseError naming `what` when `j` has keys outside `allowed`.
void require_known_keys(const nlohmann::json& j, std::initializer_list<std::string_view> allowed,
                        std::string_view what);

// Parses JSON text; syntax errors become ParseError with a 1-based line.
nlohmann::json parse_json_text(std::string_view text);

std::string read_text_file(const std::string& path);
// Writes through a temporary file and renames, so readers never see a
// partial file.
void write_text_file(const std::string& path, std::string_view text);

// Model file: format tag, version, kernel, lambda, scheme, solver, inputs
// and auxiliary triples. The factorization is rebuilt on load.
std::string serialize_model(const AlphaModel& model);
AlphaModel deserialize_model(std::string_view text);
void save_model(const AlphaModel& model, const std::string& path);
AlphaModel load_model(const std::string& path);

// JSON-lines datasets: one {"x": ..., "y": ...} object per line. Blank lines
// are skipped; parse errors carry the line number.
std::vector<Sample> parse_dataset(std::string_view text);
std::string format_dataset(std::span<const Sample> samples);
std::vector<Sample> read_dataset(const std::string& path);
void write_dataset(const std::string& path, std::span<const Sample> samples);

}  // namespace locstruct

#endif  // LOCSTRUCT_IO_HPP
