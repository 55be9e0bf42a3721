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

#include "locstruct/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "locstruct/errors.hpp"

namespace locstruct {
namespace {

using nlohmann::json;

nlohmann::json tensor_level(const Tensor& t, std::size_t axis, std::size_t& cursor) {
  if (axis == t.shape.size()) return t.values[cursor++];
  json arr = json::array();
  for (std::size_t i = 0; i < t.shape[axis]; ++i) arr.push_back(tensor_level(t, axis + 1, cursor));
  return arr;
}

void infer_shape(const json& j, std::vector<std::size_t>& shape) {
  const json* cur = &j;
  while (cur->is_array()) {
    shape.push_back(cur->size());
    if (cur->empty()) break;
    cur = &cur->front();
  }
}

void flatten(const json& j, const std::vector<std::size_t>& shape, std::size_t axis,
             std::vector<double>& out) {
  if (axis == shape.size()) {
    if (!j.is_number()) throw ParseError("tensor entries must be numbers", 0);
    out.push_back(j.get<double>());
    return;
  }
  if (!j.is_array() || j.size() != shape[axis])
    throw ParseError("tensor arrays must be rectangular", 0);
  for (const auto& e : j) flatten(e, shape, axis + 1, out);
}

template <class T>
T get_field(const json& j, const char* key, std::string_view what) {
  if (!j.contains(key)) throw ParseError(std::string(what) + " is missing '" + key + "'", 0);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string(what) + " field '" + key + "' has the wrong type", 0);
  }
}

std::size_t line_of_byte(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() +
                                                 static_cast<std::ptrdiff_t>(byte), '\n'));
}

std::string_view solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::kAuto: return "auto";
    case SolverKind::kDenseCholesky: return "dense_cholesky";
    case SolverKind::kLinearFeatures: return "linear_features";
  }
  return "";
}

SolverKind solver_from_name(const std::string& s) {
  for (auto k : {SolverKind::kAuto, SolverKind::kDenseCholesky, SolverKind::kLinearFeatures})
    if (solver_name(k) == s) return k;
  throw ParseError("unknown solver '" + s + "'", 0);
}

}  // namespace

json object_to_json(const Object& o) {
  if (const auto* s = std::get_if<std::string>(&o)) return *s;
  const auto& t = std::get<Tensor>(o);
  std::size_t expected = 1;
  for (auto d : t.shape) expected *= d;
  if (expected != t.values.size())
    throw ShapeError("tensor shape does not match its value count");
  std::size_t cursor = 0;
  return tensor_level(t, 0, cursor);
}

Object object_from_json(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number()) return Tensor({}, {j.get<double>()});
  if (!j.is_array()) throw ParseError("objects must be strings or numeric arrays", 0);
  Tensor t;
  infer_shape(j, t.shape);
  flatten(j, t.shape, 0, t.values);
  return t;
}

void require_known_keys(const json& j, std::initializer_list<std::string_view> allowed,
                        std::string_view what) {
  if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object", 0);
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ParseError("unknown key '" + key + "' in " + std::string(what), 0);
  }
}

json scheme_to_json(const PartScheme& s) {
  switch (s.kind()) {
    case PartScheme::Kind::kSequenceWindows:
      return {{"kind", "sequence_windows"}, {"k", s.seq_len()}, {"l", s.window_len()}};
    case PartScheme::Kind::kVectorBlocks:
      return {{"kind", "vector_blocks"}, {"block_dim", s.block_dim()},
              {"num_blocks", s.num_parts()}};
    case PartScheme::Kind::kGridPatches: {
      const auto& g = s.grid();
      return {{"kind", "grid_patches"}, {"width", g.width}, {"height", g.height},
              {"patch_width", g.patch_width}, {"patch_height", g.patch_height},
              {"stride", g.stride}, {"circular", g.circular}};
    }
  }
  return {};
}

PartScheme scheme_from_json(const json& j) {
  const auto kind = get_field<std::string>(j, "kind", "scheme");
  if (kind == "sequence_windows") {
    require_known_keys(j, {"kind", "k", "l"}, "scheme");
    return PartScheme::sequence_windows(get_field<std::size_t>(j, "k", "scheme"),
                                        get_field<std::size_t>(j, "l", "scheme"));
  }
  if (kind == "vector_blocks") {
    require_known_keys(j, {"kind", "block_dim", "num_blocks"}, "scheme");
    return PartScheme::vector_blocks(get_field<std::size_t>(j, "block_dim", "scheme"),
                                     get_field<std::size_t>(j, "num_blocks", "scheme"));
  }
  if (kind == "grid_patches") {
    require_known_keys(j, {"kind", "width", "height", "patch_width", "patch_height", "stride",
                           "circular"},
                       "scheme");
    GridSpec g;
    g.width = get_field<std::size_t>(j, "width", "scheme");
    g.height = get_field<std::size_t>(j, "height", "scheme");
    g.patch_width = get_field<std::size_t>(j, "patch_width", "scheme");
    g.patch_height = get_field<std::size_t>(j, "patch_height", "scheme");
    g.stride = j.contains("stride") ? get_field<std::size_t>(j, "stride", "scheme") : 1;
    g.circular = j.contains("circular") && get_field<bool>(j, "circular", "scheme");
    return PartScheme::grid_patches(g);
  }
  throw ParseError("unknown scheme kind '" + kind + "'", 0);
}

json kernel_to_json(const Kernel& k) {
  switch (k.kind()) {
    case Kernel::Kind::kLinearParts: return {{"kind", "linear_parts"}};
    case Kernel::Kind::kGaussianParts:
      return {{"kind", "gaussian_parts"}, {"bandwidth", k.bandwidth()}};
    case Kernel::Kind::kRestriction:
      return {{"kind", "restriction"}, {"base", kernel_to_json(k.base())}};
    case Kernel::Kind::kGaussianGlobal:
      return {{"kind", "gaussian_global"}, {"bandwidth", k.bandwidth()}};
    case Kernel::Kind::kSum:
      return {{"kind", "sum"}, {"universal", kernel_to_json(k.universal())},
              {"local", kernel_to_json(k.local())}};
  }
  return {};
}

Kernel kernel_from_json(const json& j) {
  const auto kind = get_field<std::string>(j, "kind", "kernel");
  if (kind == "linear_parts") {
    require_known_keys(j, {"kind"}, "kernel");
    return Kernel::linear_parts();
  }
  if (kind == "gaussian_parts") {
    require_known_keys(j, {"kind", "bandwidth"}, "kernel");
    return Kernel::gaussian_parts(get_field<double>(j, "bandwidth", "kernel"));
  }
  if (kind == "restriction") {
    require_known_keys(j, {"kind", "base"}, "kernel");
    if (!j.contains("base")) throw ParseError("kernel is missing 'base'", 0);
    return Kernel::restriction(kernel_from_json(j.at("base")));
  }
  if (kind == "gaussian_global") {
    require_known_keys(j, {"kind", "bandwidth"}, "kernel");
    return Kernel::gaussian_global(get_field<double>(j, "bandwidth", "kernel"));
  }
  if (kind == "sum") {
    require_known_keys(j, {"kind", "universal", "local"}, "kernel");
    if (!j.contains("universal") || !j.contains("local"))
      throw ParseError("sum kernel needs 'universal' and 'local'", 0);
    return Kernel::sum(kernel_from_json(j.at("universal")), kernel_from_json(j.at("local")));
  }
  throw ParseError("unknown kernel kind '" + kind + "'", 0);
}

json parse_json_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), line_of_byte(text, e.byte > 0 ? e.byte - 1 : 0));
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

std::string serialize_model(const AlphaModel& model) {
  json inputs = json::array();
  for (const auto& x : model.inputs()) inputs.push_back(object_to_json(x));
  json aux = json::array();
  for (const auto& a : model.aux())
    aux.push_back({{"chi", a.chi_ref}, {"part", a.part}, {"eta", object_to_json(a.eta)}});
  json j = {{"format", kModelFormat},
            {"version", kModelVersion},
            {"kernel", kernel_to_json(model.kernel())},
            {"lambda", model.lambda()},
            {"scheme", scheme_to_json(model.scheme())},
            {"solver", solver_name(model.solver())},
            {"inputs", std::move(inputs)},
            {"aux", std::move(aux)}};
  return j.dump() + "\n";
}

AlphaModel deserialize_model(std::string_view text) {
  const json j = parse_json_text(text);
  if (!j.is_object()) throw ParseError("model file must hold a JSON object", 1);
  if (get_field<std::string>(j, "format", "model") != kModelFormat)
    throw ParseError("not a locstruct model file", 1);
  const int version = get_field<int>(j, "version", "model");
  if (version != kModelVersion)
    throw VersionError("model version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kModelVersion) + ")");
  require_known_keys(j, {"format", "version", "kernel", "lambda", "scheme", "solver", "inputs",
                         "aux"},
                     "model");
  for (const char* key : {"kernel", "scheme", "inputs", "aux"})
    if (!j.contains(key)) throw ParseError(std::string("model is missing '") + key + "'", 1);
  Kernel kernel = kernel_from_json(j.at("kernel"));
  PartScheme scheme = scheme_from_json(j.at("scheme"));
  const double lambda = get_field<double>(j, "lambda", "model");
  FitOptions options;
  if (j.contains("solver")) options.solver = solver_from_name(get_field<std::string>(j, "solver", "model"));
  std::vector<Object> inputs;
  for (const auto& x : j.at("inputs")) inputs.push_back(object_from_json(x));
  std::vector<AuxiliarySample> aux;
  for (const auto& a : j.at("aux")) {
    require_known_keys(a, {"chi", "part", "eta"}, "auxiliary sample");
    if (!a.contains("eta")) throw ParseError("auxiliary sample is missing 'eta'", 1);
    aux.push_back(AuxiliarySample{get_field<std::size_t>(a, "chi", "auxiliary sample"),
                                  get_field<std::size_t>(a, "part", "auxiliary sample"),
                                  object_from_json(a.at("eta"))});
  }
  return AlphaModel::fit(std::move(inputs), std::move(aux), std::move(kernel), lambda,
                         std::move(scheme), options);
}

void save_model(const AlphaModel& model, const std::string& path) {
  write_text_file(path, serialize_model(model));
}

AlphaModel load_model(const std::string& path) { return deserialize_model(read_text_file(path)); }

std::vector<Sample> parse_dataset(std::string_view text) {
  std::vector<Sample> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    ++line_no;
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    try {
      const json j = json::parse(line.begin(), line.end());
      require_known_keys(j, {"x", "y"}, "dataset record");
      if (!j.contains("x")) throw ParseError("dataset record is missing 'x'", line_no);
      Sample s{object_from_json(j.at("x")), Tensor{}};
      if (j.contains("y")) s.y = object_from_json(j.at("y"));
      out.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw ParseError(std::string("dataset line ") + std::to_string(line_no) + ": " + e.what(),
                       line_no);
    } catch (const ParseError& e) {
      throw ParseError(std::string("dataset line ") + std::to_string(line_no) + ": " + e.what(),
                       line_no);
    }
    if (end == text.size()) break;
  }
  return out;
}

std::string format_dataset(std::span<const Sample> samples) {
  std::string out;
  for (const auto& s : samples) {
    json j = {{"x", object_to_json(s.x)}};
    // A missing label is stored as the empty tensor and written back as absent.
    if (!(std::holds_alternative<Tensor>(s.y) && std::get<Tensor>(s.y) == Tensor{}))
      j["y"] = object_to_json(s.y);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Sample> read_dataset(const std::string& path) {
  return parse_dataset(read_text_file(path));
}

void write_dataset(const std::string& path, std::span<const Sample> samples) {
  write_text_file(path, format_dataset(samples));
}

}  // namespace locstruct
