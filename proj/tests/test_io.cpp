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

#include <filesystem>
#include <fstream>

#include "locstruct/errors.hpp"
#include "locstruct/io.hpp"
#include "support/test_support.hpp"

namespace locstruct {
namespace {

using nlohmann::json;

TEST(ObjectJson, RoundTrip) {
  Rng rng(1);
  std::vector<Object> objects = {std::string("acgt"), testing::normal_vector(rng, 3),
                                 testing::normal_tensor(rng, {2, 3}),
                                 testing::normal_tensor(rng, {2, 2, 2}), Tensor({}, {4.5})};
  for (const auto& o : objects) EXPECT_EQ(object_from_json(object_to_json(o)), o);
  EXPECT_THROW(object_from_json(json::parse("[[1, 2], [3]]")), ParseError);
  EXPECT_THROW(object_from_json(json::parse("[1, \"a\"]")), ParseError);
  EXPECT_THROW(object_to_json(Tensor({3}, {1.0})), ShapeError);
}

TEST(SchemeJson, RoundTripAndKeyNames) {
  std::vector<PartScheme> schemes = {PartScheme::sequence_windows(5, 2),
                                     PartScheme::vector_blocks(3, 4),
                                     PartScheme::grid_patches(GridSpec{6, 5, 2, 3, 2, true})};
  for (const auto& s : schemes) EXPECT_EQ(scheme_from_json(scheme_to_json(s)), s);
  auto s = scheme_from_json(json::parse(R"({"kind": "sequence_windows", "k": 5, "l": 2})"));
  EXPECT_EQ(s.num_parts(), 4u);
  auto g = scheme_from_json(json::parse(
      R"({"kind": "grid_patches", "width": 4, "height": 4, "patch_width": 2, "patch_height": 2})"));
  EXPECT_EQ(g.grid().stride, 1u);
  EXPECT_FALSE(g.grid().circular);
  EXPECT_THROW(scheme_from_json(json::parse(R"({"kind": "sequence_windows", "k": 5})")),
               ParseError);
  EXPECT_THROW(scheme_from_json(json::parse(R"({"kind": "sequence_windows", "k": 5, "l": 2, "x": 1})")),
               ParseError);
  EXPECT_THROW(scheme_from_json(json::parse(R"({"kind": "trees"})")), ParseError);
}

TEST(KernelJson, RoundTrip) {
  std::vector<Kernel> kernels = {
      Kernel::linear_parts(), Kernel::gaussian_parts(0.5),
      Kernel::restriction(Kernel::gaussian_parts(2.0)), Kernel::gaussian_global(3.0),
      Kernel::sum(Kernel::gaussian_global(1.0), Kernel::restriction(Kernel::linear_parts()))};
  for (const auto& k : kernels) EXPECT_EQ(kernel_from_json(kernel_to_json(k)), k);
  EXPECT_THROW(kernel_from_json(json::parse(R"({"kind": "gaussian_parts", "bandwidth": -1})")),
               DomainError);
  EXPECT_THROW(kernel_from_json(json::parse(R"({"kind": "restriction"})")), ParseError);
}

TEST(ParseJsonText, SyntaxErrorsCarryLine) {
  try {
    parse_json_text("{\n  \"a\": 1,\n  \"b\": \n}");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(Model, SingleAnchorRoundTrip) {
  std::vector<Object> inputs = {Tensor::vector({0.2, 0.4})};
  std::vector<AuxiliarySample> aux = {{0, 0, Tensor::vector({1.0})}};
  auto model = AlphaModel::fit(inputs, aux, Kernel::gaussian_parts(1.0), 1.0,
                               PartScheme::vector_blocks(2, 1));
  auto loaded = deserialize_model(serialize_model(model));
  EXPECT_NEAR(loaded.alpha_at(inputs[0], 0)(0), 0.5, 1e-15);
  EXPECT_EQ(loaded.kernel(), model.kernel());
  EXPECT_EQ(loaded.scheme(), model.scheme());
  EXPECT_EQ(loaded.lambda(), model.lambda());
}

TEST(Model, LargeRoundTripPreservesAlpha) {
  Rng rng(2);
  auto scheme = PartScheme::sequence_windows(8, 3);
  std::vector<Sample> train;
  for (int i = 0; i < 20; ++i)
    train.push_back({std::string(testing::random_string(rng, 8, "acgt")),
                     std::string(testing::random_string(rng, 8, "ab"))});
  auto aux = generate_auxiliary(train, 200, scheme, PartDistribution::uniform(6), rng);
  auto model = fit_alpha(train, aux, Kernel::restriction(Kernel::gaussian_parts(1.5)), 0.01, scheme);
  auto dir = testing::scratch_dir("io");
  const std::string path = (dir / "model.json").string();
  save_model(model, path);
  auto loaded = load_model(path);
  ASSERT_EQ(loaded.size(), 200u);
  for (int probe = 0; probe < 10; ++probe) {
    const Object q = testing::random_string(rng, 8, "acgt");
    for (PartIndex p = 0; p < 6; ++p)
      ASSERT_LE((model.alpha_at(q, p) - loaded.alpha_at(q, p)).cwiseAbs().maxCoeff(), 1e-10);
  }
  for (std::size_t j = 0; j < 200; ++j) ASSERT_EQ(loaded.aux()[j].eta, model.aux()[j].eta);
  std::filesystem::remove_all(dir);
}

TEST(Model, SolverIsPreserved) {
  Rng rng(3);
  std::vector<Sample> train;
  for (int i = 0; i < 10; ++i) train.push_back({testing::normal_vector(rng, 4), testing::normal_vector(rng, 4)});
  auto scheme = PartScheme::vector_blocks(2, 2);
  auto model = fit_alpha(train, full_auxiliary(train, scheme), Kernel::restriction(Kernel::linear_parts()),
                         0.1, scheme, {SolverKind::kDenseCholesky});
  EXPECT_EQ(deserialize_model(serialize_model(model)).solver(), SolverKind::kDenseCholesky);
}

TEST(Model, RejectsTruncatedAndForeignFiles) {
  std::vector<Object> inputs = {Tensor::vector({1.0})};
  std::vector<AuxiliarySample> aux = {{0, 0, Tensor::vector({1.0})}};
  auto text = serialize_model(AlphaModel::fit(inputs, aux, Kernel::linear_parts(), 1.0,
                                              PartScheme::vector_blocks(1, 1)));
  EXPECT_THROW(deserialize_model(text.substr(0, text.size() / 2)), ParseError);
  auto j = json::parse(text);
  j["version"] = kModelVersion + 1;
  EXPECT_THROW(deserialize_model(j.dump()), VersionError);
  j = json::parse(text);
  j["format"] = "something-else";
  EXPECT_THROW(deserialize_model(j.dump()), ParseError);
  j = json::parse(text);
  j.erase("aux");
  EXPECT_THROW(deserialize_model(j.dump()), ParseError);
  EXPECT_THROW(load_model("/nonexistent/dir/model.json"), IoError);
}

TEST(Dataset, ParseAndFormat) {
  auto samples = parse_dataset("{\"x\": \"abc\", \"y\": \"aba\"}\n\n{\"x\": [1, 2], \"y\": [3]}\n{\"x\": [0]}\n");
  ASSERT_EQ(samples.size(), 3u);
  EXPECT_EQ(std::get<std::string>(samples[0].y), "aba");
  EXPECT_EQ(std::get<Tensor>(samples[1].x).values, (std::vector<double>{1, 2}));
  EXPECT_EQ(std::get<Tensor>(samples[2].y), Tensor{});
  auto again = parse_dataset(format_dataset(samples));
  ASSERT_EQ(again.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(again[i].x, samples[i].x);
    EXPECT_EQ(again[i].y, samples[i].y);
  }
}

TEST(Dataset, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      parse_dataset(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("{\"x\": [1]}\n{\"x\": [1,}\n"), 2u);
  EXPECT_EQ(line_of("{\"x\": [1]}\n\n{\"y\": [1]}\n"), 3u);
  EXPECT_EQ(line_of("{\"x\": [1], \"z\": 2}\n"), 1u);
}

TEST(Files, AtomicWriteAndRead) {
  auto dir = testing::scratch_dir("files");
  const std::string path = (dir / "out.txt").string();
  write_text_file(path, "first");
  write_text_file(path, "second");
  EXPECT_EQ(read_text_file(path), "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
  std::vector<Sample> samples = {{Tensor::vector({1.5}), Tensor::vector({-2})}};
  write_dataset((dir / "d.jsonl").string(), samples);
  EXPECT_EQ(read_dataset((dir / "d.jsonl").string())[0].y, samples[0].y);
  EXPECT_THROW(read_text_file((dir / "missing").string()), IoError);
  EXPECT_THROW(write_text_file((dir / "no" / "such" / "file").string(), "x"), IoError);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace locstruct
