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

#include "cli.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include <CLI/CLI.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "artifacts.hpp"
#include "locstruct/bench.hpp"
#include "locstruct/decoder.hpp"
#include "locstruct/errors.hpp"
#include "locstruct/io.hpp"
#include "locstruct/locality.hpp"
#include "locstruct/losses.hpp"
#include "locstruct/training.hpp"

namespace locstruct::tools {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::size_t threads = 1;
};

// A config object with strict key checking. Errors point at the first line
// of the raw text that mentions the offending key.
class Config {
 public:
  Config() : json_(json::object()), text_(std::make_shared<std::string>()) {}
  Config(json j, std::shared_ptr<const std::string> text, std::string what)
      : json_(std::move(j)), text_(std::move(text)), what_(std::move(what)) {}

  static Config load(const std::string& path) {
    if (path.empty()) return Config();
    auto text = std::make_shared<const std::string>(read_text_file(path));
    json j = parse_json_text(*text);
    if (!j.is_object()) throw ParseError("config must be a JSON object", 1);
    return Config(std::move(j), std::move(text), "config");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    if (!json_.is_object()) throw ParseError(what_ + " must be a JSON object", line_of(what_));
    for (const auto& [key, value] : json_.items())
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw ParseError("unknown key '" + key + "' in " + what_, line_of(key));
  }

  bool has(const std::string& key) const { return json_.contains(key); }
  const json& raw(const std::string& key) const { return json_.at(key); }

  template <class T>
  T get(const std::string& key) const {
    if (!has(key)) throw ParseError(what_ + " is missing '" + key + "'", 0);
    try {
      return json_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ParseError(what_ + " key '" + key + "' has the wrong type", line_of(key));
    }
  }
  template <class T>
  T get_or(const std::string& key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }
  // Scalar or array of scalars.
  template <class T>
  std::vector<T> list_or(const std::string& key, std::vector<T> fallback) const {
    if (!has(key)) return fallback;
    const json& v = json_.at(key);
    try {
      if (v.is_array()) return v.get<std::vector<T>>();
      return {v.get<T>()};
    } catch (const json::exception&) {
      throw ParseError(what_ + " key '" + key + "' has the wrong type", line_of(key));
    }
  }
  Config sub(const std::string& key) const {
    if (!has(key)) throw ParseError(what_ + " is missing '" + key + "'", 0);
    return Config(json_.at(key), text_, key);
  }

  // Wraps library parsers (schemes, kernels) so their errors get a line.
  template <class F>
  auto parse_with(const std::string& key, F&& f) const {
    if (!has(key)) throw ParseError(what_ + " is missing '" + key + "'", 0);
    try {
      return f(json_.at(key));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), e.line() ? e.line() : line_of(key));
    } catch (const json::exception& e) {
      throw ParseError(e.what(), line_of(key));
    }
  }

  std::size_t line_of(std::string_view key) const {
    const std::string needle = "\"" + std::string(key) + "\"";
    const auto pos = text_->find(needle);
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<std::size_t>(std::count(text_->begin(), text_->begin() +
                                                   static_cast<std::ptrdiff_t>(pos), '\n'));
  }

 private:
  json json_;
  std::shared_ptr<const std::string> text_;
  std::string what_ = "config";
};

std::uint64_t require_seed(const CommonFlags& flags, const Config& cfg, const char* why) {
  if (flags.seed) return *flags.seed;
  if (cfg.has("seed")) return cfg.get<std::uint64_t>("seed");
  throw DomainError(std::string("a master seed (--seed or config 'seed') is required ") + why);
}

fs::path output_dir(const CommonFlags& flags) {
  fs::path dir(flags.out.empty() ? "." : flags.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void emit(const fs::path& path, std::string_view text) {
  write_text_file(path.string(), text);
  spdlog::info("wrote {}", path.string());
}

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

PartDistribution distribution_from(const Config& cfg, std::size_t num_parts) {
  if (!cfg.has("part_distribution")) return PartDistribution::uniform(num_parts);
  auto probs = cfg.get<std::vector<double>>("part_distribution");
  if (probs.size() != num_parts)
    throw ParseError("part_distribution needs one weight per part",
                     cfg.line_of("part_distribution"));
  return PartDistribution::weighted(std::move(probs));
}

std::vector<double> lambda_grid_from(const Config& cfg, std::vector<double> fallback) {
  if (!cfg.has("lambda_grid")) return fallback;
  const json& v = cfg.raw("lambda_grid");
  if (v.is_object()) {
    const Config g = cfg.sub("lambda_grid");
    g.allow({"lo", "hi", "count"});
    return log_grid(g.get<double>("lo"), g.get<double>("hi"), g.get<std::size_t>("count"));
  }
  return cfg.list_or<double>("lambda_grid", fallback);
}

template <class List>
std::vector<Estimator> estimators_from(const Config& cfg, const List& fallback) {
  if (!cfg.has("estimators")) return fallback;
  std::vector<Estimator> out;
  for (const auto& name : cfg.list_or<std::string>("estimators", {})) {
    try {
      out.push_back(estimator_from_name(name));
    } catch (const DomainError& e) {
      throw ParseError(e.what(), cfg.line_of("estimators"));
    }
  }
  return out;
}

// ---------------------------------------------------------------- train

int cmd_train(const CommonFlags& flags, std::ostream& out) {
  const Config cfg = Config::load(flags.config);
  cfg.allow({"seed", "dataset", "scheme", "kernel", "lambda", "m", "solver",
             "part_distribution", "model"});
  const auto samples = read_dataset(cfg.get<std::string>("dataset"));
  const PartScheme scheme = cfg.parse_with("scheme", scheme_from_json);
  const Kernel kernel = cfg.parse_with("kernel", kernel_from_json);
  const double lambda = cfg.get<double>("lambda");
  const PartDistribution pi = distribution_from(cfg, scheme.num_parts());
  FitOptions options;
  const std::string solver = cfg.get_or<std::string>("solver", "auto");
  if (solver == "dense_cholesky") options.solver = SolverKind::kDenseCholesky;
  else if (solver == "linear_features") options.solver = SolverKind::kLinearFeatures;
  else if (solver != "auto") throw ParseError("unknown solver '" + solver + "'", cfg.line_of("solver"));

  for (std::size_t i = 0; i < samples.size(); ++i) {
    scheme.check_object(samples[i].x);
    scheme.check_object(samples[i].y);
  }
  std::vector<AuxiliarySample> aux;
  if (cfg.has("m")) {
    Rng rng = make_stream(require_seed(flags, cfg, "when 'm' subsamples the auxiliary set"), {0});
    aux = generate_auxiliary(samples, cfg.get<std::size_t>("m"), scheme, pi, rng);
  } else {
    aux = full_auxiliary(samples, scheme);
  }
  const AlphaModel model = fit_alpha(samples, std::move(aux), kernel, lambda, scheme, options);
  const fs::path path = cfg.has("model") ? fs::path(cfg.get<std::string>("model"))
                                         : output_dir(flags) / "model.json";
  save_model(model, path.string());
  spdlog::info("wrote {}", path.string());
  out << "trained m=" << model.size() << " solver="
      << (model.solver() == SolverKind::kLinearFeatures ? "linear_features" : "dense_cholesky")
      << " jitter=" << csv_number(model.jitter()) << " model=" << path.string() << "\n";
  return kExitOk;
}

// -------------------------------------------------------------- predict

int cmd_predict(const CommonFlags& flags, std::ostream& out) {
  const Config cfg = Config::load(flags.config);
  cfg.allow({"seed", "model", "dataset", "loss", "decoder", "alphabet", "budget", "sgm",
             "part_distribution", "predictions"});
  const AlphaModel model = load_model(cfg.get<std::string>("model"));
  const auto samples = read_dataset(cfg.get<std::string>("dataset"));
  const Loss loss = [&] {
    try {
      return Loss::from_name(cfg.get<std::string>("loss"));
    } catch (const DomainError& e) {
      throw ParseError(e.what(), cfg.line_of("loss"));
    }
  }();
  std::string decoder = cfg.get_or<std::string>("decoder", "");
  if (decoder.empty()) {
    switch (loss.kind()) {
      case Loss::Kind::kSquaredVector: decoder = "least_squares"; break;
      case Loss::Kind::kAngularSinSq: decoder = "angular"; break;
      case Loss::Kind::kZeroOneWindow: decoder = "exact"; break;
    }
  }
  const PartDistribution pi = distribution_from(cfg, model.scheme().num_parts());

  ExactOptions exact;
  if (decoder == "exact") {
    const Config a = cfg.sub("alphabet");
    a.allow({"symbols", "values"});
    exact.alphabet.symbols = a.get_or<std::string>("symbols", "");
    exact.alphabet.values = a.get_or<std::vector<double>>("values", {});
    exact.budget = cfg.get_or<std::size_t>("budget", exact.budget);
  }
  SgmOptions sgm;
  std::uint64_t seed = 0;
  if (decoder == "sgm") {
    seed = require_seed(flags, cfg, "for SGM decoding");
    if (cfg.has("sgm")) {
      const Config s = cfg.sub("sgm");
      s.allow({"iterations", "step_constant", "tail_average", "lower", "upper"});
      sgm.iterations = s.get_or<std::size_t>("iterations", sgm.iterations);
      if (s.has("step_constant")) sgm.step_constant = s.get<double>("step_constant");
      sgm.tail_average = s.get_or<bool>("tail_average", sgm.tail_average);
      sgm.lower = s.get_or<double>("lower", sgm.lower);
      sgm.upper = s.get_or<double>("upper", sgm.upper);
    }
  }
  if (decoder != "exact" && decoder != "sgm" && decoder != "least_squares" &&
      decoder != "least_squares_unnormalized" && decoder != "angular")
    throw ParseError("unknown decoder '" + decoder + "'", cfg.line_of("decoder"));

  std::vector<DecodeResult> results(samples.size());
  parallel_for(samples.size(), flags.threads, [&](std::size_t i) {
    const DecodeProblem problem = make_decode_problem(model, samples[i].x, pi);
    if (decoder == "exact") {
      results[i] = decode_exact(problem, loss, exact);
    } else if (decoder == "least_squares") {
      results[i] = decode_least_squares(problem, LeastSquaresMode::kNormalized);
    } else if (decoder == "least_squares_unnormalized") {
      results[i] = decode_least_squares(problem, LeastSquaresMode::kUnnormalized);
    } else if (decoder == "angular") {
      results[i] = decode_angular(problem);
    } else {
      Rng rng = make_stream(seed, {i});
      results[i] = decode_sgm(problem, loss, sgm, rng);
    }
  });

  std::vector<Sample> predictions;
  predictions.reserve(samples.size());
  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    predictions.push_back(Sample{samples[i].x, results[i].z});
    degenerate += results[i].degenerate ? 1 : 0;
  }
  const fs::path dir = output_dir(flags);
  emit(dir / cfg.get_or<std::string>("predictions", "predictions.jsonl"),
       format_dataset(predictions));

  const bool labelled = std::all_of(samples.begin(), samples.end(), [](const Sample& s) {
    return is_text(s.y) || !std::get<Tensor>(s.y).values.empty();
  });
  std::string metrics = "n,decoder,mean_structured_loss,degenerate\n";
  double mean_loss = std::numeric_limits<double>::quiet_NaN();
  if (labelled && !samples.empty()) {
    double total = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
      total += structured_loss(loss, results[i].z, samples[i].y, samples[i].x, model.scheme(), pi);
    mean_loss = total / static_cast<double>(samples.size());
  }
  metrics += std::to_string(samples.size()) + "," + decoder + "," + csv_number(mean_loss) + "," +
             std::to_string(degenerate) + "\n";
  emit(dir / "metrics.csv", metrics);
  out << "predicted n=" << samples.size() << " decoder=" << decoder
      << " mean_structured_loss=" << csv_number(mean_loss) << " degenerate=" << degenerate
      << "\n";
  return kExitOk;
}

// ------------------------------------------------------------- diagnose

int cmd_diagnose(const CommonFlags& flags, std::ostream& out) {
  const Config cfg = Config::load(flags.config);
  cfg.allow({"seed", "dataset", "synthetic", "scheme", "similarity", "max_pairs", "distance"});
  std::vector<Object> inputs;
  std::optional<PartScheme> scheme;
  if (cfg.has("synthetic")) {
    if (cfg.has("dataset")) throw ParseError("give either 'dataset' or 'synthetic'", cfg.line_of("dataset"));
    const Config s = cfg.sub("synthetic");
    s.allow({"num_parts", "block_dim", "gamma", "n", "noise_std"});
    SyntheticConfig sc;
    sc.num_parts = s.get<std::size_t>("num_parts");
    sc.block_dim = s.get<std::size_t>("block_dim");
    sc.gamma = s.get<double>("gamma");
    sc.n_train = s.get<std::size_t>("n");
    sc.n_test = 1;
    sc.noise_std = s.get_or<double>("noise_std", sc.noise_std);
    Rng rng = make_stream(require_seed(flags, cfg, "for synthetic diagnostics"), {0});
    const auto data = gen_synthetic_dataset(sc, rng);
    for (const auto& smp : data.train) inputs.push_back(smp.x);
    scheme = PartScheme::vector_blocks(sc.block_dim, sc.num_parts);
  } else {
    for (auto& smp : read_dataset(cfg.get<std::string>("dataset"))) inputs.push_back(std::move(smp.x));
  }
  if (cfg.has("scheme")) scheme = cfg.parse_with("scheme", scheme_from_json);
  if (!scheme) throw ParseError("config is missing 'scheme'", 0);

  Similarity similarity = Similarity::raw_inner();
  if (cfg.has("similarity")) {
    const Config s = cfg.sub("similarity");
    s.allow({"kind", "kernel"});
    const auto type = s.get<std::string>("kind");
    if (type == "squared_kernel") similarity = Similarity::squared_kernel(s.parse_with("kernel", kernel_from_json));
    else if (type != "raw_inner") throw ParseError("unknown similarity '" + type + "'", s.line_of("kind"));
  }
  CovMapOptions options;
  options.max_pairs = cfg.get_or<std::size_t>("max_pairs", 0);
  const std::string dist = cfg.get_or<std::string>("distance", "scheme");
  PartDistanceFn distance;
  const PartScheme sch = *scheme;
  if (dist == "scheme") {
    distance = [sch](PartIndex p, PartIndex q) { return sch.distance(p, q); };
  } else if (dist == "normalized_index") {
    const double np = static_cast<double>(sch.num_parts());
    distance = [np](PartIndex p, PartIndex q) {
      return static_cast<double>(p > q ? p - q : q - p) / np;
    };
  } else {
    throw ParseError("unknown distance '" + dist + "'", cfg.line_of("distance"));
  }

  const LocalityReport report = empirical_cov_map(inputs, sch, similarity, options);
  const LocalityConstants constants =
      locality_constants(report, sch, PartDistribution::uniform(sch.num_parts()), distance);
  const fs::path dir = output_dir(flags);
  emit(dir / "cov_map.csv", cov_map_csv(report, distance));
  emit(dir / "constants.csv", constants_csv(report, constants));
  emit(dir / "cov_map.svg", heatmap_svg(report.cov_map, "empirical C(p, q)"));
  out << "n=" << report.n_samples << " r_sq=" << csv_number(report.r_sq)
      << " s_hat=" << csv_number(constants.s_hat) << " q_hat=" << csv_number(constants.q_hat)
      << " gamma_hat="
      << (constants.gamma_hat ? csv_number(*constants.gamma_hat) : std::string("nan")) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- bench

void write_bench(const fs::path& dir, const BenchResult& result, const std::string& title,
                 const std::string& y_label) {
  const auto summary = summarize(result);
  emit(dir / "bench.csv", bench_csv(result));
  emit(dir / "summary.csv", summary_csv(summary));
  emit(dir / "bench.svg",
       line_plot_svg(bench_series(summary), title, "n (training samples)", y_label, true, true));
  std::size_t failed = 0;
  for (const auto& r : result.rows) failed += r.failed ? 1 : 0;
  if (failed) spdlog::warn("{} bench cells failed", failed);
}

void print_summary(std::ostream& out, const BenchResult& result) {
  for (const auto& s : summarize(result))
    out << estimator_name(s.estimator) << " n=" << s.n << " parts=" << s.num_parts
        << " gamma=" << csv_number(s.gamma) << " median=" << csv_number(s.median)
        << " q1=" << csv_number(s.q1) << " q3=" << csv_number(s.q3) << " failed=" << s.failed
        << "\n";
}

int cmd_bench_synthetic(const CommonFlags& flags, std::ostream& out) {
  const Config cfg = Config::load(flags.config);
  cfg.allow({"seed", "num_parts", "gamma", "n_train", "block_dim", "n_test", "noise_std",
             "repeats", "lambda_grid", "estimators", "metric", "holdout_fraction"});
  SyntheticConfig base;
  base.seed = require_seed(flags, cfg, "for benchmarks");
  base.block_dim = cfg.get_or<std::size_t>("block_dim", base.block_dim);
  base.n_test = cfg.get_or<std::size_t>("n_test", base.n_test);
  base.noise_std = cfg.get_or<double>("noise_std", base.noise_std);
  base.lambda_grid = lambda_grid_from(cfg, base.lambda_grid);
  base.estimators = estimators_from(cfg, base.estimators);
  base.holdout_fraction = cfg.get_or<double>("holdout_fraction", base.holdout_fraction);
  base.threads = flags.threads;
  const std::string metric = cfg.get_or<std::string>("metric", "mse");
  if (metric == "excess_mse") base.metric = ErrorMetric::kExcessMse;
  else if (metric != "mse") throw ParseError("unknown metric '" + metric + "'", cfg.line_of("metric"));
  const auto parts = cfg.list_or<std::size_t>("num_parts", {4, 16, 32});
  const auto gammas = cfg.list_or<double>("gamma", {0.0, 1.0, 4.0, 10.0});
  const auto ns = cfg.list_or<std::size_t>("n_train", {base.n_train});
  const auto repeats = cfg.get_or<std::size_t>("repeats", 20);

  BenchResult all;
  for (std::size_t np : parts)
    for (double g : gammas) {
      SyntheticConfig c = base;
      c.num_parts = np;
      c.gamma = g;
      auto r = run_learning_curve(ns, c, repeats);
      all.rows.insert(all.rows.end(), r.rows.begin(), r.rows.end());
    }
  write_bench(output_dir(flags), all, "synthetic within-locality study",
              metric == "mse" ? "test MSE" : "excess test MSE");
  print_summary(out, all);
  return kExitOk;
}

int cmd_bench_angular(const CommonFlags& flags, std::ostream& out) {
  const Config cfg = Config::load(flags.config);
  cfg.allow({"seed", "grid_size", "patch_size", "stride", "max_frequency", "noise_std",
             "bandwidth", "n_train", "n_test", "max_aux", "repeats", "lambda_grid",
             "estimators", "holdout_fraction"});
  AngularConfig c;
  c.seed = require_seed(flags, cfg, "for benchmarks");
  c.grid_size = cfg.get_or<std::size_t>("grid_size", c.grid_size);
  c.patch_size = cfg.get_or<std::size_t>("patch_size", c.patch_size);
  c.stride = cfg.get_or<std::size_t>("stride", c.stride);
  c.max_frequency = cfg.get_or<std::size_t>("max_frequency", c.max_frequency);
  c.noise_std = cfg.get_or<double>("noise_std", c.noise_std);
  c.bandwidth = cfg.get_or<double>("bandwidth", c.bandwidth);
  c.n_test = cfg.get_or<std::size_t>("n_test", c.n_test);
  c.max_aux = cfg.get_or<std::size_t>("max_aux", c.max_aux);
  c.lambda_grid = lambda_grid_from(cfg, c.lambda_grid);
  c.estimators = estimators_from(cfg, c.estimators);
  c.holdout_fraction = cfg.get_or<double>("holdout_fraction", c.holdout_fraction);
  c.threads = flags.threads;
  const auto ns = cfg.list_or<std::size_t>("n_train", {10, 20, 40});
  const auto repeats = cfg.get_or<std::size_t>("repeats", 5);
  const BenchResult result = run_learning_curve(ns, c, repeats);
  write_bench(output_dir(flags), result, "synthetic orientation fields", "structured sin^2 loss");
  print_summary(out, result);
  return kExitOk;
}

// ---------------------------------------------------------- bound-check

int cmd_bound_check(const CommonFlags& flags, std::optional<double> gamma,
                    std::optional<std::size_t> parts, std::optional<double> r2,
                    std::ostream& out) {
  const Config cfg = Config::load(flags.config);
  cfg.allow({"gamma", "num_parts", "r_sq"});
  std::vector<double> gammas = gamma ? std::vector<double>{*gamma}
                                     : cfg.list_or<double>("gamma", {0.1, 0.5, 1.0, 2.0, 5.0});
  std::vector<std::size_t> ps = parts ? std::vector<std::size_t>{*parts}
                                      : cfg.list_or<std::size_t>("num_parts", {2, 8, 32, 128});
  const double r_sq = r2 ? *r2 : cfg.get_or<double>("r_sq", 1.0);
  bool all_hold = true;
  for (double g : gammas)
    for (std::size_t p : ps) {
      const auto b = sequence_bound_check(r_sq, g, p);
      char line[256];
      std::snprintf(line, sizeof(line), "gamma=%.4g parts=%zu s_exact=%.4g s_bound=%.4g holds=%s\n",
                    g, p, b.s_exact, b.s_bound, b.holds ? "true" : "false");
      out << line;
      all_hold = all_hold && b.holds;
    }
  emit(output_dir(flags) / "bound_check.csv", bound_csv(gammas, ps, r_sq));
  return all_hold ? kExitOk : kExitError;
}

void configure_logging() {
  static bool done = false;
  if (done) return;
  done = true;
  auto logger = spdlog::stderr_color_mt("locstruct");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("LOCSTRUCT_LOG")) {
    const std::string v(env);
    if (v == "error") level = spdlog::level::err;
    else if (v == "warn") level = spdlog::level::warn;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "debug") level = spdlog::level::debug;
  }
  spdlog::set_level(level);
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message,
                  std::size_t line) {
  json j = {{"error", kind}, {"message", message}};
  if (line > 0) j["line"] = line;
  err << j.dump() << "\n";
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging();
  CLI::App app("Structured prediction by parts: training, decoding and locality diagnostics",
               "locstruct");
  app.require_subcommand(1);
  CommonFlags flags;
  std::optional<double> gamma, r2;
  std::optional<std::size_t> parts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON config file");
    sub->add_option("--seed", flags.seed, "master seed (overrides the config)");
    sub->add_option("--out", flags.out, "output directory")->capture_default_str();
    sub->add_option("--threads", flags.threads, "worker threads, 0 = auto")->capture_default_str();
    return sub;
  };
  auto* train = add_common(app.add_subcommand("train", "fit and persist a model"));
  auto* predict = add_common(app.add_subcommand("predict", "decode a JSON-lines dataset"));
  auto* diagnose = add_common(app.add_subcommand("diagnose", "empirical within-locality map"));
  auto* bench_syn = add_common(app.add_subcommand("bench-synthetic", "synthetic regression study"));
  auto* bench_ang = add_common(app.add_subcommand("bench-angular", "synthetic orientation fields"));
  auto* bound = add_common(app.add_subcommand("bound-check", "sequence geometric-series bound"));
  bound->add_option("--gamma", gamma, "decay rate (> 0)");
  bound->add_option("--parts", parts, "number of parts");
  bound->add_option("--r2", r2, "kernel bound r^2");
  for (auto* sub : {train, predict, diagnose, bench_syn, bench_ang})
    sub->get_option("--config")->required();

  std::vector<std::string> argv_store{"locstruct"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage_error", e.what(), 0);
    return kExitUsage;
  }

  try {
    if (*train) return cmd_train(flags, out);
    if (*predict) return cmd_predict(flags, out);
    if (*diagnose) return cmd_diagnose(flags, out);
    if (*bench_syn) return cmd_bench_synthetic(flags, out);
    if (*bench_ang) return cmd_bench_angular(flags, out);
    if (*bound) return cmd_bound_check(flags, gamma, parts, r2, out);
  } catch (const ParseError& e) {
    report_error(err, e.kind(), e.what(), e.line());
    return kExitError;
  } catch (const Error& e) {
    report_error(err, e.kind(), e.what(), 0);
    return kExitError;
  } catch (const std::exception& e) {
    report_error(err, "internal_error", e.what(), 0);
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace locstruct::tools
