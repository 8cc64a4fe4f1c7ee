// tfrbench: feature extraction, rendering, training and comparison from the
// command line. Exit codes: 0 success, 1 runtime failure, 2 usage error.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tfr/bench/cross_validation.hpp"
#include "tfr/bench/dataset.hpp"
#include "tfr/bench/report.hpp"
#include "tfr/bench/synthetic.hpp"
#include "tfr/error.hpp"
#include "tfr/featuregram.hpp"
#include "tfr/nn/checkpoint.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Thrown while resolving flags into configs; reported as a usage error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kTransforms{"linear-stft", "mel-stft", "cqt", "cwt", "mfcc"};
const std::vector<std::string> kBands{"wide", "narrow"};

struct Job {
  std::string manifest;
  std::string transform = "mel-stft";
  std::string band = "narrow";
  std::string model = "conv3";
  std::string filter = "3x3";
  int folds = 0;  // 0: take from the manifest
  int runs = 1;
  int epochs = 100;
  int batch_size = 100;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  std::string out;
  int workers = 1;
  bool quiet = false;
};

tfr::TransformSpec resolve_transform(const Job& job) {
  try {
    return tfr::TransformSpec::preset(job.transform, job.band);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

tfr::nn::ModelConfig resolve_model(const Job& job, tfr::ImageShape shape, int classes) {
  try {
    auto cfg = tfr::nn::ModelConfig::make(tfr::nn::parse_architecture(job.model),
                                          tfr::nn::parse_filter(job.filter), shape.rows,
                                          shape.cols, std::max(classes, 2));
    cfg.validate();
    return cfg;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

fs::path cache_root(const Job& job) {
  if (const char* env = std::getenv("TFRBENCH_CACHE"); env && *env) return env;
  return fs::path(job.out) / "features";
}

fs::path cache_dir(const Job& job, const tfr::TransformSpec& spec) {
  return cache_root(job) / (std::string(tfr::preset_name(spec.kind())) + "-" +
                            std::string(tfr::to_string(spec.band)));
}

tfr::bench::LogFn logger(const Job& job) {
  if (job.quiet) return {};
  return [](const std::string& msg) { std::cerr << msg << "\n"; };
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw tfr::Error("cannot write " + path.string());
}

tfr::DatasetManifest load(const Job& job) {
  tfr::ManifestLimits limits;
  if (job.folds > 0) limits.num_folds = job.folds;
  return tfr::load_manifest(job.manifest, limits);
}

int cmd_extract(const Job& job, bool reuse) {
  const auto spec = resolve_transform(job);
  const auto manifest = load(job);
  const auto summary = tfr::bench::extract_manifest(manifest, spec, job.out, job.workers, reuse,
                                                    job.quiet ? tfr::bench::LogFn{} : logger(job));
  for (const auto& f : summary.failures) std::cerr << "error: " << f << "\n";
  std::cout << "extracted " << summary.written << " file(s), reused " << summary.reused
            << ", failed " << summary.failures.size() << "; shape " << summary.shape.rows << "x"
            << summary.shape.cols << " (" << spec.name() << ")\n";
  return summary.failures.empty() ? 0 : kExitRuntime;
}

int cmd_render(const std::string& input, const std::string& output) {
  tfr::export_png(tfr::read_feature_file(input), output);
  std::cout << "wrote " << output << "\n";
  return 0;
}

int cmd_train(const Job& job) {
  const auto spec = resolve_transform(job);
  const auto manifest = load(job);
  if (manifest.size() == 0) throw tfr::Error("train: manifest is empty");
  const int folds = job.folds > 0 ? job.folds : manifest.num_folds();
  auto model = resolve_model(job, spec.output_shape(), manifest.num_classes());

  tfr::nn::TrainConfig train;
  train.epochs = job.epochs;
  train.batch_size = job.batch_size;
  train.seed = job.seed;
  train.adam.learning_rate = job.learning_rate;
  try {
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  tfr::bench::CvOptions opts;
  opts.workers = job.workers;
  opts.checkpoint_dir = fs::path(job.out) / "checkpoints";
  opts.transform_name = spec.name();
  opts.log = logger(job);
  const auto report = tfr::bench::run_cv(manifest, spec, model, train, folds, job.runs,
                                         cache_dir(job, spec), opts);
  tfr::bench::write_report(report, job.out);
  std::cout << "median accuracy " << report.summary.median << " (MAD " << report.summary.mad
            << ") over " << report.results.size() << " fold run(s); report in " << job.out << "\n";
  return 0;
}

int cmd_evaluate(const Job& job, const std::string& checkpoint, int fold) {
  const auto spec = resolve_transform(job);
  const auto manifest = load(job);
  const auto model_cfg = resolve_model(job, spec.output_shape(), manifest.num_classes());
  const auto params = tfr::nn::load_checkpoint(checkpoint, model_cfg);
  const auto data = tfr::bench::load_feature_dataset(manifest, spec, cache_dir(job, spec),
                                                     job.workers, logger(job));
  std::vector<std::size_t> idx;
  std::vector<int> labels;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.folds[i] == fold) {
      idx.push_back(i);
      labels.push_back(data.labels[i]);
    }
  }
  if (idx.empty()) throw tfr::Error("evaluate: fold " + std::to_string(fold) + " has no clips");
  const tfr::nn::Model model(model_cfg);
  const tfr::nn::ImageBatchSource source{data.pixels, data.shape.rows, data.shape.cols, data.labels};
  const auto pred = tfr::nn::predict_all(model, params, source, idx, job.batch_size);
  const auto confusion = tfr::bench::confusion_matrix(pred, labels, model_cfg.num_classes);
  const double acc = static_cast<double>(confusion.trace()) / static_cast<double>(idx.size());

  nlohmann::json j;
  j["transform"] = spec.name();
  j["model"] = job.model;
  j["filter"] = job.filter;
  j["checkpoint"] = fs::path(checkpoint).filename().string();
  j["fold"] = fold;
  j["test_size"] = idx.size();
  j["accuracy"] = acc;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < confusion.cols(); ++c) row.push_back(confusion(r, c));
    rows.push_back(row);
  }
  j["confusion"] = rows;
  write_text(fs::path(job.out) / "evaluation.json", j.dump(2) + "\n");
  write_text(fs::path(job.out) / "confusion.csv", tfr::bench::confusion_to_csv(confusion));
  std::cout << "fold " << fold << " accuracy " << acc << " (" << idx.size() << " clips)\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& reports, double alpha, const std::string& out) {
  if (reports.size() < 2) throw UsageError("compare: need at least two reports");
  std::vector<tfr::bench::NamedGroup> groups;
  std::map<std::string, int> seen;
  for (const auto& path : reports) {
    const auto r = tfr::bench::read_report(path);
    std::string name = r.transform + " " + r.model + " " + r.filter;
    if (seen[name]++) name += " (" + path + ")";
    groups.push_back({name, r.accuracies()});
  }
  tfr::bench::Groups values;
  for (const auto& g : groups) values.push_back(g.values);
  const auto result = tfr::bench::anova_tukey(values, alpha);
  const std::string text = tfr::bench::significance_to_json(groups, result, alpha);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
    std::cout << "best: " << groups[result.best].name << "; " << result.top_performers.size()
              << " top performer(s); written to " << out << "\n";
  }
  return 0;
}

int cmd_synth(const std::string& out, int per_class, int folds, std::uint64_t seed) {
  tfr::bench::SynthOptions opts;
  opts.clips_per_class = per_class;
  opts.num_folds = folds;
  opts.seed = seed;
  const auto manifest = tfr::bench::write_synthetic_dataset(out, opts);
  std::cout << "wrote " << manifest.size() << " clips and " << (fs::path(out) / "manifest.csv").string()
            << "\n";
  return 0;
}

void add_transform_flags(CLI::App* cmd, Job& job) {
  cmd->add_option("--transform", job.transform, "Representation")
      ->check(CLI::IsMember(kTransforms))
      ->capture_default_str();
  cmd->add_option("--band", job.band, "Band preset")
      ->check(CLI::IsMember(kBands))
      ->capture_default_str();
}

void add_model_flags(CLI::App* cmd, Job& job) {
  cmd->add_option("--model", job.model, "Architecture")
      ->check(CLI::IsMember({"conv3", "conv5"}))
      ->capture_default_str();
  cmd->add_option("--filter", job.filter, "First-layer filter shape")
      ->check(CLI::IsMember({"3x3", "Mx3"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-frequency feature extraction and CNN benchmark tool"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tfrbench 0.1.0");
  Job job;

  auto* extract = app.add_subcommand("extract", "Extract one feature file per manifest clip");
  extract->add_option("--manifest", job.manifest, "CSV with header path,label,fold")
      ->required()
      ->check(CLI::ExistingFile);
  add_transform_flags(extract, job);
  extract->add_option("--out", job.out, "Output directory")->required();
  extract->add_option("--workers", job.workers, "Parallel extraction workers")
      ->check(CLI::PositiveNumber);
  extract->add_option("--seed", job.seed, "Accepted for uniformity; extraction is deterministic");
  bool reuse = false;
  extract->add_flag("--reuse", reuse, "Keep existing valid feature files");
  extract->add_flag("--quiet", job.quiet, "Only print the summary");

  std::string render_in, render_out;
  auto* render = app.add_subcommand("render", "Render a feature file as a grayscale PNG");
  render->add_option("input", render_in, "TFR1 feature file")->required()->check(CLI::ExistingFile);
  render->add_option("--out", render_out, "PNG path")->required();

  auto* train = app.add_subcommand("train", "Cross-validated training; writes report and checkpoints");
  train->add_option("--manifest", job.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  add_transform_flags(train, job);
  add_model_flags(train, job);
  train->add_option("--folds", job.folds, "Fold count (default: largest fold id)")
      ->check(CLI::Range(2, 1000));
  train->add_option("--runs", job.runs, "Repetitions of the full k-fold sweep")
      ->check(CLI::Range(1, 1000))
      ->capture_default_str();
  train->add_option("--epochs", job.epochs, "Epochs per fold")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  train->add_option("--batch-size", job.batch_size, "Minibatch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--lr", job.learning_rate, "Adam learning rate")->capture_default_str();
  train->add_option("--seed", job.seed, "Base seed")->capture_default_str();
  train->add_option("--out", job.out, "Output directory")->required();
  train->add_option("--workers", job.workers, "Parallel (run, fold) jobs")->check(CLI::PositiveNumber);
  train->add_flag("--quiet", job.quiet, "No progress output");

  std::string checkpoint;
  int eval_fold = 1;
  auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint on one fold");
  evaluate->add_option("--manifest", job.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  add_transform_flags(evaluate, job);
  add_model_flags(evaluate, job);
  evaluate->add_option("--checkpoint", checkpoint, "NNCK file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--fold", eval_fold, "Fold to score")->required()->check(CLI::PositiveNumber);
  evaluate->add_option("--out", job.out, "Output directory")->required();
  evaluate->add_option("--workers", job.workers, "Extraction workers on a cache miss")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--seed", job.seed, "Accepted for uniformity; evaluation is deterministic");
  evaluate->add_flag("--quiet", job.quiet, "No progress output");

  std::vector<std::string> reports;
  double alpha = 0.05;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "ANOVA + Tukey HSD across report.json files");
  compare->add_option("reports", reports, "report.json files")->required()->check(CLI::ExistingFile);
  compare->add_option("--alpha", alpha, "Significance level")
      ->check(CLI::Range(1e-6, 0.5))
      ->capture_default_str();
  compare->add_option("--out", compare_out, "Output JSON (default: stdout)");

  std::string synth_out;
  int per_class = 50;
  int synth_folds = 5;
  auto* synth = app.add_subcommand("synth", "Write the synthetic four-class dataset");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--clips-per-class", per_class, "Clips per class")
      ->check(CLI::Range(1, 100000))
      ->capture_default_str();
  synth->add_option("--folds", synth_folds, "Fold count")->check(CLI::Range(1, 1000))->capture_default_str();
  synth->add_option("--seed", job.seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*extract) return cmd_extract(job, reuse);
    if (*render) return cmd_render(render_in, render_out);
    if (*train) return cmd_train(job);
    if (*evaluate) return cmd_evaluate(job, checkpoint, eval_fold);
    if (*compare) return cmd_compare(reports, alpha, compare_out);
    if (*synth) return cmd_synth(synth_out, per_class, synth_folds, job.seed);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
