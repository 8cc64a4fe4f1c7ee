#include "tfr/bench/cross_validation.hpp"

#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

#include "tfr/error.hpp"
#include "tfr/nn/checkpoint.hpp"

namespace tfr::bench {

std::vector<double> EvalReport::accuracies() const {
  std::vector<double> out;
  out.reserve(results.size());
  for (const auto& r : results) out.push_back(r.best_accuracy);
  return out;
}

std::uint64_t job_seed(std::uint64_t base_seed, int run, int fold) {
  return mix_seed(base_seed, (static_cast<std::uint64_t>(run) << 32) |
                                 static_cast<std::uint32_t>(fold));
}

namespace {

FoldResult run_job(const FeatureDataset& data, const nn::ModelConfig& config,
                   const nn::TrainConfig& train, int run, int fold,
                   const std::optional<std::filesystem::path>& checkpoint_dir) {
  FoldResult res;
  res.run = run;
  res.fold = fold;
  res.seed = job_seed(train.seed, run, fold);

  std::vector<std::size_t> train_idx, test_idx;
  std::vector<int> test_labels;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.folds[i] == fold) {
      test_idx.push_back(i);
      test_labels.push_back(data.labels[i]);
    } else {
      train_idx.push_back(i);
    }
  }
  if (test_idx.empty()) throw Error("cross-validation: fold " + std::to_string(fold) + " is empty");
  if (train_idx.empty()) throw Error("cross-validation: no training data outside fold " + std::to_string(fold));
  res.train_size = train_idx.size();
  res.test_size = test_idx.size();

  const nn::Model model(config);
  nn::Parameters params = model.init_params(mix_seed(res.seed, 0), train.init_std);
  nn::Parameters best_params;
  nn::AdamState state = nn::make_adam_state(params);
  Rng rng(mix_seed(res.seed, 1));
  const nn::ImageBatchSource source{data.pixels, data.shape.rows, data.shape.cols, data.labels};

  res.best_accuracy = -1.0;
  for (int epoch = 1; epoch <= train.epochs; ++epoch) {
    const auto stats = nn::train_epoch(model, params, state, train, source, train_idx, rng);
    const auto pred = nn::predict_all(model, params, source, test_idx, train.batch_size);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == test_labels[i];
    const double acc = static_cast<double>(correct) / static_cast<double>(pred.size());
    res.train_loss.push_back(stats.mean_loss);
    res.test_accuracy.push_back(acc);
    if (acc > res.best_accuracy) {
      res.best_accuracy = acc;
      res.best_epoch = epoch;
      res.confusion = confusion_matrix(pred, test_labels, config.num_classes);
      if (checkpoint_dir) best_params = params;
    }
  }
  if (checkpoint_dir) {
    std::filesystem::create_directories(*checkpoint_dir);
    nn::save_checkpoint(*checkpoint_dir / ("run" + std::to_string(run) + "-fold" +
                                           std::to_string(fold) + ".nnck"),
                        config, best_params);
  }
  return res;
}

}  // namespace

EvalReport run_cv(const FeatureDataset& data, const nn::ModelConfig& model,
                  const nn::TrainConfig& train, int num_folds, int num_runs,
                  const CvOptions& options) {
  train.validate();
  if (num_folds < 2) throw std::invalid_argument("cross-validation: need at least two folds");
  if (num_runs < 1) throw std::invalid_argument("cross-validation: need at least one run");
  if (data.size() == 0) throw std::invalid_argument("cross-validation: empty dataset");
  for (int f : data.folds)
    if (f < 1 || f > num_folds)
      throw Error("cross-validation: fold id " + std::to_string(f) + " outside 1.." +
                  std::to_string(num_folds));

  nn::ModelConfig config = model;
  config.input_rows = data.shape.rows;
  config.input_cols = data.shape.cols;
  config.num_classes = data.num_classes;
  const nn::Model probe(config);  // validates the geometry up front

  const std::size_t n_jobs = static_cast<std::size_t>(num_folds) * num_runs;
  std::vector<FoldResult> results(n_jobs);
  std::vector<std::exception_ptr> errors(n_jobs);
  std::mutex log_mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < n_jobs; j = next++) {
      const int run = static_cast<int>(j) / num_folds + 1;
      const int fold = static_cast<int>(j) % num_folds + 1;
      try {
        results[j] = run_job(data, config, train, run, fold, options.checkpoint_dir);
        if (options.log) {
          std::ostringstream os;
          os << "run " << run << " fold " << fold << ": best accuracy "
             << results[j].best_accuracy << " at epoch " << results[j].best_epoch;
          std::lock_guard lock(log_mu);
          options.log(os.str());
        }
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp<int>(options.workers, 1, static_cast<int>(n_jobs));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  EvalReport report;
  report.transform = options.transform_name;
  report.model = std::string(nn::to_string(config.architecture));
  report.filter = std::string(nn::to_string(config.filter));
  report.num_folds = num_folds;
  report.num_runs = num_runs;
  report.num_classes = config.num_classes;
  report.epochs = train.epochs;
  report.seed = train.seed;
  report.results = std::move(results);
  report.summary = median_mad(report.accuracies());
  const FoldResult* best = &report.results.front();
  for (const auto& r : report.results)
    if (r.best_accuracy > best->best_accuracy) best = &r;
  report.confusion = best->confusion;
  report.confusion_run = best->run;
  report.confusion_fold = best->fold;
  return report;
}

EvalReport run_cv(const DatasetManifest& manifest, const TransformSpec& transform,
                  const nn::ModelConfig& model, const nn::TrainConfig& train, int num_folds,
                  int num_runs, const std::filesystem::path& cache_dir, const CvOptions& options) {
  const FeatureDataset data =
      load_feature_dataset(manifest, transform, cache_dir, options.workers, options.log);
  CvOptions opts = options;
  if (opts.transform_name.empty()) opts.transform_name = transform.name();
  return run_cv(data, model, train, num_folds, num_runs, opts);
}

}  // namespace tfr::bench
