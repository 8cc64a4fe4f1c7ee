#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tfr/bench/dataset.hpp"
#include "tfr/bench/stats.hpp"
#include "tfr/featuregram.hpp"
#include "tfr/nn/model.hpp"
#include "tfr/nn/training.hpp"

namespace tfr::bench {

struct FoldResult {
  int run = 0;
  int fold = 0;
  int best_epoch = 0;  // 1-based
  double best_accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t seed = 0;
  std::vector<double> test_accuracy;  // per epoch
  std::vector<double> train_loss;     // per epoch
  Eigen::MatrixXi confusion;          // at the best epoch
};

struct EvalReport {
  std::string transform;
  std::string model;
  std::string filter;
  int num_folds = 0;
  int num_runs = 0;
  int num_classes = 0;
  int epochs = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> results;  // ordered by (run, fold)
  MedianMad summary;
  // Confusion matrix of the best (run, fold) at its best epoch.
  Eigen::MatrixXi confusion;
  int confusion_run = 0;
  int confusion_fold = 0;

  std::vector<double> accuracies() const;
};

struct CvOptions {
  int workers = 1;
  // Writes the best-epoch parameters of every (run, fold) when set.
  std::optional<std::filesystem::path> checkpoint_dir;
  std::string transform_name;
  LogFn log;
};

// Seed of the (run, fold) job derived from the base seed.
std::uint64_t job_seed(std::uint64_t base_seed, int run, int fold);

// Every run holds out each fold once, trains on the rest for the configured
// epochs (reshuffling every epoch), and keeps the best per-epoch test
// accuracy. The model's input dims and class count are taken from the data.
EvalReport run_cv(const FeatureDataset& data, const nn::ModelConfig& model,
                  const nn::TrainConfig& train, int num_folds, int num_runs,
                  const CvOptions& options = {});

EvalReport run_cv(const DatasetManifest& manifest, const TransformSpec& transform,
                  const nn::ModelConfig& model, const nn::TrainConfig& train, int num_folds,
                  int num_runs, const std::filesystem::path& cache_dir,
                  const CvOptions& options = {});

}  // namespace tfr::bench
