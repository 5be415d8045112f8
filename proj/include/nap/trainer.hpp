#pragma once

#include <cstdint>
#include <vector>

#include "nap/archs.hpp"
#include "nap/dataset.hpp"
#include "nap/evaluate.hpp"

namespace nap {

struct TrainingConfig {
  int epochs = 100;
  int batch_size = 128;
  int patience = 10;
  std::uint64_t seed = 0;
};

struct TrainingHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  int best_epoch = -1;    // 0-based index into val_loss
  int stopped_epoch = 0;  // number of epochs actually trained
};

struct TrainedModel {
  NetworkSpec spec;
  nn::Network net;
  TrainingHistory history;
};

// Extracts the selected prefixes as a sequence batch (M step matrices).
nn::Batch make_seq_batch(const Tensor3& X, const std::vector<std::size_t>& indices);

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& Y, const std::vector<std::size_t>& indices);

// Batched inference forward pass; row-deterministic.
Eigen::MatrixXd predict(nn::Network& net, const Tensor3& X,
                        const std::vector<std::size_t>& indices, int batch_size = 512);

// Mini-batch training with early stopping on validation loss and
// best-epoch checkpoint restoration.
TrainedModel train(const NetworkSpec& spec, const PrefixDataset& ds,
                   const std::vector<std::size_t>& train_idx,
                   const std::vector<std::size_t>& val_idx, const TrainingConfig& config);

struct CrossValidationResult {
  std::vector<FoldResult> folds;
  std::vector<TrainingHistory> histories;
};

// Full instance-based k-fold cross-validation of one (architecture,
// technique) cell. Encoders are fitted on the whole log beforehand.
CrossValidationResult run_cross_validation(const EventLog& log, ArchKind arch,
                                           Technique technique, int k, std::uint64_t seed,
                                           const TrainingConfig& config,
                                           const Word2vecParams& w2v = {});

// Same, reusing an already-assembled dataset (for grid runs).
CrossValidationResult run_cross_validation(const PrefixDataset& ds, ArchKind arch, int k,
                                           std::uint64_t seed, const TrainingConfig& config);

}  // namespace nap
