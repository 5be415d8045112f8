#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "nap/eventlog.hpp"

namespace nap {

enum class Technique { Ordinal, Binary, Onehot, Hash, Word2vec };

const char* technique_name(Technique t);
Technique technique_from_name(const std::string& name);

// A fitted categorical encoder. Unknown values and padding map to the
// all-zero vector (ordinal index 0) for every technique.
struct FittedEncoder {
  Technique technique = Technique::Ordinal;
  std::string attribute;
  std::vector<std::string> vocabulary;  // order of first appearance
  std::unordered_map<std::string, int> index;  // 1-based ordinal index
  int width = 1;
  int hash_dims = 10;
  Eigen::MatrixXd embeddings;  // |vocabulary| x dims, word2vec only

  // Writes `width` values into `out` starting at column `offset`.
  void apply(const std::string& value, Eigen::Ref<Eigen::RowVectorXd> out, int offset) const;
  Eigen::RowVectorXd apply(const std::string& value) const;
};

struct NumericScaler {
  std::string attribute;
  double min = 0.0;
  double max = 0.0;

  double apply(double value) const;  // clipped to [0,1]
};

struct Word2vecParams {
  int dims = 32;
  int window = 5;
  int epochs = 10;
  double lr0 = 0.025;
  double lr_decay = 0.002;
  int negatives = 5;
  std::uint64_t seed = 0;
};

FittedEncoder fit_ordinal(const std::vector<std::string>& values, const std::string& attribute);
FittedEncoder fit_binary(const std::vector<std::string>& values, const std::string& attribute);
FittedEncoder fit_onehot(const std::vector<std::string>& values, const std::string& attribute);
FittedEncoder fit_hash(const std::string& attribute, int dims = 10);
FittedEncoder train_word2vec(const std::vector<std::vector<std::string>>& corpus,
                             const std::string& attribute, const Word2vecParams& params);

NumericScaler fit_scaler(const std::vector<double>& values, const std::string& attribute);

enum class BlockKind { Activity, TimeDelta, CategoricalContext, NumericalContext };

struct LayoutBlock {
  BlockKind kind;
  std::string attribute;
  int start = 0;
  int width = 0;
};

struct FeatureLayout {
  std::vector<LayoutBlock> blocks;
  int total_width = 0;
};

// The whole fitted per-log encoding state for one technique.
struct EncodingModel {
  Technique technique;
  FittedEncoder activity;
  std::vector<std::string> activity_vocabulary;  // label classes, fit order
  std::unordered_map<std::string, FittedEncoder> categorical;  // by attribute
  std::unordered_map<std::string, NumericScaler> numerical;    // by attribute
  NumericScaler delta_scaler;  // over all time deltas in the log
  FeatureLayout layout;
};

FeatureLayout build_layout(const AttributeSchema& schema, const FittedEncoder& activity,
                           const std::unordered_map<std::string, FittedEncoder>& categorical,
                           const std::unordered_map<std::string, NumericScaler>& numerical);

// Fits activity + context encoders, numeric scalers and the time-delta
// scaler on the full log, then assembles the column layout.
EncodingModel fit_encoding(const EventLog& log, Technique technique,
                           const Word2vecParams& w2v = {});

// Self-describing JSON dump/restore of a fitted encoder.
std::string encoder_to_json(const FittedEncoder& enc);
FittedEncoder encoder_from_json(const std::string& text);

}  // namespace nap
