#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nap/trainer.hpp"

namespace nap {

struct ExperimentConfig {
  std::string log_path;
  ColumnMapping mapping;
  CsvOptions csv;

  std::size_t max_cardinality = 600;
  std::optional<std::size_t> max_trace_len;
  std::optional<double> sample_fraction;

  std::vector<ArchKind> architectures = {ArchKind::Mlp, ArchKind::Lstm, ArchKind::Cnn};
  std::vector<Technique> techniques = {Technique::Ordinal, Technique::Binary, Technique::Onehot,
                                       Technique::Hash, Technique::Word2vec};
  int folds = 10;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  int epochs = 100;
  int batch_size = 128;
  int patience = 10;

  // FNV-1a over the semantically meaningful fields.
  std::uint64_t hash() const;
};

// Plain key=value config file; '#' starts a comment. List values are
// comma separated.
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_line(ExperimentConfig& config, const std::string& key,
                       const std::string& value);

struct GridCell {
  ArchKind arch;
  Technique technique;
  bool failed = false;
  std::string error;
  std::vector<FoldResult> folds;
  MetricSet metrics;
};

struct BenchmarkReport {
  ExperimentConfig config;
  LogStats stats;
  std::vector<GridCell> cells;
  // Friedman/Nemenyi over the grid: blocks = folds, treatments = cells.
  std::optional<SignificanceReport> significance;
};

BenchmarkReport run_experiment(const ExperimentConfig& config);

// folds.csv, summary.csv, summary.md, stats.csv, significance.csv,
// plotdata/<metric>.csv and manifest.json under `directory`.
void emit_report(const BenchmarkReport& report, const std::string& directory);

// Score matrix from CSV: rows = blocks, columns = treatments, header row
// with treatment names.
Eigen::MatrixXd read_score_matrix(const std::string& path, std::vector<std::string>& names);

}  // namespace nap
