#include "nap/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace nap {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void hash_mix(std::uint64_t& h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  h ^= 0xff;
  h *= 0x100000001b3ull;
}

std::string format_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  hash_mix(h, log_path);
  hash_mix(h, mapping.case_column);
  hash_mix(h, mapping.activity_column);
  hash_mix(h, mapping.timestamp_column);
  hash_mix(h, std::string(1, csv.delimiter));
  hash_mix(h, csv.timestamp_format);
  hash_mix(h, csv.missing_sentinel);
  hash_mix(h, std::to_string(max_cardinality));
  hash_mix(h, max_trace_len ? std::to_string(*max_trace_len) : "-");
  hash_mix(h, sample_fraction ? format_num(*sample_fraction) : "-");
  for (auto a : architectures) hash_mix(h, arch_name(a));
  for (auto t : techniques) hash_mix(h, technique_name(t));
  hash_mix(h, std::to_string(folds));
  hash_mix(h, std::to_string(seed));
  hash_mix(h, std::to_string(epochs));
  hash_mix(h, std::to_string(batch_size));
  hash_mix(h, std::to_string(patience));
  return h;
}

void apply_config_line(ExperimentConfig& config, const std::string& key,
                       const std::string& value) {
  if (key == "log") config.log_path = value;
  else if (key == "case_column") config.mapping.case_column = value;
  else if (key == "activity_column") config.mapping.activity_column = value;
  else if (key == "timestamp_column") config.mapping.timestamp_column = value;
  else if (key == "delimiter") config.csv.delimiter = value.empty() ? ',' : value[0];
  else if (key == "timestamp_format") config.csv.timestamp_format = value;
  else if (key == "missing_sentinel") config.csv.missing_sentinel = value;
  else if (key == "max_cardinality") config.max_cardinality = std::stoul(value);
  else if (key == "max_trace_len") config.max_trace_len = std::stoul(value);
  else if (key == "sample_fraction") config.sample_fraction = std::stod(value);
  else if (key == "architectures" || key == "arch") {
    config.architectures.clear();
    for (const auto& a : split_list(value)) config.architectures.push_back(arch_from_name(a));
  } else if (key == "techniques" || key == "encoder") {
    config.techniques.clear();
    for (const auto& t : split_list(value)) config.techniques.push_back(technique_from_name(t));
  } else if (key == "folds") config.folds = std::stoi(value);
  else if (key == "seed") config.seed = std::stoull(value);
  else if (key == "out") config.output_dir = value;
  else if (key == "epochs") config.epochs = std::stoi(value);
  else if (key == "batch") config.batch_size = std::stoi(value);
  else if (key == "patience") config.patience = std::stoi(value);
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  ExperimentConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_config_line(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  if (config.architectures.empty() || config.techniques.empty())
    throw std::runtime_error("architecture and technique lists must be non-empty");
  if (config.folds < 2) throw std::runtime_error("folds must be >= 2");
  return config;
}

BenchmarkReport run_experiment(const ExperimentConfig& config) {
  EventLog log = parse_csv(config.log_path, config.mapping, config.csv);
  log.schema = infer_schema(log);
  log = impute_missing(log);
  log = filter_high_cardinality(log, config.max_cardinality);
  if (config.max_trace_len || config.sample_fraction) {
    log = truncate_and_sample(log, config.max_trace_len.value_or(SIZE_MAX),
                              config.sample_fraction.value_or(1.0), config.seed);
    log.schema = infer_schema(log);
  }

  BenchmarkReport report;
  report.config = config;
  report.stats = compute_statistics(log);

  TrainingConfig tc;
  tc.epochs = config.epochs;
  tc.batch_size = config.batch_size;
  tc.patience = config.patience;

  // Per-cell seed depends only on the cell's own identity, so execution
  // order cannot change any number.
  for (std::size_t ti = 0; ti < config.techniques.size(); ++ti) {
    const Technique technique = config.techniques[ti];
    for (std::size_t ai = 0; ai < config.architectures.size(); ++ai) {
      const ArchKind arch = config.architectures[ai];
      GridCell cell;
      cell.arch = arch;
      cell.technique = technique;
      std::uint64_t cell_seed = config.seed;
      hash_mix(cell_seed, arch_name(arch));
      hash_mix(cell_seed, technique_name(technique));
      try {
        auto cv = run_cross_validation(log, arch, technique, config.folds, cell_seed, tc);
        cell.folds = std::move(cv.folds);
        cell.metrics = aggregate_folds(cell.folds);
      } catch (const std::exception& ex) {
        cell.failed = true;
        cell.error = ex.what();
      }
      report.cells.push_back(std::move(cell));
    }
  }

  // Significance across cells, blocks = folds, when every cell succeeded
  // with a full fold vector.
  bool complete = !report.cells.empty() && report.cells.size() >= 2;
  for (const auto& c : report.cells)
    if (c.failed || static_cast<int>(c.folds.size()) != config.folds) complete = false;
  if (complete && report.cells.size() <= 20) {
    Eigen::MatrixXd scores(config.folds, static_cast<Eigen::Index>(report.cells.size()));
    for (std::size_t c = 0; c < report.cells.size(); ++c)
      for (int f = 0; f < config.folds; ++f)
        scores(f, static_cast<Eigen::Index>(c)) = report.cells[c].folds[static_cast<std::size_t>(f)].accuracy;
    report.significance = nemenyi_test(scores);
  }
  return report;
}

namespace {

std::string cell_label(const GridCell& cell) {
  return std::string(arch_name(cell.arch)) + "-" + technique_name(cell.technique);
}

std::string csv_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void emit_report(const BenchmarkReport& report, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(directory) / "plotdata");

  {
    std::ofstream out(fs::path(directory) / "folds.csv");
    out << "log,arch,technique,fold,accuracy,f1,auc_pr,epochs,val_loss\n";
    for (const auto& cell : report.cells)
      for (const auto& f : cell.folds)
        out << report.config.log_path << ',' << arch_name(cell.arch) << ','
            << technique_name(cell.technique) << ',' << f.fold << ',' << csv_num(f.accuracy)
            << ',' << csv_num(f.weighted_f1) << ',' << csv_num(f.weighted_auc_pr) << ','
            << f.epochs_trained << ',' << csv_num(f.best_val_loss) << '\n';
  }
  {
    std::ofstream out(fs::path(directory) / "summary.csv");
    out << "arch,technique,accuracy_mean,accuracy_std,f1_mean,f1_std,auc_pr_mean,auc_pr_std,"
           "status\n";
    for (const auto& cell : report.cells) {
      out << arch_name(cell.arch) << ',' << technique_name(cell.technique) << ',';
      if (cell.failed) {
        out << ",,,,,,failed\n";
      } else {
        out << csv_num(cell.metrics.accuracy.mean) << ',' << csv_num(cell.metrics.accuracy.stddev)
            << ',' << csv_num(cell.metrics.f1.mean) << ',' << csv_num(cell.metrics.f1.stddev)
            << ',' << csv_num(cell.metrics.auc_pr.mean) << ','
            << csv_num(cell.metrics.auc_pr.stddev) << ",ok\n";
      }
    }
  }
  {
    std::ofstream out(fs::path(directory) / "summary.md");
    out << "# Benchmark summary\n\n";
    out << "| architecture | technique | accuracy | F1 | AUC_PR |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto& cell : report.cells) {
      out << "| " << arch_name(cell.arch) << " | " << technique_name(cell.technique) << " | ";
      if (cell.failed) {
        out << "failed: " << cell.error << " | | |\n";
      } else {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.4f ± %.4f | %.4f ± %.4f | %.4f ± %.4f |",
                      cell.metrics.accuracy.mean, cell.metrics.accuracy.stddev,
                      cell.metrics.f1.mean, cell.metrics.f1.stddev, cell.metrics.auc_pr.mean,
                      cell.metrics.auc_pr.stddev);
        out << buf << '\n';
      }
    }
  }
  {
    std::ofstream out(fs::path(directory) / "stats.csv");
    const LogStats& s = report.stats;
    out << "instances,variants,ratio,activity_classes,events,"
           "events_min,events_max,events_mean,events_median\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%.2f,%zu,%zu,%g,%g,%g,%g\n", s.instances,
                  s.variants, s.instance_variant_ratio, s.activity_classes, s.events,
                  s.events_per_instance.min, s.events_per_instance.max,
                  s.events_per_instance.mean, s.events_per_instance.median);
    out << buf;
  }
  for (const char* metric : {"accuracy", "f1", "auc_pr"}) {
    std::ofstream out(fs::path(directory) / "plotdata" / (std::string(metric) + ".csv"));
    out << "arch";
    for (auto t : report.config.techniques) out << ',' << technique_name(t);
    out << '\n';
    for (auto a : report.config.architectures) {
      out << arch_name(a);
      for (auto t : report.config.techniques) {
        const GridCell* found = nullptr;
        for (const auto& cell : report.cells)
          if (cell.arch == a && cell.technique == t) found = &cell;
        out << ',';
        if (found != nullptr && !found->failed) {
          const double v = std::string(metric) == "accuracy" ? found->metrics.accuracy.mean
                           : std::string(metric) == "f1"     ? found->metrics.f1.mean
                                                             : found->metrics.auc_pr.mean;
          out << csv_num(v);
        }
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(fs::path(directory) / "significance.csv");
    if (report.significance) {
      const auto& sig = *report.significance;
      out << "friedman_statistic," << csv_num(sig.friedman.statistic) << '\n';
      out << "friedman_p," << csv_num(sig.friedman.p_value) << '\n';
      out << "critical_difference," << csv_num(sig.critical_difference) << '\n';
      out << "cell,avg_rank\n";
      for (std::size_t c = 0; c < report.cells.size(); ++c)
        out << cell_label(report.cells[c]) << ',' << csv_num(sig.friedman.average_ranks[c])
            << '\n';
      out << "pair,rank_difference,significant\n";
      for (std::size_t i = 0; i < report.cells.size(); ++i)
        for (std::size_t j = i + 1; j < report.cells.size(); ++j)
          out << cell_label(report.cells[i]) << '|' << cell_label(report.cells[j]) << ','
              << csv_num(sig.rank_difference(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(j)))
              << ',' << (sig.significant[i][j] ? 1 : 0) << '\n';
    }
  }
  {
    nlohmann::json j;
    j["log"] = report.config.log_path;
    j["seed"] = report.config.seed;
    j["folds"] = report.config.folds;
    j["config_hash"] = report.config.hash();
    std::vector<std::string> cells;
    for (const auto& c : report.cells)
      cells.push_back(cell_label(c) + (c.failed ? ":failed" : ":ok"));
    j["cells"] = cells;
    std::ofstream out(fs::path(directory) / "manifest.json");
    out << j.dump(2) << '\n';
  }
}

Eigen::MatrixXd read_score_matrix(const std::string& path, std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty score file '" + path + "'");
  names = split_csv_line(line, ',');
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line, ',');
    if (fields.size() != names.size())
      throw std::runtime_error("ragged score matrix in '" + path + "'");
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(std::stod(f));
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < names.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

}  // namespace nap
