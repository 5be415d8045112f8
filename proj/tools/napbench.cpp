#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "nap/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Next-activity prediction benchmark over (architecture x encoding) grids"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute the benchmark grid for one event log");
  std::string config_path;
  run->add_option("--config", config_path, "key=value config file")->required();
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const char* key : {"log", "arch", "encoder", "folds", "seed", "out", "epochs", "batch"}) {
    auto* opt = run->add_option(std::string("--") + key, "override config value");
    opt->each([&overrides, key](const std::string& v) { overrides.emplace_back(key, v); });
  }

  // stats
  auto* stats = app.add_subcommand("stats", "print descriptive statistics of an event log");
  std::string stats_log, case_col, act_col, ts_col, ts_fmt = "%Y-%m-%dT%H:%M:%S";
  std::string delimiter = ",";
  stats->add_option("--log", stats_log)->required();
  stats->add_option("--case-column", case_col)->required();
  stats->add_option("--activity-column", act_col)->required();
  stats->add_option("--timestamp-column", ts_col)->required();
  stats->add_option("--timestamp-format", ts_fmt);
  stats->add_option("--delimiter", delimiter);

  // significance
  auto* sig = app.add_subcommand("significance", "Friedman/Nemenyi tests over a fold x experiment score matrix");
  std::string scores_path;
  sig->add_option("--scores", scores_path, "CSV: rows = folds/blocks, columns = experiments")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      nap::ExperimentConfig config = nap::parse_config_file(config_path);
      for (const auto& [k, v] : overrides) nap::apply_config_line(config, k, v);
      const auto report = nap::run_experiment(config);
      nap::emit_report(report, config.output_dir);
      bool any_failed = false;
      for (const auto& cell : report.cells) {
        if (cell.failed) {
          any_failed = true;
          std::cerr << nap::arch_name(cell.arch) << "-" << nap::technique_name(cell.technique)
                    << " failed: " << cell.error << "\n";
        }
      }
      std::cout << "report written to " << config.output_dir << "\n";
      return any_failed ? 1 : 0;
    }
    if (*stats) {
      nap::CsvOptions options;
      options.timestamp_format = ts_fmt;
      options.delimiter = delimiter.empty() ? ',' : delimiter[0];
      nap::EventLog log =
          nap::parse_csv(stats_log, {case_col, act_col, ts_col}, options);
      log.schema = nap::infer_schema(log);
      const auto s = nap::compute_statistics(log);
      std::printf("instances:          %zu\n", s.instances);
      std::printf("variants:           %zu\n", s.variants);
      std::printf("instance/variant:   %.2f\n", s.instance_variant_ratio);
      std::printf("activity classes:   %zu\n", s.activity_classes);
      std::printf("events:             %zu\n", s.events);
      std::printf("events/instance:    [%g; %g; %.2f; %g]  (min; max; mean; median)\n",
                  s.events_per_instance.min, s.events_per_instance.max,
                  s.events_per_instance.mean, s.events_per_instance.median);
      std::printf("activities/instance:[%g; %g; %.2f; %g]\n", s.activities_per_instance.min,
                  s.activities_per_instance.max, s.activities_per_instance.mean,
                  s.activities_per_instance.median);
      std::printf("attributes:         [%zu; %zu; %zu]  (total; numerical; categorical)\n",
                  s.attributes_total, s.attributes_numerical, s.attributes_categorical);
      for (const auto& [name, distinct] : s.attribute_distinct)
        std::printf("  %-24s %zu distinct\n", name.c_str(), distinct);
      return 0;
    }
    if (*sig) {
      std::vector<std::string> names;
      const Eigen::MatrixXd scores = nap::read_score_matrix(scores_path, names);
      const auto report = nap::nemenyi_test(scores);
      std::printf("friedman statistic: %.6f\n", report.friedman.statistic);
      std::printf("friedman p-value:   %.6g\n", report.friedman.p_value);
      std::printf("critical difference:%.6f\n", report.critical_difference);
      for (std::size_t i = 0; i < names.size(); ++i)
        std::printf("  %-24s avg rank %.3f\n", names[i].c_str(),
                    report.friedman.average_ranks[i]);
      for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
          if (report.significant[i][j])
            std::printf("significant: %s vs %s (|dr| = %.3f)\n", names[i].c_str(),
                        names[j].c_str(),
                        report.rank_difference(static_cast<Eigen::Index>(i),
                                               static_cast<Eigen::Index>(j)));
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
