#include "doctest.h"

#include <fstream>
#include <sstream>

#include "nap/experiment.hpp"
#include "testutil.hpp"

using namespace nap;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_config(const std::string& out) {
  const EventLog log = testutil::grammar_log(25, 31);
  const std::string csv = testutil::temp_path("exp_gram.csv");
  testutil::write_log_csv(log, csv);
  ExperimentConfig config;
  config.log_path = csv;
  config.mapping = {"case", "activity", "ts"};
  config.architectures = {ArchKind::Mlp};
  config.techniques = {Technique::Ordinal, Technique::Onehot};
  config.folds = 2;
  config.epochs = 1;
  config.batch_size = 32;
  config.seed = 3;
  config.output_dir = out;
  return config;
}

}  // namespace

TEST_CASE("config files parse keys, lists and comments") {
  const std::string path = testutil::write_temp_csv(
      "exp.cfg",
      "# benchmark setup\n"
      "log = /tmp/some.csv\n"
      "case_column = case\n"
      "activity_column = act\n"
      "timestamp_column = ts\n"
      "\n"
      "architectures = mlp, cnn\n"
      "techniques = onehot,hash\n"
      "folds = 5\n"
      "seed = 42\n"
      "max_trace_len = 250\n"
      "sample_fraction = 0.1\n"
      "out = /tmp/results\n");
  const ExperimentConfig c = parse_config_file(path);
  CHECK(c.log_path == "/tmp/some.csv");
  CHECK(c.mapping.activity_column == "act");
  CHECK(c.architectures == std::vector<ArchKind>{ArchKind::Mlp, ArchKind::Cnn});
  CHECK(c.techniques == std::vector<Technique>{Technique::Onehot, Technique::Hash});
  CHECK(c.folds == 5);
  CHECK(c.seed == 42);
  REQUIRE(c.max_trace_len.has_value());
  CHECK(*c.max_trace_len == 250);
  REQUIRE(c.sample_fraction.has_value());
  CHECK(*c.sample_fraction == doctest::Approx(0.1));
  CHECK(c.output_dir == "/tmp/results");

  ExperimentConfig d;
  CHECK_THROWS(apply_config_line(d, "no_such_key", "1"));
  CHECK_THROWS(apply_config_line(d, "arch", "transformer"));
}

TEST_CASE("defaults cover the full reference grid") {
  const ExperimentConfig c;
  CHECK(c.architectures.size() == 3);
  CHECK(c.techniques.size() == 5);
  CHECK(c.folds == 10);
  CHECK(c.epochs == 100);
  CHECK(c.batch_size == 128);
  CHECK(c.patience == 10);
  CHECK(c.max_cardinality == 600);
}

TEST_CASE("config hash is stable and sensitive") {
  ExperimentConfig a, b;
  a.log_path = b.log_path = "x.csv";
  CHECK(a.hash() == b.hash());
  b.seed = 1;
  CHECK(a.hash() != b.hash());
  b = a;
  b.techniques.pop_back();
  CHECK(a.hash() != b.hash());
}

TEST_CASE("experiment run emits the full report") {
  const std::string out = testutil::temp_path("exp_out");
  const ExperimentConfig config = tiny_config(out);
  const BenchmarkReport report = run_experiment(config);
  REQUIRE(report.cells.size() == 2);
  for (const auto& cell : report.cells) {
    CHECK_FALSE(cell.failed);
    CHECK(cell.folds.size() == 2);
  }
  CHECK(report.stats.instances == 25);
  REQUIRE(report.significance.has_value());

  emit_report(report, out);
  for (const char* file : {"folds.csv", "summary.csv", "summary.md", "stats.csv",
                           "significance.csv", "manifest.json", "plotdata/accuracy.csv"})
    CHECK(std::ifstream(out + "/" + file).good());

  // folds.csv has header + folds x cells rows
  const std::string folds = slurp(out + "/folds.csv");
  CHECK(std::count(folds.begin(), folds.end(), '\n') == 1 + 2 * 2);
}

TEST_CASE("identical configurations produce byte-identical folds") {
  const std::string out1 = testutil::temp_path("exp_det1");
  const std::string out2 = testutil::temp_path("exp_det2");
  ExperimentConfig c1 = tiny_config(out1);
  ExperimentConfig c2 = tiny_config(out2);
  emit_report(run_experiment(c1), out1);
  emit_report(run_experiment(c2), out2);
  CHECK(slurp(out1 + "/folds.csv") == slurp(out2 + "/folds.csv"));
  CHECK(slurp(out1 + "/summary.csv") == slurp(out2 + "/summary.csv"));
}

TEST_CASE("score matrix round-trips through csv") {
  const std::string path = testutil::write_temp_csv(
      "scores.csv", "alpha,beta\n0.5,0.25\n0.75,0.125\n");
  std::vector<std::string> names;
  const Eigen::MatrixXd m = read_score_matrix(path, names);
  REQUIRE(names == std::vector<std::string>{"alpha", "beta"});
  REQUIRE(m.rows() == 2);
  CHECK(m(0, 1) == 0.25);
  CHECK(m(1, 0) == 0.75);

  CHECK_THROWS(read_score_matrix("/nonexistent.csv", names));
  const std::string ragged = testutil::write_temp_csv("ragged_scores.csv", "a,b\n1.0\n");
  CHECK_THROWS(read_score_matrix(ragged, names));
}
