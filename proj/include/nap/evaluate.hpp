#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace nap {

struct FoldResult {
  int fold = 0;
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
  double weighted_auc_pr = 0.0;
  int epochs_trained = 0;
  double best_val_loss = 0.0;
  std::vector<std::size_t> support;  // per class, test fold
};

struct MetricStat {
  double mean = 0.0;
  double stddev = 0.0;  // population (divide by n)
};

struct MetricSet {
  MetricStat accuracy, f1, auc_pr;
};

// Argmax prediction (ties -> lowest class index), accuracy, support-
// weighted F1 and support-weighted average precision. Classes without
// test support are excluded from the weighted averages.
FoldResult compute_metrics(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& targets,
                           const std::vector<std::string>& classes);

MetricSet aggregate_folds(const std::vector<FoldResult>& results);

// Step-wise (non-interpolated) average precision of one-vs-rest scores.
double average_precision(const std::vector<double>& scores, const std::vector<int>& positives);

struct FriedmanResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::vector<double> average_ranks;  // per treatment; rank 1 = highest score
};

// Friedman rank test over an n blocks x k treatments score matrix.
FriedmanResult friedman_test(const Eigen::MatrixXd& scores);

struct SignificanceReport {
  FriedmanResult friedman;
  double critical_difference = 0.0;
  Eigen::MatrixXd rank_difference;          // |avg rank_i - avg rank_j|
  std::vector<std::vector<bool>> significant;  // at alpha = 0.05
};

// Nemenyi post-hoc test at alpha = 0.05; supports k <= 20 treatments.
SignificanceReport nemenyi_test(const Eigen::MatrixXd& scores);

// Survival function of the chi-squared distribution with df degrees.
double chi_squared_sf(double x, int df);

// Within-row ranks with average ranks on ties; rank 1 = highest value.
std::vector<double> rank_row_desc(const std::vector<double>& values);

}  // namespace nap
