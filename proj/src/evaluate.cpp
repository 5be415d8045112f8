#include "nap/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nap {

double average_precision(const std::vector<double>& scores, const std::vector<int>& positives) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::size_t total_pos = 0;
  for (int p : positives) total_pos += static_cast<std::size_t>(p);
  if (total_pos == 0) return 0.0;

  double ap = 0.0;
  std::size_t tp = 0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (positives[order[i]]) {
      ++tp;
      const double precision = static_cast<double>(tp) / static_cast<double>(i + 1);
      const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
      ap += (recall - prev_recall) * precision;
      prev_recall = recall;
    }
  }
  return ap;
}

FoldResult compute_metrics(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& targets,
                           const std::vector<std::string>& classes) {
  const Eigen::Index n = probs.rows();
  const Eigen::Index V = probs.cols();
  if (n == 0) throw std::invalid_argument("empty test set");
  if (targets.rows() != n || targets.cols() != V)
    throw std::invalid_argument("prediction/target shape mismatch");

  std::vector<Eigen::Index> pred(static_cast<std::size_t>(n)), truth(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < V; ++c)
      if (probs(r, c) > probs(r, best)) best = c;  // ties keep the lowest index
    pred[static_cast<std::size_t>(r)] = best;
    Eigen::Index t;
    targets.row(r).maxCoeff(&t);
    truth[static_cast<std::size_t>(r)] = t;
  }

  FoldResult res;
  res.support.assign(static_cast<std::size_t>(V), 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++res.support[static_cast<std::size_t>(truth[i])];
    if (pred[i] == truth[i]) ++correct;
  }
  res.accuracy = static_cast<double>(correct) / static_cast<double>(n);

  double f1_sum = 0.0, ap_sum = 0.0;
  std::size_t weight_total = 0;
  for (Eigen::Index c = 0; c < V; ++c) {
    const std::size_t sup = res.support[static_cast<std::size_t>(c)];
    if (sup == 0) continue;  // zero-support classes excluded
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool is_true = truth[i] == c, is_pred = pred[i] == c;
      if (is_true && is_pred) ++tp;
      else if (is_pred) ++fp;
      else if (is_true) ++fn;
    }
    const double precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    const double f1 = (precision + recall > 0.0) ? 2.0 * precision * recall / (precision + recall) : 0.0;

    std::vector<double> scores(truth.size());
    std::vector<int> positives(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      scores[i] = probs(static_cast<Eigen::Index>(i), c);
      positives[i] = truth[i] == c ? 1 : 0;
    }
    f1_sum += static_cast<double>(sup) * f1;
    ap_sum += static_cast<double>(sup) * average_precision(scores, positives);
    weight_total += sup;
  }
  res.weighted_f1 = f1_sum / static_cast<double>(weight_total);
  res.weighted_auc_pr = ap_sum / static_cast<double>(weight_total);
  (void)classes;
  return res;
}

MetricSet aggregate_folds(const std::vector<FoldResult>& results) {
  if (results.empty()) throw std::invalid_argument("no fold results");
  auto stat = [&](auto field) {
    MetricStat s;
    for (const auto& r : results) s.mean += field(r);
    s.mean /= static_cast<double>(results.size());
    double var = 0.0;
    for (const auto& r : results) {
      const double d = field(r) - s.mean;
      var += d * d;
    }
    s.stddev = std::sqrt(var / static_cast<double>(results.size()));
    return s;
  };
  MetricSet out;
  out.accuracy = stat([](const FoldResult& r) { return r.accuracy; });
  out.f1 = stat([](const FoldResult& r) { return r.weighted_f1; });
  out.auc_pr = stat([](const FoldResult& r) { return r.weighted_auc_pr; });
  return out;
}

}  // namespace nap
