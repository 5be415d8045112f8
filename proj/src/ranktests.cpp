#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "nap/evaluate.hpp"

namespace nap {

namespace {

// Regularized lower incomplete gamma P(a, x), series + continued
// fraction split at x = a + 1.
double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p domain");
  if (x == 0.0) return 0.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

// Studentized range based q_0.05 / sqrt(2) critical values for the
// Nemenyi test, k = 2..20.
constexpr double kNemenyiQ05[] = {
    1.959964, 2.343701, 2.569032, 2.727774, 2.849705, 2.948319, 3.030879, 3.101730,
    3.163684, 3.218654, 3.268004, 3.312739, 3.353618, 3.391230, 3.426041, 3.458425,
    3.488685, 3.517073, 3.543799};

}  // namespace

double chi_squared_sf(double x, int df) {
  if (x <= 0.0) return 1.0;
  return 1.0 - gamma_p(0.5 * df, 0.5 * x);
}

std::vector<double> rank_row_desc(const std::vector<double>& values) {
  const std::size_t k = values.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(k, 0.0);
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i;
    while (j + 1 < k && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

FriedmanResult friedman_test(const Eigen::MatrixXd& scores) {
  const Eigen::Index n = scores.rows(), k = scores.cols();
  if (n < 2 || k < 2) throw std::invalid_argument("friedman test needs n >= 2 and k >= 2");

  FriedmanResult res;
  res.average_ranks.assign(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index b = 0; b < n; ++b) {
    std::vector<double> row(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) row[static_cast<std::size_t>(j)] = scores(b, j);
    const auto ranks = rank_row_desc(row);
    for (std::size_t j = 0; j < ranks.size(); ++j) res.average_ranks[j] += ranks[j];
  }
  for (double& r : res.average_ranks) r /= static_cast<double>(n);

  const double kd = static_cast<double>(k), nd = static_cast<double>(n);
  double sum_sq = 0.0;
  for (double r : res.average_ranks) sum_sq += r * r;
  res.statistic = 12.0 * nd / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  if (res.statistic < 1e-12) res.statistic = 0.0;
  res.p_value = res.statistic == 0.0 ? 1.0 : chi_squared_sf(res.statistic, static_cast<int>(k) - 1);
  return res;
}

SignificanceReport nemenyi_test(const Eigen::MatrixXd& scores) {
  const Eigen::Index n = scores.rows(), k = scores.cols();
  SignificanceReport report;
  report.friedman = friedman_test(scores);
  if (k < 2 || k > 20)
    throw std::invalid_argument("nemenyi critical values embedded for 2 <= k <= 20 only");
  const double q = kNemenyiQ05[k - 2];
  report.critical_difference =
      q * std::sqrt(static_cast<double>(k) * (static_cast<double>(k) + 1.0) /
                    (6.0 * static_cast<double>(n)));
  report.rank_difference = Eigen::MatrixXd::Zero(k, k);
  report.significant.assign(static_cast<std::size_t>(k),
                            std::vector<bool>(static_cast<std::size_t>(k), false));
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const double d = std::abs(report.friedman.average_ranks[static_cast<std::size_t>(i)] -
                                report.friedman.average_ranks[static_cast<std::size_t>(j)]);
      report.rank_difference(i, j) = d;
      if (i != j && d > report.critical_difference)
        report.significant[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
    }
  return report;
}

}  // namespace nap
