#include "nap/nn/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

namespace nap::nn {

std::vector<Matrix> analytic_gradients(Network& net, const Batch& x, const Matrix& y) {
  const Matrix probs = net.forward(x, true);
  net.backward_from_logits(cross_entropy_softmax_grad(probs, y));
  std::vector<Matrix> out;
  for (Matrix* g : net.grads()) out.push_back(*g);
  return out;
}

std::vector<Matrix> numeric_gradients(Network& net, const Batch& x, const Matrix& y, double h) {
  std::vector<Matrix> out;
  for (Matrix* p : net.params()) {
    Matrix g(p->rows(), p->cols());
    for (Eigen::Index i = 0; i < p->rows(); ++i)
      for (Eigen::Index j = 0; j < p->cols(); ++j) {
        const double orig = (*p)(i, j);
        (*p)(i, j) = orig + h;
        const double lp = cross_entropy(net.forward(x, true), y);
        (*p)(i, j) = orig - h;
        const double lm = cross_entropy(net.forward(x, true), y);
        (*p)(i, j) = orig;
        g(i, j) = (lp - lm) / (2.0 * h);
      }
    out.push_back(std::move(g));
  }
  return out;
}

double max_relative_error(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("gradient list size mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (Eigen::Index i = 0; i < a[k].rows(); ++i)
      for (Eigen::Index j = 0; j < a[k].cols(); ++j) {
        const double x = a[k](i, j), z = b[k](i, j);
        // floor keeps finite-difference noise on true-zero entries from
        // registering as relative error; below it the comparison is
        // effectively absolute with tolerance tol * 1e-5
        const double denom = std::max(1e-5, std::abs(x) + std::abs(z));
        worst = std::max(worst, std::abs(x - z) / denom);
      }
  return worst;
}

double gradient_check(Network& net, const Batch& x, const Matrix& y, double h) {
  const auto analytic = analytic_gradients(net, x, y);
  const auto numeric = numeric_gradients(net, x, y, h);
  return max_relative_error(analytic, numeric);
}

}  // namespace nap::nn
