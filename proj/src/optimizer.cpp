#include "nap/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace nap::nn {

const char* optimizer_name(OptKind k) { return k == OptKind::Adam ? "adam" : "nadam"; }

void Optimizer::step(const std::vector<Matrix*>& params, const std::vector<Matrix*>& grads) {
  if (params.size() != grads.size())
    throw std::invalid_argument("parameter/gradient count mismatch");
  if (m.empty()) {
    for (Matrix* p : params) {
      m.push_back(Matrix::Zero(p->rows(), p->cols()));
      v.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  ++t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = *grads[i];
    if (g.rows() != p.rows() || g.cols() != p.cols())
      throw std::invalid_argument("gradient shape mismatch");
    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
    v[i] = beta2 * v[i] + (1.0 - beta2) * g.cwiseProduct(g);
    const Matrix vhat = v[i] / bc2;
    Matrix mbar;
    if (kind == OptKind::Adam) {
      mbar = m[i] / bc1;
    } else {
      // Nesterov-corrected first moment, schedule-free form.
      mbar = beta1 * (m[i] / bc1) + (1.0 - beta1) * g / bc1;
    }
    p.array() -= lr * mbar.array() / (vhat.array().sqrt() + eps);
  }
}

}  // namespace nap::nn
