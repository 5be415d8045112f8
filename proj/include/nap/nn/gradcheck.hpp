#pragma once

#include "nap/nn/network.hpp"

namespace nap::nn {

// Analytic parameter gradients of the cross-entropy loss on one batch,
// flattened in network parameter order.
std::vector<Matrix> analytic_gradients(Network& net, const Batch& x, const Matrix& y);

// Central finite differences over every parameter entry.
std::vector<Matrix> numeric_gradients(Network& net, const Batch& x, const Matrix& y,
                                      double h = 1e-5);

double max_relative_error(const std::vector<Matrix>& a, const std::vector<Matrix>& b);

// Max relative error of analytic vs central-difference gradients.
double gradient_check(Network& net, const Batch& x, const Matrix& y, double h = 1e-5);

}  // namespace nap::nn
