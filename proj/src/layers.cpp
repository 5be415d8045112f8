#include "nap/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace nap::nn {

Matrix glorot_uniform(int rows, int cols, int fan_in, int fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / (static_cast<double>(fan_in) + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
  return m;
}

// ---------------------------------------------------------------- Dense

Dense::Dense(int in, int out, std::mt19937_64& rng) {
  W_ = glorot_uniform(in, out, in, out, rng);
  b_ = Matrix::Zero(1, out);
}

Batch Dense::forward(const Batch& x, bool) {
  if (x.is_seq) throw std::invalid_argument("dense expects a matrix batch");
  if (x.mat.cols() != W_.rows()) throw std::invalid_argument("dense input width mismatch");
  x_ = x.mat;
  Matrix y = x.mat * W_;
  y.rowwise() += b_.row(0);
  return Batch::matrix(std::move(y));
}

Batch Dense::backward(const Batch& grad) {
  const Matrix& g = grad.mat;
  dW_ = x_.transpose() * g;
  db_ = g.colwise().sum();
  return Batch::matrix(g * W_.transpose());
}

// ----------------------------------------------------------------- Relu

Batch Relu::forward(const Batch& x, bool) {
  input_ = x;
  Batch y = x;
  if (y.is_seq)
    for (auto& s : y.steps) s = s.cwiseMax(0.0);
  else
    y.mat = y.mat.cwiseMax(0.0);
  return y;
}

Batch Relu::backward(const Batch& grad) {
  Batch g = grad;
  if (g.is_seq) {
    for (std::size_t t = 0; t < g.steps.size(); ++t)
      g.steps[t] = g.steps[t].cwiseProduct(
          (input_.steps[t].array() > 0.0).cast<double>().matrix());
  } else {
    g.mat = g.mat.cwiseProduct((input_.mat.array() > 0.0).cast<double>().matrix());
  }
  return g;
}

// -------------------------------------------------------------- Softmax

Batch Softmax::forward(const Batch& x, bool) {
  if (x.is_seq) throw std::invalid_argument("softmax expects a matrix batch");
  Matrix z = x.mat;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double m = z.row(r).maxCoeff();
    z.row(r) = (z.row(r).array() - m).exp();
    z.row(r) /= z.row(r).sum();
  }
  probs_ = z;
  return Batch::matrix(std::move(z));
}

Batch Softmax::backward(const Batch& grad) {
  const Matrix& g = grad.mat;
  Matrix dx(g.rows(), g.cols());
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    const double dot = g.row(r).dot(probs_.row(r));
    dx.row(r) = (probs_.row(r).array() * (g.row(r).array() - dot)).matrix();
  }
  return Batch::matrix(std::move(dx));
}

// ------------------------------------------------------------ BatchNorm

BatchNorm::BatchNorm(int features, double eps, double momentum)
    : eps_(eps), momentum_(momentum) {
  gamma_ = Matrix::Ones(1, features);
  beta_ = Matrix::Zero(1, features);
  running_mean_ = Matrix::Zero(1, features);
  running_var_ = Matrix::Ones(1, features);
}

Matrix BatchNorm::forward_rows(const Matrix& x, bool training) {
  if (training) {
    if (x.rows() < 2) throw std::invalid_argument("batchnorm needs batch size >= 2 in training");
    const Matrix mean = x.colwise().mean();
    Matrix centered = x.rowwise() - mean.row(0);
    const Matrix var = centered.array().square().colwise().mean();
    invstd_ = (var.array() + eps_).rsqrt();
    xhat_ = centered.array().rowwise() * invstd_.row(0).array();
    running_mean_ = momentum_ * running_mean_ + (1.0 - momentum_) * mean;
    running_var_ = momentum_ * running_var_ + (1.0 - momentum_) * var;
    Matrix y = xhat_.array().rowwise() * gamma_.row(0).array();
    y.rowwise() += beta_.row(0);
    return y;
  }
  invstd_ = (running_var_.array() + eps_).rsqrt();
  Matrix xhat = (x.rowwise() - running_mean_.row(0)).array().rowwise() * invstd_.row(0).array();
  xhat_ = xhat;
  Matrix y = xhat.array().rowwise() * gamma_.row(0).array();
  y.rowwise() += beta_.row(0);
  return y;
}

Matrix BatchNorm::backward_rows(const Matrix& g) {
  dgamma_ = g.cwiseProduct(xhat_).colwise().sum();
  dbeta_ = g.colwise().sum();
  const Matrix dxhat = g.array().rowwise() * gamma_.row(0).array();
  if (!was_training_) {
    return dxhat.array().rowwise() * invstd_.row(0).array();
  }
  const double n = static_cast<double>(g.rows());
  const Matrix sum_dxhat = dxhat.colwise().sum();
  const Matrix sum_dxhat_xhat = dxhat.cwiseProduct(xhat_).colwise().sum();
  Matrix dx = n * dxhat;
  dx.rowwise() -= sum_dxhat.row(0);
  dx -= (xhat_.array().rowwise() * sum_dxhat_xhat.row(0).array()).matrix();
  dx = dx.array().rowwise() * (invstd_.row(0).array() / n);
  return dx;
}

Batch BatchNorm::forward(const Batch& x, bool training) {
  was_training_ = training;
  was_seq_ = x.is_seq;
  if (!x.is_seq) return Batch::matrix(forward_rows(x.mat, training));
  // Channel-wise stats over batch x time: stack steps vertically.
  seq_rows_ = x.steps[0].rows();
  Matrix stacked(seq_rows_ * static_cast<Eigen::Index>(x.steps.size()), x.steps[0].cols());
  for (std::size_t t = 0; t < x.steps.size(); ++t)
    stacked.middleRows(static_cast<Eigen::Index>(t) * seq_rows_, seq_rows_) = x.steps[t];
  const Matrix y = forward_rows(stacked, training);
  std::vector<Matrix> steps(x.steps.size());
  for (std::size_t t = 0; t < x.steps.size(); ++t)
    steps[t] = y.middleRows(static_cast<Eigen::Index>(t) * seq_rows_, seq_rows_);
  return Batch::sequence(std::move(steps));
}

Batch BatchNorm::backward(const Batch& grad) {
  if (!was_seq_) return Batch::matrix(backward_rows(grad.mat));
  Matrix stacked(seq_rows_ * static_cast<Eigen::Index>(grad.steps.size()), grad.steps[0].cols());
  for (std::size_t t = 0; t < grad.steps.size(); ++t)
    stacked.middleRows(static_cast<Eigen::Index>(t) * seq_rows_, seq_rows_) = grad.steps[t];
  const Matrix dx = backward_rows(stacked);
  std::vector<Matrix> steps(grad.steps.size());
  for (std::size_t t = 0; t < grad.steps.size(); ++t)
    steps[t] = dx.middleRows(static_cast<Eigen::Index>(t) * seq_rows_, seq_rows_);
  return Batch::sequence(std::move(steps));
}

// -------------------------------------------------------------- Dropout

Dropout::Dropout(double rate, std::mt19937_64& rng) : rate_(rate), rng_(&rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0,1)");
}

Batch Dropout::forward(const Batch& x, bool training) {
  was_training_ = training && rate_ > 0.0;
  if (!was_training_) return x;
  const double keep = 1.0 - rate_;
  std::bernoulli_distribution dist(keep);
  auto make_mask = [&](Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) m(i, j) = dist(*rng_) ? 1.0 / keep : 0.0;
    return m;
  };
  Batch y = x;
  if (x.is_seq) {
    mask_ = Batch::sequence({});
    mask_.steps.reserve(x.steps.size());
    for (std::size_t t = 0; t < x.steps.size(); ++t) {
      mask_.steps.push_back(make_mask(x.steps[t].rows(), x.steps[t].cols()));
      y.steps[t] = y.steps[t].cwiseProduct(mask_.steps[t]);
    }
  } else {
    mask_ = Batch::matrix(make_mask(x.mat.rows(), x.mat.cols()));
    y.mat = y.mat.cwiseProduct(mask_.mat);
  }
  return y;
}

Batch Dropout::backward(const Batch& grad) {
  if (!was_training_) return grad;
  Batch g = grad;
  if (g.is_seq) {
    for (std::size_t t = 0; t < g.steps.size(); ++t)
      g.steps[t] = g.steps[t].cwiseProduct(mask_.steps[t]);
  } else {
    g.mat = g.mat.cwiseProduct(mask_.mat);
  }
  return g;
}

// ----------------------------------------------------------------- Lstm

Lstm::Lstm(int input, int hidden, std::mt19937_64& rng) : input_(input), hidden_(hidden) {
  W_ = glorot_uniform(input, 4 * hidden, input, hidden, rng);
  R_ = glorot_uniform(hidden, 4 * hidden, hidden, hidden, rng);
  b_ = Matrix::Zero(1, 4 * hidden);
  b_.block(0, hidden, 1, hidden).setOnes();  // forget-gate bias 1
}

Batch Lstm::forward(const Batch& x, bool) {
  if (!x.is_seq) throw std::invalid_argument("lstm expects a sequence batch");
  const auto M = x.steps.size();
  const Eigen::Index B = x.steps[0].rows();
  const int H = hidden_;
  xs_ = x.steps;
  is_.assign(M, {});
  fs_.assign(M, {});
  gs_.assign(M, {});
  os_.assign(M, {});
  cs_.assign(M, {});
  tanh_cs_.assign(M, {});
  hs_.assign(M, {});

  Matrix h = Matrix::Zero(B, H), c = Matrix::Zero(B, H);
  for (std::size_t t = 0; t < M; ++t) {
    if (x.steps[t].cols() != W_.rows()) throw std::invalid_argument("lstm input width mismatch");
    Matrix z = x.steps[t] * W_ + h * R_;
    z.rowwise() += b_.row(0);
    is_[t] = (1.0 / (1.0 + (-z.leftCols(H)).array().exp())).matrix();
    fs_[t] = (1.0 / (1.0 + (-z.middleCols(H, H)).array().exp())).matrix();
    gs_[t] = z.middleCols(2 * H, H).array().tanh().matrix();
    os_[t] = (1.0 / (1.0 + (-z.rightCols(H)).array().exp())).matrix();
    c = fs_[t].cwiseProduct(c) + is_[t].cwiseProduct(gs_[t]);
    cs_[t] = c;
    tanh_cs_[t] = c.array().tanh().matrix();
    h = os_[t].cwiseProduct(tanh_cs_[t]);
    hs_[t] = h;
  }
  return Batch::matrix(h);
}

Batch Lstm::backward(const Batch& grad) {
  const auto M = xs_.size();
  const Eigen::Index B = xs_[0].rows();
  const int H = hidden_;
  dW_ = Matrix::Zero(W_.rows(), W_.cols());
  dR_ = Matrix::Zero(R_.rows(), R_.cols());
  db_ = Matrix::Zero(1, 4 * H);

  std::vector<Matrix> dxs(M);
  Matrix dh = grad.mat;
  Matrix dc = Matrix::Zero(B, H);
  const Matrix zero = Matrix::Zero(B, H);
  for (std::size_t ti = M; ti-- > 0;) {
    const Matrix& c_prev = (ti == 0) ? zero : cs_[ti - 1];
    const Matrix& h_prev = (ti == 0) ? zero : hs_[ti - 1];

    const Matrix do_ = dh.cwiseProduct(tanh_cs_[ti]);
    dc += dh.cwiseProduct(os_[ti])
              .cwiseProduct((1.0 - tanh_cs_[ti].array().square()).matrix());
    const Matrix di = dc.cwiseProduct(gs_[ti]);
    const Matrix df = dc.cwiseProduct(c_prev);
    const Matrix dg = dc.cwiseProduct(is_[ti]);

    Matrix dz(B, 4 * H);
    dz.leftCols(H) = di.cwiseProduct(is_[ti]).cwiseProduct((1.0 - is_[ti].array()).matrix());
    dz.middleCols(H, H) =
        df.cwiseProduct(fs_[ti]).cwiseProduct((1.0 - fs_[ti].array()).matrix());
    dz.middleCols(2 * H, H) = dg.cwiseProduct((1.0 - gs_[ti].array().square()).matrix());
    dz.rightCols(H) = do_.cwiseProduct(os_[ti]).cwiseProduct((1.0 - os_[ti].array()).matrix());

    dW_ += xs_[ti].transpose() * dz;
    dR_ += h_prev.transpose() * dz;
    db_ += dz.colwise().sum();

    dxs[ti] = dz * W_.transpose();
    dh = dz * R_.transpose();
    dc = dc.cwiseProduct(fs_[ti]);
  }
  return Batch::sequence(std::move(dxs));
}

// --------------------------------------------------------------- Conv1d

Conv1d::Conv1d(int in_channels, int out_channels, int kernel, std::mt19937_64& rng)
    : in_(in_channels), out_(out_channels), kernel_(kernel) {
  if (kernel < 1) throw std::invalid_argument("conv kernel must be >= 1");
  W_ = glorot_uniform(kernel * in_channels, out_channels, kernel * in_channels,
                      kernel * out_channels, rng);
  b_ = Matrix::Zero(1, out_channels);
}

Batch Conv1d::forward(const Batch& x, bool) {
  if (!x.is_seq) throw std::invalid_argument("conv1d expects a sequence batch");
  xs_ = x.steps;
  const int M = static_cast<int>(x.steps.size());
  const Eigen::Index B = x.steps[0].rows();
  const int left = (kernel_ - 1) / 2;  // "same" padding, kernel centered
  std::vector<Matrix> ys(static_cast<std::size_t>(M));
  for (int t = 0; t < M; ++t) {
    Matrix y = Matrix::Zero(B, out_);
    for (int d = 0; d < kernel_; ++d) {
      const int src = t + d - left;
      if (src < 0 || src >= M) continue;
      y.noalias() += x.steps[static_cast<std::size_t>(src)] * W_.middleRows(d * in_, in_);
    }
    y.rowwise() += b_.row(0);
    ys[static_cast<std::size_t>(t)] = std::move(y);
  }
  return Batch::sequence(std::move(ys));
}

Batch Conv1d::backward(const Batch& grad) {
  const int M = static_cast<int>(xs_.size());
  const Eigen::Index B = xs_[0].rows();
  const int left = (kernel_ - 1) / 2;
  dW_ = Matrix::Zero(W_.rows(), W_.cols());
  db_ = Matrix::Zero(1, out_);
  std::vector<Matrix> dxs(static_cast<std::size_t>(M), Matrix::Zero(B, in_));
  for (int t = 0; t < M; ++t) {
    const Matrix& g = grad.steps[static_cast<std::size_t>(t)];
    db_ += g.colwise().sum();
    for (int d = 0; d < kernel_; ++d) {
      const int src = t + d - left;
      if (src < 0 || src >= M) continue;
      dW_.middleRows(d * in_, in_).noalias() +=
          xs_[static_cast<std::size_t>(src)].transpose() * g;
      dxs[static_cast<std::size_t>(src)].noalias() += g * W_.middleRows(d * in_, in_).transpose();
    }
  }
  return Batch::sequence(std::move(dxs));
}

// ------------------------------------------------------------ MaxPool1d

Batch MaxPool1d::forward(const Batch& x, bool) {
  if (!x.is_seq) throw std::invalid_argument("maxpool1d expects a sequence batch");
  in_steps_ = static_cast<Eigen::Index>(x.steps.size());
  rows_ = x.steps[0].rows();
  channels_ = x.steps[0].cols();
  identity_ = in_steps_ < pool_;
  if (identity_) return x;

  const Eigen::Index out_steps = in_steps_ / pool_;
  std::vector<Matrix> ys(static_cast<std::size_t>(out_steps));
  argmax_.assign(static_cast<std::size_t>(out_steps), Eigen::MatrixXi(rows_, channels_));
  for (Eigen::Index o = 0; o < out_steps; ++o) {
    Matrix y = x.steps[static_cast<std::size_t>(o * pool_)];
    auto& arg = argmax_[static_cast<std::size_t>(o)];
    arg.setConstant(static_cast<int>(o * pool_));
    for (int d = 1; d < pool_; ++d) {
      const Matrix& s = x.steps[static_cast<std::size_t>(o * pool_ + d)];
      for (Eigen::Index r = 0; r < rows_; ++r)
        for (Eigen::Index c = 0; c < channels_; ++c)
          if (s(r, c) > y(r, c)) {  // strict: first occurrence wins ties
            y(r, c) = s(r, c);
            arg(r, c) = static_cast<int>(o * pool_ + d);
          }
    }
    ys[static_cast<std::size_t>(o)] = std::move(y);
  }
  return Batch::sequence(std::move(ys));
}

Batch MaxPool1d::backward(const Batch& grad) {
  if (identity_) return grad;
  std::vector<Matrix> dxs(static_cast<std::size_t>(in_steps_), Matrix::Zero(rows_, channels_));
  for (std::size_t o = 0; o < grad.steps.size(); ++o) {
    const Matrix& g = grad.steps[o];
    const auto& arg = argmax_[o];
    for (Eigen::Index r = 0; r < rows_; ++r)
      for (Eigen::Index c = 0; c < channels_; ++c)
        dxs[static_cast<std::size_t>(arg(r, c))](r, c) += g(r, c);
  }
  return Batch::sequence(std::move(dxs));
}

// -------------------------------------------------------------- Flatten

Batch Flatten::forward(const Batch& x, bool) {
  if (!x.is_seq) return x;
  steps_ = static_cast<Eigen::Index>(x.steps.size());
  channels_ = x.steps[0].cols();
  Matrix y(x.steps[0].rows(), steps_ * channels_);
  for (Eigen::Index t = 0; t < steps_; ++t)
    y.middleCols(t * channels_, channels_) = x.steps[static_cast<std::size_t>(t)];
  return Batch::matrix(std::move(y));
}

Batch Flatten::backward(const Batch& grad) {
  if (steps_ == 0) return grad;
  std::vector<Matrix> dxs(static_cast<std::size_t>(steps_));
  for (Eigen::Index t = 0; t < steps_; ++t)
    dxs[static_cast<std::size_t>(t)] = grad.mat.middleCols(t * channels_, channels_);
  return Batch::sequence(std::move(dxs));
}

// ----------------------------------------------------------------- loss

double cross_entropy(const Matrix& probs, const Matrix& targets) {
  double loss = 0.0;
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    Eigen::Index t;
    targets.row(r).maxCoeff(&t);
    loss -= std::log(probs(r, t) + 1e-12);
  }
  return loss / static_cast<double>(probs.rows());
}

Matrix cross_entropy_softmax_grad(const Matrix& probs, const Matrix& targets) {
  return (probs - targets) / static_cast<double>(probs.rows());
}

}  // namespace nap::nn
