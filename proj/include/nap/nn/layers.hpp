#pragma once

#include <Eigen/Dense>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace nap::nn {

using Matrix = Eigen::MatrixXd;

// A mini-batch flowing through the network: either a plain batch x F
// matrix or a sequence of M step matrices, each batch x C.
struct Batch {
  Matrix mat;
  std::vector<Matrix> steps;
  bool is_seq = false;

  static Batch matrix(Matrix m) {
    Batch b;
    b.mat = std::move(m);
    return b;
  }
  static Batch sequence(std::vector<Matrix> s) {
    Batch b;
    b.steps = std::move(s);
    b.is_seq = true;
    return b;
  }
  Eigen::Index rows() const { return is_seq ? steps.at(0).rows() : mat.rows(); }
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Batch forward(const Batch& x, bool training) = 0;
  virtual Batch backward(const Batch& grad) = 0;
  virtual std::vector<Matrix*> params() { return {}; }
  virtual std::vector<Matrix*> grads() { return {}; }
  // Everything needed to restore the layer, including non-trainable
  // buffers (batchnorm running stats).
  virtual std::vector<Matrix*> state() { return params(); }
  virtual const char* name() const = 0;
};

class Dense : public Layer {
 public:
  Dense(int in, int out, std::mt19937_64& rng);
  Batch forward(const Batch& x, bool training) override;
  Batch backward(const Batch& grad) override;
  std::vector<Matrix*> params() override { return {&W_, &b_}; }
  std::vector<Matrix*> grads() override { return {&dW_, &db_}; }
  const char* name() const override { return "dense"; }

  Matrix W_, b_;  // in x out, 1 x out

 private:
  Matrix dW_, db_, x_;
};

class Relu : public Layer {
 public:
  Batch forward(const Batch& x, bool training) override;
  Batch backward(const Batch& grad) override;
  const char* name() const override { return "relu"; }

 private:
  Batch input_;
};

class Linear : public Layer {
 public:
  Batch forward(const Batch& x, bool training) override { return x; }
  Batch backward(const Batch& grad) override { return grad; }
  const char* name() const override { return "linear"; }
};

// Row-wise softmax with max subtraction. Backward applies the full
// Jacobian-vector product.
class Softmax : public Layer {
 public:
  Batch forward(const Batch& x, bool training) override;
  Batch backward(const Batch& grad) override;
  const char* name() const override { return "softmax"; }

 private:
  Matrix probs_;
};

class BatchNorm : public Layer {
 public:
  explicit BatchNorm(int features, double eps = 1e-3, double momentum = 0.99);
  Batch forward(const Batch& x, bool training) override;
  Batch backward(const Batch& grad) override;
  std::vector<Matrix*> params() override { return {&gamma_, &beta_}; }
  std::vector<Matrix*> grads() override { return {&dgamma_, &dbeta_}; }
  std::vector<Matrix*> state() override { return {&gamma_, &beta_, &running_mean_, &running_var_}; }
  const char* name() const override { return "batchnorm"; }

  Matrix gamma_, beta_, running_mean_, running_var_;

 private:
  Matrix forward_rows(const Matrix& x, bool training);
  Matrix backward_rows(const Matrix& g);

  double eps_, momentum_;
  bool was_seq_ = false, was_training_ = false;
  Eigen::Index seq_rows_ = 0;
  Matrix xhat_, invstd_;
  Matrix dgamma_, dbeta_;
};

class Dropout : public Layer {
 public:
  Dropout(double rate, std::mt19937_64& rng);
  Batch forward(const Batch& x, bool training) override;
  Batch backward(const Batch& grad) override;
  const char* name() const override { return "dropout"; }

  double rate() const { return rate_; }

 private:
  double rate_;
  std::mt19937_64* rng_;
  bool was_training_ = false;
  Batch mask_;
};

// Sequence-to-vector LSTM; emits the last hidden state. Gate blocks in
// W/R/b are ordered [input, forget, candidate, output].
class Lstm : public Layer {
 public:
  Lstm(int input, int hidden, std::mt19937_64& rng);
  Batch forward(const Batch& x, bool training) override;
  Batch backward(const Batch& grad) override;
  std::vector<Matrix*> params() override { return {&W_, &R_, &b_}; }
  std::vector<Matrix*> grads() override { return {&dW_, &dR_, &db_}; }
  const char* name() const override { return "lstm"; }

  Matrix W_, R_, b_;  // input x 4H, H x 4H, 1 x 4H

 private:
  int input_, hidden_;
  Matrix dW_, dR_, db_;
  std::vector<Matrix> xs_, is_, fs_, gs_, os_, cs_, tanh_cs_, hs_;
};

// 1-D convolution over the time axis, stride 1, "same" zero padding.
class Conv1d : public Layer {
 public:
  Conv1d(int in_channels, int out_channels, int kernel, std::mt19937_64& rng);
  Batch forward(const Batch& x, bool training) override;
  Batch backward(const Batch& grad) override;
  std::vector<Matrix*> params() override { return {&W_, &b_}; }
  std::vector<Matrix*> grads() override { return {&dW_, &db_}; }
  const char* name() const override { return "conv1d"; }

  Matrix W_, b_;  // (kernel*in) x out, 1 x out

 private:
  int in_, out_, kernel_;
  Matrix dW_, db_;
  std::vector<Matrix> xs_;
};

// Non-overlapping max pooling over time; gradient goes to the first
// argmax on ties. Acts as identity when fewer than `pool` steps remain.
class MaxPool1d : public Layer {
 public:
  explicit MaxPool1d(int pool) : pool_(pool) {}
  Batch forward(const Batch& x, bool training) override;
  Batch backward(const Batch& grad) override;
  const char* name() const override { return "maxpool1d"; }

  static int output_steps(int steps, int pool) { return steps < pool ? steps : steps / pool; }

 private:
  int pool_;
  bool identity_ = false;
  Eigen::Index in_steps_ = 0, channels_ = 0, rows_ = 0;
  std::vector<Eigen::MatrixXi> argmax_;  // per output step: batch x channels
};

// Sequence -> matrix, time-major then feature.
class Flatten : public Layer {
 public:
  Batch forward(const Batch& x, bool training) override;
  Batch backward(const Batch& grad) override;
  const char* name() const override { return "flatten"; }

 private:
  Eigen::Index steps_ = 0, channels_ = 0;
};

Matrix glorot_uniform(int rows, int cols, int fan_in, int fan_out, std::mt19937_64& rng);

// Mean negative log-likelihood of the target class, with a 1e-12 floor.
double cross_entropy(const Matrix& probs, const Matrix& targets);

// Gradient of cross-entropy with respect to softmax *logits*: (p - y)/batch.
Matrix cross_entropy_softmax_grad(const Matrix& probs, const Matrix& targets);

}  // namespace nap::nn
