#include "nap/nn/network.hpp"

#include <fstream>
#include <stdexcept>

namespace nap::nn {

Matrix Network::forward(const Batch& input, bool training) {
  Batch x = input;
  for (auto& layer : layers_) x = layer->forward(x, training);
  if (x.is_seq) throw std::runtime_error("network output is not a matrix");
  return x.mat;
}

void Network::backward_from_logits(const Matrix& dlogits) {
  if (layers_.empty()) return;
  Batch g = Batch::matrix(dlogits);
  // Skip the final softmax: the incoming gradient is already with
  // respect to its input.
  for (std::size_t i = layers_.size() - 1; i-- > 0;) g = layers_[i]->backward(g);
}

void Network::backward_from_probs(const Matrix& dprobs) {
  Batch g = Batch::matrix(dprobs);
  for (std::size_t i = layers_.size(); i-- > 0;) g = layers_[i]->backward(g);
}

std::vector<Matrix*> Network::params() {
  std::vector<Matrix*> out;
  for (auto& layer : layers_)
    for (Matrix* p : layer->params()) out.push_back(p);
  return out;
}

std::vector<Matrix*> Network::grads() {
  std::vector<Matrix*> out;
  for (auto& layer : layers_)
    for (Matrix* g : layer->grads()) out.push_back(g);
  return out;
}

std::vector<Matrix*> Network::state() {
  std::vector<Matrix*> out;
  for (auto& layer : layers_)
    for (Matrix* s : layer->state()) out.push_back(s);
  return out;
}

std::vector<Matrix> Network::snapshot() {
  std::vector<Matrix> snap;
  for (Matrix* s : state()) snap.push_back(*s);
  return snap;
}

void Network::restore(const std::vector<Matrix>& snap) {
  auto st = state();
  if (st.size() != snap.size()) throw std::runtime_error("snapshot shape mismatch");
  for (std::size_t i = 0; i < st.size(); ++i) *st[i] = snap[i];
}

void Network::save_checkpoint(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  const auto st = state();
  const std::int64_t count = static_cast<std::int64_t>(st.size());
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  for (Matrix* m : st) {
    const std::int64_t r = m->rows(), c = m->cols();
    out.write(reinterpret_cast<const char*>(&r), sizeof(r));
    out.write(reinterpret_cast<const char*>(&c), sizeof(c));
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) {
        const double v = (*m)(i, j);
        out.write(reinterpret_cast<const char*>(&v), sizeof(v));
      }
  }
}

void Network::load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint '" + path + "'");
  auto st = state();
  std::int64_t count;
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  if (count != static_cast<std::int64_t>(st.size()))
    throw std::runtime_error("checkpoint parameter count mismatch");
  for (Matrix* m : st) {
    std::int64_t r, c;
    in.read(reinterpret_cast<char*>(&r), sizeof(r));
    in.read(reinterpret_cast<char*>(&c), sizeof(c));
    if (r != m->rows() || c != m->cols())
      throw std::runtime_error("checkpoint shape mismatch");
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j) {
        double v;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        (*m)(i, j) = v;
      }
  }
  if (!in) throw std::runtime_error("truncated checkpoint '" + path + "'");
}

}  // namespace nap::nn
