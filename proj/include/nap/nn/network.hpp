#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nap/nn/layers.hpp"

namespace nap::nn {

// An ordered layer pipeline ending in a Softmax. The RNG drives
// initialization and dropout masks and is heap-held so the network can
// be moved without invalidating layer references to it.
class Network {
 public:
  explicit Network(std::uint64_t seed) : rng_(std::make_unique<std::mt19937_64>(seed)) {}
  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  std::mt19937_64& rng() { return *rng_; }

  template <typename L, typename... Args>
  L& add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  // Runs the full pipeline; the final layer is expected to produce
  // class probabilities.
  Matrix forward(const Batch& input, bool training);

  // Backpropagates a gradient with respect to the final softmax's
  // logits, i.e. (p - y)/batch from the cross-entropy loss.
  void backward_from_logits(const Matrix& dlogits);

  // Backpropagates a gradient with respect to the probabilities through
  // the softmax Jacobian and every layer below.
  void backward_from_probs(const Matrix& dprobs);

  std::vector<Matrix*> params();
  std::vector<Matrix*> grads();
  std::vector<Matrix*> state();

  std::vector<Matrix> snapshot();
  void restore(const std::vector<Matrix>& snap);

  void save_checkpoint(const std::string& path);
  void load_checkpoint(const std::string& path);

  const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  std::unique_ptr<std::mt19937_64> rng_;
};

}  // namespace nap::nn
