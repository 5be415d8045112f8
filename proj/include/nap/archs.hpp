#pragma once

#include <cstdint>
#include <string>

#include "nap/nn/network.hpp"
#include "nap/nn/optimizer.hpp"

namespace nap {

enum class ArchKind { Mlp, Lstm, Cnn };

const char* arch_name(ArchKind k);
ArchKind arch_from_name(const std::string& name);

// Architecture description; instantiation with a seed yields the
// initialized layer pipeline.
struct NetworkSpec {
  ArchKind kind = ArchKind::Mlp;
  int M = 0;  // time steps
  int U = 0;  // feature width per event
  int V = 0;  // activity classes
  int lstm_hidden = 100;
  int cnn_filters = 64;
  int cnn_kernel = 3;
  int cnn_pool = 2;
  int cnn_blocks = 5;
  int cnn_dense = 100;
  double mlp_dropout = 0.5;
  double lstm_dropout = 0.2;

  std::string to_json() const;
  static NetworkSpec from_json(const std::string& text);

  nn::OptKind optimizer() const;
  double learning_rate() const;
};

NetworkSpec make_spec(ArchKind kind, int M, int U, int V);

nn::Network instantiate(const NetworkSpec& spec, std::uint64_t seed);

// Trainable parameter count of the instantiated network.
std::size_t parameter_count(nn::Network& net);

}  // namespace nap
