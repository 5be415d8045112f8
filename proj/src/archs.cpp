#include "nap/archs.hpp"

#include <stdexcept>

#include "json.hpp"

namespace nap {

using nn::Network;

const char* arch_name(ArchKind k) {
  switch (k) {
    case ArchKind::Mlp: return "mlp";
    case ArchKind::Lstm: return "lstm";
    case ArchKind::Cnn: return "cnn";
  }
  return "?";
}

ArchKind arch_from_name(const std::string& name) {
  if (name == "mlp") return ArchKind::Mlp;
  if (name == "lstm") return ArchKind::Lstm;
  if (name == "cnn") return ArchKind::Cnn;
  throw std::invalid_argument("unknown architecture '" + name + "'");
}

nn::OptKind NetworkSpec::optimizer() const {
  return kind == ArchKind::Lstm ? nn::OptKind::Nadam : nn::OptKind::Adam;
}

double NetworkSpec::learning_rate() const { return kind == ArchKind::Lstm ? 0.002 : 0.001; }

NetworkSpec make_spec(ArchKind kind, int M, int U, int V) {
  NetworkSpec spec;
  spec.kind = kind;
  spec.M = M;
  spec.U = U;
  spec.V = V;
  return spec;
}

Network instantiate(const NetworkSpec& spec, std::uint64_t seed) {
  Network net(seed);
  auto& rng = net.rng();
  switch (spec.kind) {
    case ArchKind::Mlp: {
      net.add<nn::Flatten>();
      int width = spec.M * spec.U;
      for (int hidden : {300, 200, 100, 50}) {
        net.add<nn::Dense>(width, hidden, rng);
        net.add<nn::BatchNorm>(hidden);
        net.add<nn::Relu>();
        net.add<nn::Dropout>(spec.mlp_dropout, rng);
        width = hidden;
      }
      net.add<nn::Dense>(width, spec.V, rng);
      net.add<nn::Softmax>();
      break;
    }
    case ArchKind::Lstm: {
      net.add<nn::Lstm>(spec.U, spec.lstm_hidden, rng);
      net.add<nn::BatchNorm>(spec.lstm_hidden);
      net.add<nn::Linear>();
      net.add<nn::Dropout>(spec.lstm_dropout, rng);
      net.add<nn::Dense>(spec.lstm_hidden, spec.V, rng);
      net.add<nn::Softmax>();
      break;
    }
    case ArchKind::Cnn: {
      int channels = spec.U;
      int steps = spec.M;
      for (int b = 0; b < spec.cnn_blocks; ++b) {
        net.add<nn::Conv1d>(channels, spec.cnn_filters, spec.cnn_kernel, rng);
        net.add<nn::BatchNorm>(spec.cnn_filters);
        net.add<nn::Relu>();
        net.add<nn::MaxPool1d>(spec.cnn_pool);
        channels = spec.cnn_filters;
        steps = nn::MaxPool1d::output_steps(steps, spec.cnn_pool);
      }
      net.add<nn::Flatten>();
      net.add<nn::Dense>(steps * channels, spec.cnn_dense, rng);
      net.add<nn::Relu>();
      net.add<nn::Dense>(spec.cnn_dense, spec.V, rng);
      net.add<nn::Softmax>();
      break;
    }
  }
  return net;
}

std::size_t parameter_count(nn::Network& net) {
  std::size_t n = 0;
  for (nn::Matrix* p : net.params()) n += static_cast<std::size_t>(p->size());
  return n;
}

std::string NetworkSpec::to_json() const {
  nlohmann::json j;
  j["arch"] = arch_name(kind);
  j["M"] = M;
  j["U"] = U;
  j["V"] = V;
  j["lstm_hidden"] = lstm_hidden;
  j["cnn_filters"] = cnn_filters;
  j["cnn_kernel"] = cnn_kernel;
  j["cnn_pool"] = cnn_pool;
  j["cnn_blocks"] = cnn_blocks;
  j["cnn_dense"] = cnn_dense;
  j["mlp_dropout"] = mlp_dropout;
  j["lstm_dropout"] = lstm_dropout;
  return j.dump(2);
}

NetworkSpec NetworkSpec::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  NetworkSpec s;
  s.kind = arch_from_name(j.at("arch").get<std::string>());
  s.M = j.at("M").get<int>();
  s.U = j.at("U").get<int>();
  s.V = j.at("V").get<int>();
  s.lstm_hidden = j.value("lstm_hidden", 100);
  s.cnn_filters = j.value("cnn_filters", 64);
  s.cnn_kernel = j.value("cnn_kernel", 3);
  s.cnn_pool = j.value("cnn_pool", 2);
  s.cnn_blocks = j.value("cnn_blocks", 5);
  s.cnn_dense = j.value("cnn_dense", 100);
  s.mlp_dropout = j.value("mlp_dropout", 0.5);
  s.lstm_dropout = j.value("lstm_dropout", 0.2);
  return s;
}

}  // namespace nap
