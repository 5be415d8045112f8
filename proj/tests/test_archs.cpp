#include "doctest.h"

#include "nap/archs.hpp"
#include "testutil.hpp"

using namespace nap;
using nn::Matrix;

namespace {

std::vector<std::string> layer_names(nn::Network& net) {
  std::vector<std::string> names;
  for (const auto& layer : net.layers()) names.push_back(layer->name());
  return names;
}

nn::Batch random_seq(int rows, int steps, int features, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<Matrix> xs(steps);
  for (auto& m : xs) {
    m = Matrix(rows, features);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  }
  return nn::Batch::sequence(std::move(xs));
}

}  // namespace

TEST_CASE("arch names round-trip") {
  for (ArchKind k : {ArchKind::Mlp, ArchKind::Lstm, ArchKind::Cnn})
    CHECK(arch_from_name(arch_name(k)) == k);
  CHECK_THROWS(arch_from_name("transformer"));
}

TEST_CASE("mlp structure and parameter count") {
  const NetworkSpec spec = make_spec(ArchKind::Mlp, 4, 3, 5);
  nn::Network net = instantiate(spec, 1);
  const auto names = layer_names(net);
  const std::vector<std::string> expect = {
      "flatten",
      "dense", "batchnorm", "relu", "dropout",
      "dense", "batchnorm", "relu", "dropout",
      "dense", "batchnorm", "relu", "dropout",
      "dense", "batchnorm", "relu", "dropout",
      "dense", "softmax"};
  CHECK(names == expect);
  // dense chains 12->300->200->100->50->5 plus batchnorm gamma/beta
  const std::size_t dense = 12 * 300 + 300 + 300 * 200 + 200 + 200 * 100 + 100 +
                            100 * 50 + 50 + 50 * 5 + 5;
  const std::size_t bn = 2 * (300 + 200 + 100 + 50);
  CHECK(parameter_count(net) == dense + bn);

  const Matrix out = net.forward(random_seq(6, 4, 3, 7), false);
  CHECK(out.rows() == 6);
  CHECK(out.cols() == 5);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    CHECK(out.row(i).sum() == doctest::Approx(1.0));
}

TEST_CASE("lstm structure and parameter count") {
  const NetworkSpec spec = make_spec(ArchKind::Lstm, 6, 9, 4);
  nn::Network net = instantiate(spec, 2);
  CHECK(layer_names(net) == std::vector<std::string>{"lstm", "batchnorm", "linear", "dropout",
                                                     "dense", "softmax"});
  // W: 9x400, R: 100x400, b: 400, bn: 2*100, dense: 100*4+4
  CHECK(parameter_count(net) == 9 * 400 + 100 * 400 + 400 + 200 + 404);

  const Matrix out = net.forward(random_seq(3, 6, 9, 8), false);
  CHECK(out.rows() == 3);
  CHECK(out.cols() == 4);
}

TEST_CASE("cnn structure shrinks time until pooling saturates") {
  const NetworkSpec spec = make_spec(ArchKind::Cnn, 9, 5, 4);
  nn::Network net = instantiate(spec, 3);
  const auto names = layer_names(net);
  REQUIRE(names.size() == 5 * 4 + 5);
  for (int b = 0; b < 5; ++b) {
    CHECK(names[b * 4 + 0] == "conv1d");
    CHECK(names[b * 4 + 1] == "batchnorm");
    CHECK(names[b * 4 + 2] == "relu");
    CHECK(names[b * 4 + 3] == "maxpool1d");
  }
  CHECK(names[20] == "flatten");
  CHECK(names[21] == "dense");
  CHECK(names[22] == "relu");
  CHECK(names[23] == "dense");
  CHECK(names[24] == "softmax");

  // steps: 9 -> 4 -> 2 -> 1 -> 1 -> 1, so the head sees 64 features
  const std::size_t conv = (3 * 5) * 64 + 64 + 4 * ((3 * 64) * 64 + 64);
  const std::size_t bn = 5 * 2 * 64;
  const std::size_t head = 64 * 100 + 100 + 100 * 4 + 4;
  CHECK(parameter_count(net) == conv + bn + head);

  const Matrix out = net.forward(random_seq(4, 9, 5, 9), false);
  CHECK(out.rows() == 4);
  CHECK(out.cols() == 4);
}

TEST_CASE("optimizer selection per architecture") {
  CHECK(make_spec(ArchKind::Mlp, 2, 2, 2).optimizer() == nn::OptKind::Adam);
  CHECK(make_spec(ArchKind::Cnn, 2, 2, 2).optimizer() == nn::OptKind::Adam);
  CHECK(make_spec(ArchKind::Lstm, 2, 2, 2).optimizer() == nn::OptKind::Nadam);
  CHECK(make_spec(ArchKind::Mlp, 2, 2, 2).learning_rate() == 0.001);
  CHECK(make_spec(ArchKind::Cnn, 2, 2, 2).learning_rate() == 0.001);
  CHECK(make_spec(ArchKind::Lstm, 2, 2, 2).learning_rate() == 0.002);
}

TEST_CASE("spec json round-trip") {
  NetworkSpec spec = make_spec(ArchKind::Cnn, 7, 11, 3);
  spec.cnn_filters = 16;
  spec.lstm_dropout = 0.3;
  const NetworkSpec back = NetworkSpec::from_json(spec.to_json());
  CHECK(back.kind == spec.kind);
  CHECK(back.M == 7);
  CHECK(back.U == 11);
  CHECK(back.V == 3);
  CHECK(back.cnn_filters == 16);
  CHECK(back.lstm_dropout == 0.3);
}

TEST_CASE("instantiation is deterministic per seed") {
  const NetworkSpec spec = make_spec(ArchKind::Mlp, 3, 4, 3);
  nn::Network a = instantiate(spec, 5);
  nn::Network b = instantiate(spec, 5);
  nn::Network c = instantiate(spec, 6);
  const auto pa = a.params(), pb = b.params(), pc = c.params();
  bool same = true, differs = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    same = same && *pa[i] == *pb[i];
    differs = differs || *pa[i] != *pc[i];
  }
  CHECK(same);
  CHECK(differs);
}
