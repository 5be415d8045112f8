#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "nap/encode.hpp"
#include "nap/eventlog.hpp"

namespace nap {

// Row-major N x M x U tensor of doubles.
struct Tensor3 {
  std::size_t n = 0, m = 0, u = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(std::size_t n_, std::size_t m_, std::size_t u_)
      : n(n_), m(m_), u(u_), data(n_ * m_ * u_, 0.0) {}

  double& at(std::size_t i, std::size_t t, std::size_t j) { return data[(i * m + t) * u + j]; }
  double at(std::size_t i, std::size_t t, std::size_t j) const { return data[(i * m + t) * u + j]; }

  // One prefix's M x U step matrix.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
  slice(std::size_t i) const {
    return {data.data() + i * m * u, static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(u)};
  }
};

struct PrefixRef {
  std::size_t trace_index = 0;
  int length = 0;        // k, number of events in the prefix
  std::string label;     // activity of event k+1
};

struct PrefixDataset {
  Tensor3 X;             // N x M x U
  Eigen::MatrixXd Y;     // N x V one-hot labels
  std::vector<int> lengths;
  std::vector<std::pair<std::string, int>> provenance;  // (case id, k)
  std::vector<std::string> classes;
};

struct FoldPlan {
  int k = 0;
  std::uint64_t seed = 0;
  std::unordered_map<std::string, int> fold_of;  // case id -> fold
};

std::vector<PrefixRef> build_prefixes(const EventLog& log);

// Raw inter-event gaps in seconds; first event gets 0.
std::vector<double> compute_time_deltas(const Trace& trace);

PrefixDataset assemble_tensors(const EventLog& log, const std::vector<PrefixRef>& prefixes,
                               const EncodingModel& model);

Eigen::MatrixXd flatten_for_mlp(const Tensor3& X);

FoldPlan plan_folds(const std::vector<std::string>& case_ids, int k, std::uint64_t seed);

// Flat binary dump: N,M,U,V as little-endian int64, then X then Y as
// little-endian doubles, row-major.
void dump_tensors(const PrefixDataset& ds, const std::string& path);
PrefixDataset load_tensors(const std::string& path);

}  // namespace nap
