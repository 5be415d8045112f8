#include "nap/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>

namespace nap {

std::vector<PrefixRef> build_prefixes(const EventLog& log) {
  std::vector<PrefixRef> out;
  for (std::size_t i = 0; i < log.traces.size(); ++i) {
    const auto& events = log.traces[i].events;
    for (std::size_t k = 1; k < events.size(); ++k)
      out.push_back({i, static_cast<int>(k), events[k].activity});
  }
  return out;
}

std::vector<double> compute_time_deltas(const Trace& trace) {
  std::vector<double> deltas(trace.events.size(), 0.0);
  for (std::size_t i = 1; i < trace.events.size(); ++i)
    deltas[i] = trace.events[i].timestamp - trace.events[i - 1].timestamp;
  return deltas;
}

PrefixDataset assemble_tensors(const EventLog& log, const std::vector<PrefixRef>& prefixes,
                               const EncodingModel& model) {
  const auto& layout = model.layout;
  std::size_t max_len = 0;
  for (const auto& t : log.traces) max_len = std::max(max_len, t.events.size());

  PrefixDataset ds;
  ds.classes = model.activity_vocabulary;
  const std::size_t N = prefixes.size();
  const std::size_t M = max_len;
  const std::size_t U = static_cast<std::size_t>(layout.total_width);
  const std::size_t V = ds.classes.size();
  ds.X = Tensor3(N, M, U);
  ds.Y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(V));

  std::unordered_map<std::string, std::size_t> class_index;
  for (std::size_t c = 0; c < ds.classes.size(); ++c) class_index.emplace(ds.classes[c], c);

  // Per-trace scaled time deltas, computed once.
  std::vector<std::vector<double>> deltas(log.traces.size());
  for (std::size_t i = 0; i < log.traces.size(); ++i) {
    auto raw = compute_time_deltas(log.traces[i]);
    for (double& d : raw) d = model.delta_scaler.apply(d);
    deltas[i] = std::move(raw);
  }

  Eigen::RowVectorXd row(static_cast<Eigen::Index>(U));
  for (std::size_t p = 0; p < N; ++p) {
    const auto& pref = prefixes[p];
    const Trace& trace = log.traces[pref.trace_index];
    const int k = pref.length;
    ds.lengths.push_back(k);
    ds.provenance.emplace_back(trace.case_id, k);

    auto it = class_index.find(pref.label);
    if (it == class_index.end())
      throw std::runtime_error("label activity '" + pref.label + "' not in vocabulary");
    ds.Y(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(it->second)) = 1.0;

    // Prefix occupies the last k steps (pre-padding with zeros).
    for (int e = 0; e < k; ++e) {
      const Event& ev = trace.events[static_cast<std::size_t>(e)];
      row.setZero();
      for (const auto& block : layout.blocks) {
        switch (block.kind) {
          case BlockKind::Activity:
            model.activity.apply(ev.activity, row, block.start);
            break;
          case BlockKind::TimeDelta:
            row[block.start] = deltas[pref.trace_index][static_cast<std::size_t>(e)];
            break;
          case BlockKind::CategoricalContext: {
            const std::size_t j = static_cast<std::size_t>(
                std::find(log.context_names.begin(), log.context_names.end(), block.attribute) -
                log.context_names.begin());
            model.categorical.at(block.attribute)
                .apply(ev.context[j].value_or(""), row, block.start);
            break;
          }
          case BlockKind::NumericalContext: {
            const std::size_t j = static_cast<std::size_t>(
                std::find(log.context_names.begin(), log.context_names.end(), block.attribute) -
                log.context_names.begin());
            double x = 0.0;
            if (ev.context[j] && parse_number(*ev.context[j], x))
              row[block.start] = model.numerical.at(block.attribute).apply(x);
            break;
          }
        }
      }
      const std::size_t step = M - static_cast<std::size_t>(k) + static_cast<std::size_t>(e);
      for (std::size_t j = 0; j < U; ++j) ds.X.at(p, step, j) = row[static_cast<Eigen::Index>(j)];
    }
  }
  return ds;
}

Eigen::MatrixXd flatten_for_mlp(const Tensor3& X) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(X.n), static_cast<Eigen::Index>(X.m * X.u));
  for (std::size_t i = 0; i < X.n; ++i)
    for (std::size_t t = 0; t < X.m; ++t)
      for (std::size_t j = 0; j < X.u; ++j)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t * X.u + j)) = X.at(i, t, j);
  return out;
}

FoldPlan plan_folds(const std::vector<std::string>& case_ids, int k, std::uint64_t seed) {
  if (k < 1 || case_ids.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("need at least k cases for k folds");
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  std::vector<std::string> order = case_ids;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < order.size(); ++i)
    plan.fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  return plan;
}

namespace {

void write_i64(std::ofstream& out, std::int64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::int64_t read_i64(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<std::int64_t>(v);
}

}  // namespace

void dump_tensors(const PrefixDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_i64(out, static_cast<std::int64_t>(ds.X.n));
  write_i64(out, static_cast<std::int64_t>(ds.X.m));
  write_i64(out, static_cast<std::int64_t>(ds.X.u));
  write_i64(out, static_cast<std::int64_t>(ds.Y.cols()));
  // Doubles are written natively; this targets little-endian hosts.
  out.write(reinterpret_cast<const char*>(ds.X.data.data()),
            static_cast<std::streamsize>(ds.X.data.size() * sizeof(double)));
  for (Eigen::Index r = 0; r < ds.Y.rows(); ++r)
    for (Eigen::Index c = 0; c < ds.Y.cols(); ++c) {
      const double v = ds.Y(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
}

PrefixDataset load_tensors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  PrefixDataset ds;
  const auto n = read_i64(in), m = read_i64(in), u = read_i64(in), v = read_i64(in);
  ds.X = Tensor3(static_cast<std::size_t>(n), static_cast<std::size_t>(m),
                 static_cast<std::size_t>(u));
  in.read(reinterpret_cast<char*>(ds.X.data.data()),
          static_cast<std::streamsize>(ds.X.data.size() * sizeof(double)));
  ds.Y.resize(n, v);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < v; ++c) {
      double x;
      in.read(reinterpret_cast<char*>(&x), sizeof(double));
      ds.Y(r, c) = x;
    }
  if (!in) throw std::runtime_error("truncated tensor file '" + path + "'");
  return ds;
}

}  // namespace nap
