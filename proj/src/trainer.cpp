#include "nap/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

namespace nap {

nn::Batch make_seq_batch(const Tensor3& X, const std::vector<std::size_t>& indices) {
  std::vector<nn::Matrix> steps(X.m);
  for (std::size_t t = 0; t < X.m; ++t) {
    nn::Matrix s(static_cast<Eigen::Index>(indices.size()), static_cast<Eigen::Index>(X.u));
    for (std::size_t r = 0; r < indices.size(); ++r)
      for (std::size_t j = 0; j < X.u; ++j)
        s(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = X.at(indices[r], t, j);
    steps[t] = std::move(s);
  }
  return nn::Batch::sequence(std::move(steps));
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& Y, const std::vector<std::size_t>& indices) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(indices.size()), Y.cols());
  for (std::size_t r = 0; r < indices.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = Y.row(static_cast<Eigen::Index>(indices[r]));
  return out;
}

Eigen::MatrixXd predict(nn::Network& net, const Tensor3& X,
                        const std::vector<std::size_t>& indices, int batch_size) {
  Eigen::MatrixXd probs;
  Eigen::Index row = 0;
  for (std::size_t start = 0; start < indices.size();
       start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(indices.size(), start + static_cast<std::size_t>(batch_size));
    std::vector<std::size_t> chunk(indices.begin() + static_cast<std::ptrdiff_t>(start),
                                   indices.begin() + static_cast<std::ptrdiff_t>(end));
    const Eigen::MatrixXd p = net.forward(make_seq_batch(X, chunk), false);
    if (probs.size() == 0) probs.resize(static_cast<Eigen::Index>(indices.size()), p.cols());
    probs.middleRows(row, p.rows()) = p;
    row += p.rows();
  }
  return probs;
}

TrainedModel train(const NetworkSpec& spec, const PrefixDataset& ds,
                   const std::vector<std::size_t>& train_idx,
                   const std::vector<std::size_t>& val_idx, const TrainingConfig& config) {
  if (train_idx.empty()) throw std::invalid_argument("empty training set");
  if (val_idx.empty()) throw std::invalid_argument("empty validation set");

  TrainedModel model{spec, instantiate(spec, config.seed), {}};
  nn::Network& net = model.net;
  nn::Optimizer opt(spec.optimizer(), spec.learning_rate());
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ull);

  const nn::Batch val_batch = make_seq_batch(ds.X, val_idx);
  const Eigen::MatrixXd val_y = select_rows(ds.Y, val_idx);

  // Mini-batch spans over the shuffled index order. A trailing batch of
  // one row is merged into its predecessor (batchnorm needs >= 2 rows).
  std::vector<std::size_t> order = train_idx;
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<nn::Matrix> best_state;
  int non_improving = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    std::size_t pos = 0;
    while (pos < order.size()) {
      std::size_t len = std::min(static_cast<std::size_t>(config.batch_size), order.size() - pos);
      if (order.size() - pos - len == 1) ++len;  // absorb a would-be singleton tail
      std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(pos),
                                     order.begin() + static_cast<std::ptrdiff_t>(pos + len));
      pos += len;

      const Eigen::MatrixXd probs = net.forward(make_seq_batch(ds.X, batch), true);
      const Eigen::MatrixXd y = select_rows(ds.Y, batch);
      epoch_loss += nn::cross_entropy(probs, y);
      ++batches;
      net.backward_from_logits(nn::cross_entropy_softmax_grad(probs, y));
      opt.step(net.params(), net.grads());
    }
    model.history.train_loss.push_back(epoch_loss / static_cast<double>(batches));

    const double val_loss = nn::cross_entropy(net.forward(val_batch, false), val_y);
    model.history.val_loss.push_back(val_loss);
    model.history.stopped_epoch = epoch + 1;

    if (val_loss < best_val) {
      best_val = val_loss;
      model.history.best_epoch = epoch;
      best_state = net.snapshot();
      non_improving = 0;
    } else {
      ++non_improving;
      if (non_improving >= config.patience) break;
    }
  }
  net.restore(best_state);
  return model;
}

namespace {

std::vector<std::size_t> prefixes_of_cases(const PrefixDataset& ds,
                                           const std::set<std::string>& cases) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ds.provenance.size(); ++i)
    if (cases.count(ds.provenance[i].first)) out.push_back(i);
  return out;
}

}  // namespace

CrossValidationResult run_cross_validation(const PrefixDataset& ds, ArchKind arch, int k,
                                           std::uint64_t seed, const TrainingConfig& config) {
  std::vector<std::string> case_ids;
  {
    std::set<std::string> seen;
    for (const auto& [cid, len] : ds.provenance)
      if (seen.insert(cid).second) case_ids.push_back(cid);
  }
  const FoldPlan plan = plan_folds(case_ids, k, seed);
  const NetworkSpec spec = make_spec(arch, static_cast<int>(ds.X.m), static_cast<int>(ds.X.u),
                                     static_cast<int>(ds.Y.cols()));

  CrossValidationResult result;
  for (int f = 0; f < k; ++f) {
    std::set<std::string> test_cases;
    std::vector<std::string> train_cases;
    for (const auto& cid : case_ids) {
      if (plan.fold_of.at(cid) == f)
        test_cases.insert(cid);
      else
        train_cases.push_back(cid);
    }
    // Deterministic 10% instance-based validation split of the training cases.
    std::mt19937_64 vrng(seed + static_cast<std::uint64_t>(f));
    std::shuffle(train_cases.begin(), train_cases.end(), vrng);
    const std::size_t val_n = static_cast<std::size_t>(
        std::ceil(0.1 * static_cast<double>(train_cases.size())));
    std::set<std::string> val_cases(train_cases.begin(),
                                    train_cases.begin() + static_cast<std::ptrdiff_t>(val_n));
    std::set<std::string> fit_cases(train_cases.begin() + static_cast<std::ptrdiff_t>(val_n),
                                    train_cases.end());

    const auto train_idx = prefixes_of_cases(ds, fit_cases);
    const auto val_idx = prefixes_of_cases(ds, val_cases);
    const auto test_idx = prefixes_of_cases(ds, test_cases);

    TrainingConfig fold_config = config;
    fold_config.seed = seed + static_cast<std::uint64_t>(f);
    TrainedModel model = train(spec, ds, train_idx, val_idx, fold_config);

    const Eigen::MatrixXd probs = predict(model.net, ds.X, test_idx);
    FoldResult fr = compute_metrics(probs, select_rows(ds.Y, test_idx), ds.classes);
    fr.fold = f;
    fr.epochs_trained = model.history.stopped_epoch;
    fr.best_val_loss = model.history.val_loss[static_cast<std::size_t>(model.history.best_epoch)];
    result.folds.push_back(std::move(fr));
    result.histories.push_back(model.history);
  }
  return result;
}

CrossValidationResult run_cross_validation(const EventLog& log, ArchKind arch,
                                           Technique technique, int k, std::uint64_t seed,
                                           const TrainingConfig& config,
                                           const Word2vecParams& w2v) {
  Word2vecParams params = w2v;
  params.seed = seed;
  const EncodingModel model = fit_encoding(log, technique, params);
  const auto prefixes = build_prefixes(log);
  const PrefixDataset ds = assemble_tensors(log, prefixes, model);
  return run_cross_validation(ds, arch, k, seed, config);
}

}  // namespace nap
