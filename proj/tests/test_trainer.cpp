#include "doctest.h"

#include "nap/trainer.hpp"
#include "testutil.hpp"

using namespace nap;

namespace {

PrefixDataset grammar_dataset(std::size_t traces, std::uint64_t seed) {
  const EventLog log = testutil::grammar_log(traces, seed);
  const EncodingModel model = fit_encoding(log, Technique::Onehot);
  return assemble_tensors(log, build_prefixes(log), model);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> head_split(std::size_t n,
                                                                         std::size_t val) {
  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t i = 0; i < n; ++i)
    (i < n - val ? train_idx : val_idx).push_back(i);
  return {train_idx, val_idx};
}

}  // namespace

TEST_CASE("sequence batch extraction mirrors the tensor") {
  const PrefixDataset ds = grammar_dataset(6, 3);
  const std::vector<std::size_t> idx = {0, 2, 5};
  const nn::Batch b = make_seq_batch(ds.X, idx);
  REQUIRE(b.is_seq);
  REQUIRE(b.steps.size() == ds.X.m);
  REQUIRE(b.steps[0].rows() == 3);
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t t = 0; t < ds.X.m; ++t)
      for (std::size_t j = 0; j < ds.X.u; ++j)
        CHECK(b.steps[t](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) ==
              ds.X.at(idx[r], t, j));

  const Eigen::MatrixXd y = select_rows(ds.Y, idx);
  REQUIRE(y.rows() == 3);
  for (std::size_t r = 0; r < idx.size(); ++r)
    CHECK(y.row(static_cast<Eigen::Index>(r)) == ds.Y.row(static_cast<Eigen::Index>(idx[r])));
}

TEST_CASE("prediction is independent of inference batch size") {
  const PrefixDataset ds = grammar_dataset(30, 5);
  const NetworkSpec spec = make_spec(ArchKind::Lstm, static_cast<int>(ds.X.m),
                                     static_cast<int>(ds.X.u), static_cast<int>(ds.Y.cols()));
  nn::Network net = instantiate(spec, 4);
  std::vector<std::size_t> all(ds.X.n);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const Eigen::MatrixXd big = predict(net, ds.X, all, 512);
  const Eigen::MatrixXd small = predict(net, ds.X, all, 7);
  CHECK((big - small).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(big.rows() == static_cast<Eigen::Index>(ds.X.n));
  for (Eigen::Index i = 0; i < big.rows(); ++i)
    CHECK(big.row(i).sum() == doctest::Approx(1.0));
}

TEST_CASE("training converges and tracks the best epoch") {
  const PrefixDataset ds = grammar_dataset(60, 21);
  const auto [train_idx, val_idx] = head_split(ds.X.n, ds.X.n / 10);
  const NetworkSpec spec = make_spec(ArchKind::Mlp, static_cast<int>(ds.X.m),
                                     static_cast<int>(ds.X.u), static_cast<int>(ds.Y.cols()));
  TrainingConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 32;
  cfg.patience = 5;
  cfg.seed = 13;
  TrainedModel model = train(spec, ds, train_idx, val_idx, cfg);
  const auto& h = model.history;
  REQUIRE(h.stopped_epoch >= 1);
  REQUIRE(static_cast<std::size_t>(h.stopped_epoch) == h.val_loss.size());
  REQUIRE(h.best_epoch >= 0);

  // best epoch is the argmin of validation loss
  double best = h.val_loss[h.best_epoch];
  for (double v : h.val_loss) CHECK(best <= v + 1e-15);
  // strict-improvement early stopping: at most patience epochs after the best
  CHECK(h.stopped_epoch - h.best_epoch - 1 <= cfg.patience);
  // learning happened
  CHECK(h.train_loss.back() < h.train_loss.front());

  // the restored network reproduces the best validation loss
  const Eigen::MatrixXd probs = predict(model.net, ds.X, val_idx);
  const Eigen::MatrixXd yval = select_rows(ds.Y, val_idx);
  CHECK(nn::cross_entropy(probs, yval) == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("training is deterministic under a fixed seed") {
  const PrefixDataset ds = grammar_dataset(25, 17);
  const auto [train_idx, val_idx] = head_split(ds.X.n, 8);
  const NetworkSpec spec = make_spec(ArchKind::Cnn, static_cast<int>(ds.X.m),
                                     static_cast<int>(ds.X.u), static_cast<int>(ds.Y.cols()));
  TrainingConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 16;
  cfg.seed = 77;
  TrainedModel a = train(spec, ds, train_idx, val_idx, cfg);
  TrainedModel b = train(spec, ds, train_idx, val_idx, cfg);
  CHECK(a.history.val_loss == b.history.val_loss);
  CHECK(a.history.train_loss == b.history.train_loss);
  cfg.seed = 78;
  TrainedModel c = train(spec, ds, train_idx, val_idx, cfg);
  CHECK(a.history.train_loss != c.history.train_loss);
}

TEST_CASE("a singleton tail batch is merged into its predecessor") {
  const PrefixDataset ds = grammar_dataset(40, 2);
  // choose a train size with n % batch == 1; batchnorm would reject a
  // lone row in training mode if the tail were not merged
  TrainingConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 16;
  cfg.seed = 5;
  std::size_t want = (ds.X.n / 16) * 16 + 1;
  REQUIRE(want + 4 <= ds.X.n);
  std::vector<std::size_t> train_idx, val_idx;
  for (std::size_t i = 0; i < want; ++i) train_idx.push_back(i);
  for (std::size_t i = want; i < want + 4; ++i) val_idx.push_back(i);
  const NetworkSpec spec = make_spec(ArchKind::Mlp, static_cast<int>(ds.X.m),
                                     static_cast<int>(ds.X.u), static_cast<int>(ds.Y.cols()));
  CHECK_NOTHROW(train(spec, ds, train_idx, val_idx, cfg));
}

TEST_CASE("cross validation produces one result per fold") {
  const EventLog log = testutil::grammar_log(40, 8);
  TrainingConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 32;
  cfg.seed = 9;
  const CrossValidationResult res =
      run_cross_validation(log, ArchKind::Mlp, Technique::Ordinal, 4, 9, cfg);
  REQUIRE(res.folds.size() == 4);
  REQUIRE(res.histories.size() == 4);
  for (int f = 0; f < 4; ++f) {
    CHECK(res.folds[f].fold == f);
    CHECK(res.folds[f].accuracy >= 0.0);
    CHECK(res.folds[f].accuracy <= 1.0);
    CHECK(res.folds[f].epochs_trained >= 1);
  }

  // deterministic end to end
  const CrossValidationResult again =
      run_cross_validation(log, ArchKind::Mlp, Technique::Ordinal, 4, 9, cfg);
  for (int f = 0; f < 4; ++f) {
    CHECK(res.folds[f].accuracy == again.folds[f].accuracy);
    CHECK(res.folds[f].best_val_loss == again.folds[f].best_val_loss);
  }
}
