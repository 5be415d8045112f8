#include "doctest.h"

#include <set>

#include "nap/dataset.hpp"
#include "testutil.hpp"

using namespace nap;

TEST_CASE("prefix enumeration matches brute force on random logs") {
  std::mt19937_64 rng(2024);
  for (int iter = 0; iter < 100; ++iter) {
    const EventLog log = testutil::random_log(rng);
    const auto got = build_prefixes(log);
    const auto want = testutil::oracle_prefixes(log);
    std::size_t expected = 0;
    for (const auto& t : log.traces)
      expected += t.events.size() > 1 ? t.events.size() - 1 : 0;
    REQUIRE(got.size() == want.size());
    REQUIRE(got.size() == expected);
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].trace_index == want[i].trace);
      CHECK(got[i].length == want[i].k);
      CHECK(got[i].label == want[i].label);
    }
  }
}

TEST_CASE("prefix lengths are proper") {
  const EventLog log = testutil::grammar_log(30, 9);
  for (const auto& p : build_prefixes(log)) {
    CHECK(p.length > 0);
    CHECK(static_cast<std::size_t>(p.length) < log.traces[p.trace_index].events.size());
  }
  // single-event traces yield nothing
  EventLog lone;
  Trace t;
  t.case_id = "c";
  Event e;
  e.activity = "A";
  e.case_id = "c";
  t.events.push_back(e);
  lone.traces.push_back(t);
  CHECK(build_prefixes(lone).empty());
}

TEST_CASE("time deltas start at zero") {
  Trace t;
  for (double ts : {100.0, 160.0, 190.0}) {
    Event e;
    e.timestamp = ts;
    t.events.push_back(e);
  }
  const auto d = compute_time_deltas(t);
  REQUIRE(d.size() == 3);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == 60.0);
  CHECK(d[2] == 30.0);
}

TEST_CASE("tensor assembly pre-pads and one-hot encodes labels") {
  // two traces: [A B C], [A B] with 60 s gaps
  EventLog log;
  log.context_names = {};
  auto add = [&](const std::string& cid, const std::vector<std::string>& acts) {
    Trace t;
    t.case_id = cid;
    double ts = 0;
    for (const auto& a : acts) {
      Event e;
      e.activity = a;
      e.case_id = cid;
      e.timestamp = (ts += 60.0);
      t.events.push_back(e);
    }
    log.traces.push_back(t);
  };
  add("c1", {"A", "B", "C"});
  add("c2", {"A", "B"});
  log.schema = infer_schema(log);

  const EncodingModel model = fit_encoding(log, Technique::Onehot);
  const auto prefixes = build_prefixes(log);
  const PrefixDataset ds = assemble_tensors(log, prefixes, model);

  // N=3 prefixes, M=3 (longest trace), U = 3 activities + 1 delta
  CHECK(ds.X.n == 3);
  CHECK(ds.X.m == 3);
  CHECK(ds.X.u == 4);
  CHECK(ds.Y.rows() == 3);
  CHECK(ds.Y.cols() == 3);
  CHECK(ds.classes == std::vector<std::string>{"A", "B", "C"});

  // prefix 0: [A], pre-padded -> steps 0,1 zero, step 2 = A
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(ds.X.at(0, 0, j) == 0.0);
    CHECK(ds.X.at(0, 1, j) == 0.0);
  }
  CHECK(ds.X.at(0, 2, 0) == 1.0);  // activity A one-hot
  CHECK(ds.X.at(0, 2, 3) == 0.0);  // first delta scaled to 0
  CHECK(ds.Y(0, 1) == 1.0);        // label B
  CHECK(ds.lengths[0] == 1);
  CHECK(ds.provenance[0] == std::pair<std::string, int>{"c1", 1});

  // prefix 1: [A B] -> steps 1,2 occupied; delta of B = 60 = max -> 1.0
  CHECK(ds.X.at(1, 0, 0) == 0.0);
  CHECK(ds.X.at(1, 1, 0) == 1.0);  // A
  CHECK(ds.X.at(1, 2, 1) == 1.0);  // B
  CHECK(ds.X.at(1, 2, 3) == 1.0);  // scaled delta
  CHECK(ds.Y(1, 2) == 1.0);        // label C
}

TEST_CASE("unknown label activity is rejected") {
  EventLog log = testutil::grammar_log(5, 1);
  const EncodingModel model = fit_encoding(log, Technique::Onehot);
  auto prefixes = build_prefixes(log);
  prefixes[0].label = "GHOST";
  CHECK_THROWS(assemble_tensors(log, prefixes, model));
}

TEST_CASE("mlp flattening is time-major and lossless") {
  Tensor3 X(2, 3, 2);
  double v = 0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t t = 0; t < 3; ++t)
      for (std::size_t j = 0; j < 2; ++j) X.at(i, t, j) = ++v;
  const Eigen::MatrixXd flat = flatten_for_mlp(X);
  REQUIRE(flat.rows() == 2);
  REQUIRE(flat.cols() == 6);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t t = 0; t < 3; ++t)
      for (std::size_t j = 0; j < 2; ++j)
        CHECK(flat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t * 2 + j)) ==
              X.at(i, t, j));
}

TEST_CASE("fold plan is balanced, total and deterministic") {
  std::vector<std::string> ids;
  for (int i = 0; i < 47; ++i) ids.push_back("case" + std::to_string(i));
  const FoldPlan plan = plan_folds(ids, 10, 99);
  REQUIRE(plan.fold_of.size() == ids.size());
  std::vector<int> sizes(10, 0);
  for (const auto& [id, f] : plan.fold_of) {
    REQUIRE(f >= 0);
    REQUIRE(f < 10);
    ++sizes[f];
  }
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  CHECK(*hi - *lo <= 1);

  const FoldPlan again = plan_folds(ids, 10, 99);
  CHECK(plan.fold_of == again.fold_of);
  const FoldPlan other = plan_folds(ids, 10, 100);
  CHECK(plan.fold_of != other.fold_of);
}

TEST_CASE("tensor dump and load round-trip") {
  EventLog log = testutil::grammar_log(8, 4);
  const EncodingModel model = fit_encoding(log, Technique::Binary);
  const PrefixDataset ds = assemble_tensors(log, build_prefixes(log), model);
  const std::string path = testutil::temp_path("tensors.bin");
  dump_tensors(ds, path);
  const PrefixDataset back = load_tensors(path);
  CHECK(back.X.n == ds.X.n);
  CHECK(back.X.m == ds.X.m);
  CHECK(back.X.u == ds.X.u);
  CHECK(back.X.data == ds.X.data);
  CHECK(back.Y == ds.Y);
}
