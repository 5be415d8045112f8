#include "doctest.h"

#include "nap/eventlog.hpp"
#include "nap/md5.hpp"
#include "testutil.hpp"

using namespace nap;

TEST_CASE("timestamp parsing") {
  CHECK(parse_timestamp("1970-01-01T00:00:00", "%Y-%m-%dT%H:%M:%S") == 0.0);
  CHECK(parse_timestamp("1970-01-01T00:00:30", "%Y-%m-%dT%H:%M:%S") == 30.0);
  CHECK(parse_timestamp("2020-01-01T00:00:00", "%Y-%m-%dT%H:%M:%S") == 1577836800.0);
  CHECK(parse_timestamp("1970-01-01 00:01:00.5", "%Y-%m-%d %H:%M:%S") == doctest::Approx(60.5));
  CHECK_THROWS(parse_timestamp("not a date", "%Y-%m-%dT%H:%M:%S"));
  CHECK_THROWS(parse_timestamp("1970-01-01T00:00:00junk", "%Y-%m-%dT%H:%M:%S"));
}

TEST_CASE("csv line splitting honors quotes") {
  auto f = split_csv_line("a,b,c", ',');
  REQUIRE(f.size() == 3);
  CHECK(f[1] == "b");

  f = split_csv_line("a,\"x, y\",c", ',');
  REQUIRE(f.size() == 3);
  CHECK(f[1] == "x, y");

  f = split_csv_line("\"he said \"\"hi\"\"\",2", ',');
  REQUIRE(f.size() == 2);
  CHECK(f[0] == "he said \"hi\"");

  f = split_csv_line("a;b", ';');
  REQUIRE(f.size() == 2);

  f = split_csv_line("a,,c", ',');
  REQUIRE(f.size() == 3);
  CHECK(f[1].empty());
}

TEST_CASE("parse_csv groups by case and sorts by timestamp") {
  const std::string path = testutil::write_temp_csv(
      "parse.csv",
      "case,activity,ts,res\n"
      "c1,B,1970-01-01T00:00:10,r1\n"
      "c2,X,1970-01-01T00:00:05,r2\n"
      "c1,A,1970-01-01T00:00:01,NA\n"
      "c1,C,1970-01-01T00:00:20,r1\n");
  const EventLog log = parse_csv(path, {"case", "activity", "ts"});
  REQUIRE(log.traces.size() == 2);
  REQUIRE(log.context_names == std::vector<std::string>{"res"});
  const Trace* c1 = nullptr;
  for (const auto& t : log.traces)
    if (t.case_id == "c1") c1 = &t;
  REQUIRE(c1 != nullptr);
  REQUIRE(c1->events.size() == 3);
  CHECK(c1->events[0].activity == "A");
  CHECK(c1->events[1].activity == "B");
  CHECK(c1->events[2].activity == "C");
  CHECK_FALSE(c1->events[0].context[0].has_value());  // NA sentinel
  CHECK(c1->events[1].context[0].value() == "r1");
  CHECK(log.event_count() == 4);
}

TEST_CASE("parse_csv rejects malformed input") {
  const std::string bad_ts = testutil::write_temp_csv(
      "badts.csv", "case,activity,ts\nc1,A,not-a-date\n");
  CHECK_THROWS(parse_csv(bad_ts, {"case", "activity", "ts"}));

  const std::string missing_col = testutil::write_temp_csv(
      "badcol.csv", "case,activity,ts\n");
  CHECK_THROWS(parse_csv(missing_col, {"case", "activity", "when"}));

  const std::string ragged = testutil::write_temp_csv(
      "ragged.csv", "case,activity,ts\nc1,A\n");
  CHECK_THROWS(parse_csv(ragged, {"case", "activity", "ts"}));

  CHECK_THROWS(parse_csv("/nonexistent/nowhere.csv", {"case", "activity", "ts"}));
}

TEST_CASE("schema inference splits numerical and categorical") {
  const std::string path = testutil::write_temp_csv(
      "schema.csv",
      "case,activity,ts,amount,team\n"
      "c1,A,1970-01-01T00:00:01,1.5,alpha\n"
      "c1,B,1970-01-01T00:00:02,2.5,beta\n"
      "c2,A,1970-01-01T00:00:03,NA,alpha\n");
  EventLog log = parse_csv(path, {"case", "activity", "ts"});
  log.schema = infer_schema(log);
  REQUIRE(log.schema.attributes.size() == 2);
  const AttrInfo* amount = log.schema.find("amount");
  const AttrInfo* team = log.schema.find("team");
  REQUIRE(amount != nullptr);
  REQUIRE(team != nullptr);
  CHECK(amount->kind == AttrKind::Numerical);  // NA ignored for the vote
  CHECK(team->kind == AttrKind::Categorical);
  CHECK(amount->missing == 1);
  CHECK(team->distinct == 2);
  CHECK(log.schema.find("nope") == nullptr);
}

TEST_CASE("imputation fills mean and lexicographic mode") {
  const std::string path = testutil::write_temp_csv(
      "impute.csv",
      "case,activity,ts,amount,team\n"
      "c1,A,1970-01-01T00:00:01,1.0,beta\n"
      "c1,B,1970-01-01T00:00:02,3.0,alpha\n"
      "c1,C,1970-01-01T00:00:03,NA,NA\n");
  EventLog log = parse_csv(path, {"case", "activity", "ts"});
  log.schema = infer_schema(log);
  const EventLog filled = impute_missing(log);
  const auto& events = filled.traces[0].events;
  CHECK(events[2].context[0].value() == "2");       // mean of 1 and 3
  CHECK(events[2].context[1].value() == "alpha");   // tie broken lexicographically
  CHECK(events[0].context[0].value() == "1.0");     // untouched

  // a column with no observed value at all cannot be imputed
  const std::string empty = testutil::write_temp_csv(
      "allmissing.csv", "case,activity,ts,x\nc1,A,1970-01-01T00:00:01,NA\n");
  EventLog log2 = parse_csv(empty, {"case", "activity", "ts"});
  log2.schema = infer_schema(log2);
  CHECK_THROWS(impute_missing(log2));
}

TEST_CASE("high-cardinality attributes are dropped") {
  EventLog log;
  log.context_names = {"id", "small"};
  Trace trace;
  trace.case_id = "c";
  for (int i = 0; i < 10; ++i) {
    Event e;
    e.activity = "A";
    e.case_id = "c";
    e.timestamp = i;
    e.context = {std::to_string(i), i % 2 ? "x" : "y"};
    trace.events.push_back(e);
  }
  log.traces.push_back(trace);
  log.schema = infer_schema(log, 0.99);

  const EventLog kept = filter_high_cardinality(log, 600);
  CHECK(kept.context_names.size() == 2);

  const EventLog filtered = filter_high_cardinality(log, 5);
  REQUIRE(filtered.context_names == std::vector<std::string>{"small"});
  REQUIRE(filtered.traces[0].events[0].context.size() == 1);
  CHECK(filtered.traces[0].events[0].context[0].value() == "y");
  CHECK(filtered.schema.attributes.size() == 1);
}

TEST_CASE("truncate and sample") {
  std::mt19937_64 rng(3);
  const EventLog log = testutil::grammar_log(20, 11);
  // traces longer than the cap are removed, not shortened
  const EventLog cut = truncate_and_sample(log, 4, 1.0, 5);
  std::size_t short_traces = 0;
  for (const auto& t : log.traces) short_traces += t.events.size() <= 4;
  CHECK(cut.traces.size() == short_traces);
  for (const auto& t : cut.traces) CHECK(t.events.size() <= 4);
  const EventLog ident = truncate_and_sample(log, 1000, 1.0, 5);
  CHECK(ident.traces.size() == log.traces.size());

  const EventLog half = truncate_and_sample(log, 100, 0.5, 5);
  CHECK(half.traces.size() == 10);  // ceil(0.5 * 20)
  const EventLog half2 = truncate_and_sample(log, 100, 0.5, 5);
  for (std::size_t i = 0; i < half.traces.size(); ++i)
    CHECK(half.traces[i].case_id == half2.traces[i].case_id);

  const EventLog tiny = truncate_and_sample(log, 100, 0.051, 5);
  CHECK(tiny.traces.size() == 2);  // ceil(1.02)

  // sampling keeps original log order
  std::vector<std::string> order;
  for (const auto& t : log.traces) order.push_back(t.case_id);
  std::size_t cursor = 0;
  for (const auto& t : half.traces) {
    while (cursor < order.size() && order[cursor] != t.case_id) ++cursor;
    CHECK(cursor < order.size());
  }
}

TEST_CASE("descriptive statistics on a hand-built log") {
  // traces: [A B], [A B], [A B C], [A A B C] -> 3 variants
  EventLog log;
  log.context_names = {"team"};
  auto add = [&](const std::string& cid, const std::vector<std::string>& acts) {
    Trace t;
    t.case_id = cid;
    double ts = 0;
    for (const auto& a : acts) {
      Event e;
      e.activity = a;
      e.case_id = cid;
      e.timestamp = ++ts;
      e.context = {std::string("t") + cid};
      t.events.push_back(e);
    }
    log.traces.push_back(t);
  };
  add("1", {"A", "B"});
  add("2", {"A", "B"});
  add("3", {"A", "B", "C"});
  add("4", {"A", "A", "B", "C"});
  log.schema = infer_schema(log);

  const LogStats s = compute_statistics(log);
  CHECK(s.instances == 4);
  CHECK(s.variants == 3);
  CHECK(s.instance_variant_ratio == doctest::Approx(4.0 / 3.0));
  CHECK(s.activity_classes == 3);
  CHECK(s.events == 11);
  CHECK(s.events_per_instance.min == 2);
  CHECK(s.events_per_instance.max == 4);
  CHECK(s.events_per_instance.mean == doctest::Approx(11.0 / 4.0));
  CHECK(s.events_per_instance.median == doctest::Approx(2.5));  // mean of central pair
  CHECK(s.activities_per_instance.max == 3);                    // distinct per trace
  CHECK(s.attributes_total == 1);
  CHECK(s.attributes_categorical == 1);
  REQUIRE(s.attribute_distinct.size() == 1);
  CHECK(s.attribute_distinct[0].second == 4);
}

TEST_CASE("md5 matches RFC 1321 vectors") {
  CHECK(md5_hex("") == "d41d8cd98f00b204e9800998ecf8427e");
  CHECK(md5_hex("a") == "0cc175b9c0f1b6a831c399e269772661");
  CHECK(md5_hex("abc") == "900150983cd24fb0d6963f7d28e17f72");
  CHECK(md5_hex("message digest") == "f96b697d7cb7938d525a2f31aaf161d0");
  CHECK(md5_hex("abcdefghijklmnopqrstuvwxyz") == "c3fcd3d76192e4007dfb496cca67e13b");
  CHECK(md5_hex("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789") ==
        "d174ab98d277d9f5a5611c2c9f419d9f");
  CHECK(md5_hex("1234567890123456789012345678901234567890"
                "1234567890123456789012345678901234567890") ==
        "57edf4a22be3c955ac49da2e2107b67a");
  CHECK(md5_mod("abc", 10) == 0);  // 0x...7f72 mod 10
  CHECK(md5_mod("a", 10) == 7);
}
