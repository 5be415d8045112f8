#include "nap/eventlog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace nap {

const AttrInfo* AttributeSchema::find(const std::string& name) const {
  for (const auto& a : attributes)
    if (a.name == name) return &a;
  return nullptr;
}

std::size_t EventLog::event_count() const {
  std::size_t n = 0;
  for (const auto& t : traces) n += t.events.size();
  return n;
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* s = text.c_str();
  char* end = nullptr;
  out = std::strtod(s, &end);
  if (end == s) return false;
  while (*end != '\0') {
    if (!std::isspace(static_cast<unsigned char>(*end))) return false;
    ++end;
  }
  return std::isfinite(out);
}

double parse_timestamp(const std::string& text, const std::string& format) {
  std::tm tm = {};
  const char* rest = strptime(text.c_str(), format.c_str(), &tm);
  if (rest == nullptr)
    throw std::runtime_error("unparseable timestamp '" + text + "'");
  double frac = 0.0;
  if (*rest == '.') {
    char* end = nullptr;
    frac = std::strtod(rest, &end);
    rest = end;
  }
  while (*rest != '\0') {
    if (!std::isspace(static_cast<unsigned char>(*rest)))
      throw std::runtime_error("trailing characters in timestamp '" + text + "'");
    ++rest;
  }
  tm.tm_isdst = 0;
  const time_t secs = timegm(&tm);
  return static_cast<double>(secs) + frac;
}

std::vector<std::string> split_csv_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

EventLog parse_csv(const std::string& path, const ColumnMapping& mapping,
                   const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty event log file '" + path + "'");
  const auto header = split_csv_line(line, options.delimiter);

  auto column_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw std::runtime_error("mapped column '" + name + "' not found in header");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ci = column_of(mapping.case_column);
  const std::size_t ai = column_of(mapping.activity_column);
  const std::size_t ti = column_of(mapping.timestamp_column);

  EventLog log;
  std::vector<std::size_t> context_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j == ci || j == ai || j == ti) continue;
    context_cols.push_back(j);
    log.context_names.push_back(header[j]);
  }

  std::unordered_map<std::string, std::size_t> trace_of;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv_line(line, options.delimiter);
    if (fields.size() != header.size())
      throw std::runtime_error("row " + std::to_string(row) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(fields.size()));
    Event e;
    e.case_id = fields[ci];
    e.activity = fields[ai];
    if (e.activity.empty())
      throw std::runtime_error("row " + std::to_string(row) + ": empty activity");
    try {
      e.timestamp = parse_timestamp(fields[ti], options.timestamp_format);
    } catch (const std::exception& ex) {
      throw std::runtime_error("row " + std::to_string(row) + ": " + ex.what());
    }
    e.context.reserve(context_cols.size());
    for (std::size_t j : context_cols) {
      const std::string& v = fields[j];
      if (v.empty() || v == options.missing_sentinel)
        e.context.emplace_back(std::nullopt);
      else
        e.context.emplace_back(v);
    }
    auto it = trace_of.find(e.case_id);
    if (it == trace_of.end()) {
      trace_of.emplace(e.case_id, log.traces.size());
      log.traces.push_back(Trace{e.case_id, {std::move(e)}});
    } else {
      log.traces[it->second].events.push_back(std::move(e));
    }
  }
  if (log.traces.empty()) throw std::runtime_error("empty event log '" + path + "'");

  for (auto& t : log.traces) {
    std::stable_sort(t.events.begin(), t.events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
  }
  log.schema.case_column = mapping.case_column;
  log.schema.activity_column = mapping.activity_column;
  log.schema.timestamp_column = mapping.timestamp_column;
  return log;
}

AttributeSchema infer_schema(const EventLog& log, double numeric_threshold) {
  if (log.traces.empty()) throw std::runtime_error("cannot infer schema of an empty log");
  AttributeSchema schema = log.schema;
  schema.attributes.clear();
  for (std::size_t j = 0; j < log.context_names.size(); ++j) {
    AttrInfo info;
    info.name = log.context_names[j];
    std::set<std::string> distinct;
    std::size_t present = 0, numeric = 0;
    for (const auto& t : log.traces) {
      for (const auto& e : t.events) {
        const auto& v = e.context[j];
        if (!v) {
          ++info.missing;
          continue;
        }
        ++present;
        distinct.insert(*v);
        double x;
        if (parse_number(*v, x)) ++numeric;
      }
    }
    info.distinct = distinct.size();
    info.kind = (present > 0 &&
                 static_cast<double>(numeric) >= numeric_threshold * static_cast<double>(present))
                    ? AttrKind::Numerical
                    : AttrKind::Categorical;
    schema.attributes.push_back(std::move(info));
  }
  return schema;
}

EventLog impute_missing(const EventLog& log) {
  EventLog out = log;
  for (std::size_t j = 0; j < log.context_names.size(); ++j) {
    const AttrInfo* info = log.schema.find(log.context_names[j]);
    if (info == nullptr)
      throw std::runtime_error("schema missing attribute '" + log.context_names[j] + "'");
    std::string fill;
    if (info->kind == AttrKind::Numerical) {
      double sum = 0;
      std::size_t n = 0;
      for (const auto& t : log.traces)
        for (const auto& e : t.events)
          if (e.context[j]) {
            double x;
            parse_number(*e.context[j], x);
            sum += x;
            ++n;
          }
      if (n == 0)
        throw std::runtime_error("attribute '" + info->name + "' is entirely missing");
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", sum / static_cast<double>(n));
      fill = buf;
    } else {
      std::map<std::string, std::size_t> counts;
      for (const auto& t : log.traces)
        for (const auto& e : t.events)
          if (e.context[j]) ++counts[*e.context[j]];
      if (counts.empty())
        throw std::runtime_error("attribute '" + info->name + "' is entirely missing");
      // std::map iterates lexicographically, so the first maximal count
      // is the lexicographically smallest mode.
      std::size_t best = 0;
      for (const auto& [v, c] : counts)
        if (c > best) {
          best = c;
          fill = v;
        }
    }
    for (auto& t : out.traces)
      for (auto& e : t.events)
        if (!e.context[j]) e.context[j] = fill;
  }
  // Missing counts are now zero by construction.
  for (auto& a : out.schema.attributes) a.missing = 0;
  return out;
}

EventLog filter_high_cardinality(const EventLog& log, std::size_t max_values) {
  std::vector<std::size_t> keep;
  for (std::size_t j = 0; j < log.context_names.size(); ++j) {
    const AttrInfo* info = log.schema.find(log.context_names[j]);
    if (info == nullptr)
      throw std::runtime_error("schema missing attribute '" + log.context_names[j] + "'");
    if (info->distinct <= max_values) keep.push_back(j);
  }
  if (keep.size() == log.context_names.size()) return log;

  EventLog out;
  out.schema.case_column = log.schema.case_column;
  out.schema.activity_column = log.schema.activity_column;
  out.schema.timestamp_column = log.schema.timestamp_column;
  for (std::size_t j : keep) {
    out.context_names.push_back(log.context_names[j]);
    out.schema.attributes.push_back(*log.schema.find(log.context_names[j]));
  }
  out.traces.reserve(log.traces.size());
  for (const auto& t : log.traces) {
    Trace nt{t.case_id, {}};
    nt.events.reserve(t.events.size());
    for (const auto& e : t.events) {
      Event ne{e.activity, e.case_id, e.timestamp, {}};
      ne.context.reserve(keep.size());
      for (std::size_t j : keep) ne.context.push_back(e.context[j]);
      nt.events.push_back(std::move(ne));
    }
    out.traces.push_back(std::move(nt));
  }
  return out;
}

EventLog truncate_and_sample(const EventLog& log, std::size_t max_trace_len,
                             double sample_fraction, std::uint64_t seed) {
  if (sample_fraction <= 0.0 || sample_fraction > 1.0)
    throw std::invalid_argument("sample_fraction must be in (0,1]");
  std::vector<std::size_t> remaining;
  for (std::size_t i = 0; i < log.traces.size(); ++i)
    if (log.traces[i].events.size() <= max_trace_len) remaining.push_back(i);

  const auto kept =
      static_cast<std::size_t>(std::ceil(sample_fraction * static_cast<double>(remaining.size())));
  std::vector<std::size_t> order = remaining;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(kept);
  std::sort(order.begin(), order.end());  // keep original log order

  EventLog out;
  out.context_names = log.context_names;
  out.schema = log.schema;
  for (std::size_t i : order) out.traces.push_back(log.traces[i]);
  return out;
}

namespace {

DistStats dist_stats(std::vector<double> values) {
  DistStats s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  const std::size_t n = values.size();
  s.median = (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return s;
}

}  // namespace

LogStats compute_statistics(const EventLog& log) {
  if (log.traces.empty()) throw std::runtime_error("cannot compute statistics of an empty log");
  LogStats s;
  s.instances = log.traces.size();

  std::set<std::vector<std::string>> variants;
  std::set<std::string> activities;
  std::vector<double> events_per, acts_per;
  for (const auto& t : log.traces) {
    std::vector<std::string> variant;
    std::set<std::string> distinct_acts;
    variant.reserve(t.events.size());
    for (const auto& e : t.events) {
      variant.push_back(e.activity);
      distinct_acts.insert(e.activity);
      activities.insert(e.activity);
    }
    s.events += t.events.size();
    events_per.push_back(static_cast<double>(t.events.size()));
    acts_per.push_back(static_cast<double>(distinct_acts.size()));
    variants.insert(std::move(variant));
  }
  s.variants = variants.size();
  s.instance_variant_ratio = static_cast<double>(s.instances) / static_cast<double>(s.variants);
  s.activity_classes = activities.size();
  s.events_per_instance = dist_stats(std::move(events_per));
  s.activities_per_instance = dist_stats(std::move(acts_per));

  s.attributes_total = log.schema.attributes.size();
  for (const auto& a : log.schema.attributes) {
    if (a.kind == AttrKind::Numerical)
      ++s.attributes_numerical;
    else
      ++s.attributes_categorical;
    s.attribute_distinct.emplace_back(a.name, a.distinct);
  }
  return s;
}

}  // namespace nap
