#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nap {

// Context attribute values are kept as raw text; numeric interpretation
// happens at encoding time. An empty optional marks a missing value.
using AttrValue = std::optional<std::string>;

struct Event {
  std::string activity;
  std::string case_id;
  double timestamp = 0.0;  // seconds since epoch, fractional part allowed
  std::vector<AttrValue> context;  // aligned with EventLog::context_names
};

struct Trace {
  std::string case_id;
  std::vector<Event> events;
};

enum class AttrKind { Numerical, Categorical };

struct AttrInfo {
  std::string name;
  AttrKind kind = AttrKind::Categorical;
  std::size_t distinct = 0;
  std::size_t missing = 0;
  // Event-level vs process-level scope; informational only.
  std::optional<std::string> scope;
};

struct AttributeSchema {
  std::string case_column;
  std::string activity_column;
  std::string timestamp_column;
  std::vector<AttrInfo> attributes;  // context attributes, log column order

  const AttrInfo* find(const std::string& name) const;
};

struct EventLog {
  std::vector<Trace> traces;
  std::vector<std::string> context_names;
  AttributeSchema schema;

  std::size_t event_count() const;
};

struct DistStats {
  double min = 0, max = 0, mean = 0, median = 0;
};

struct LogStats {
  std::size_t instances = 0;
  std::size_t variants = 0;
  double instance_variant_ratio = 0;
  std::size_t activity_classes = 0;
  std::size_t events = 0;
  DistStats events_per_instance;
  DistStats activities_per_instance;  // distinct activities per trace
  std::size_t attributes_total = 0;
  std::size_t attributes_numerical = 0;
  std::size_t attributes_categorical = 0;
  std::vector<std::pair<std::string, std::size_t>> attribute_distinct;
};

struct ColumnMapping {
  std::string case_column;
  std::string activity_column;
  std::string timestamp_column;
};

struct CsvOptions {
  char delimiter = ',';
  std::string timestamp_format = "%Y-%m-%dT%H:%M:%S";
  std::string missing_sentinel = "NA";
};

// Parses "format" via strptime semantics, appending optional fractional
// seconds after the seconds field. Throws std::runtime_error on failure.
double parse_timestamp(const std::string& text, const std::string& format);

EventLog parse_csv(const std::string& path, const ColumnMapping& mapping,
                   const CsvOptions& options = {});

// Splits one CSV record honoring double quotes.
std::vector<std::string> split_csv_line(const std::string& line, char delimiter);

AttributeSchema infer_schema(const EventLog& log, double numeric_threshold = 1.0);

EventLog impute_missing(const EventLog& log);

EventLog filter_high_cardinality(const EventLog& log, std::size_t max_values = 600);

EventLog truncate_and_sample(const EventLog& log, std::size_t max_trace_len,
                             double sample_fraction, std::uint64_t seed);

LogStats compute_statistics(const EventLog& log);

bool parse_number(const std::string& text, double& out);

}  // namespace nap
