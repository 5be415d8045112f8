#include "nap/encode.hpp"

#include <cmath>
#include <stdexcept>

#include "nap/md5.hpp"
#include "json.hpp"

namespace nap {

const char* technique_name(Technique t) {
  switch (t) {
    case Technique::Ordinal: return "ordinal";
    case Technique::Binary: return "binary";
    case Technique::Onehot: return "onehot";
    case Technique::Hash: return "hash";
    case Technique::Word2vec: return "word2vec";
  }
  return "?";
}

Technique technique_from_name(const std::string& name) {
  if (name == "ordinal") return Technique::Ordinal;
  if (name == "binary") return Technique::Binary;
  if (name == "onehot") return Technique::Onehot;
  if (name == "hash") return Technique::Hash;
  if (name == "word2vec") return Technique::Word2vec;
  throw std::invalid_argument("unknown encoding technique '" + name + "'");
}

namespace {

int binary_width(std::size_t vocab_size) {
  return static_cast<int>(std::ceil(std::log2(static_cast<double>(vocab_size) + 1.0)));
}

void build_vocab(FittedEncoder& enc, const std::vector<std::string>& values) {
  for (const auto& v : values) {
    if (enc.index.emplace(v, static_cast<int>(enc.vocabulary.size()) + 1).second)
      enc.vocabulary.push_back(v);
  }
  if (enc.vocabulary.empty()) throw std::invalid_argument("empty training values");
}

}  // namespace

void FittedEncoder::apply(const std::string& value, Eigen::Ref<Eigen::RowVectorXd> out,
                          int offset) const {
  out.segment(offset, width).setZero();
  switch (technique) {
    case Technique::Ordinal: {
      auto it = index.find(value);
      out[offset] = (it == index.end()) ? 0.0 : static_cast<double>(it->second);
      break;
    }
    case Technique::Binary: {
      auto it = index.find(value);
      if (it == index.end()) break;
      int idx = it->second;  // big-endian bit pattern
      for (int b = 0; b < width; ++b)
        out[offset + width - 1 - b] = static_cast<double>((idx >> b) & 1);
      break;
    }
    case Technique::Onehot: {
      auto it = index.find(value);
      if (it != index.end()) out[offset + it->second - 1] = 1.0;
      break;
    }
    case Technique::Hash: {
      const auto bucket = md5_mod(value, static_cast<std::uint64_t>(hash_dims));
      out[offset + static_cast<int>(bucket)] = 1.0;
      break;
    }
    case Technique::Word2vec: {
      auto it = index.find(value);
      if (it != index.end()) out.segment(offset, width) = embeddings.row(it->second - 1);
      break;
    }
  }
}

Eigen::RowVectorXd FittedEncoder::apply(const std::string& value) const {
  Eigen::RowVectorXd v(width);
  apply(value, v, 0);
  return v;
}

double NumericScaler::apply(double value) const {
  if (max == min) return 0.0;
  const double x = (value - min) / (max - min);
  return std::min(1.0, std::max(0.0, x));
}

FittedEncoder fit_ordinal(const std::vector<std::string>& values, const std::string& attribute) {
  FittedEncoder enc;
  enc.technique = Technique::Ordinal;
  enc.attribute = attribute;
  build_vocab(enc, values);
  enc.width = 1;
  return enc;
}

FittedEncoder fit_binary(const std::vector<std::string>& values, const std::string& attribute) {
  FittedEncoder enc;
  enc.technique = Technique::Binary;
  enc.attribute = attribute;
  build_vocab(enc, values);
  enc.width = binary_width(enc.vocabulary.size());
  return enc;
}

FittedEncoder fit_onehot(const std::vector<std::string>& values, const std::string& attribute) {
  FittedEncoder enc;
  enc.technique = Technique::Onehot;
  enc.attribute = attribute;
  build_vocab(enc, values);
  enc.width = static_cast<int>(enc.vocabulary.size());
  return enc;
}

FittedEncoder fit_hash(const std::string& attribute, int dims) {
  if (dims < 1) throw std::invalid_argument("hash dims must be >= 1");
  FittedEncoder enc;
  enc.technique = Technique::Hash;
  enc.attribute = attribute;
  enc.hash_dims = dims;
  enc.width = dims;
  return enc;
}

NumericScaler fit_scaler(const std::vector<double>& values, const std::string& attribute) {
  if (values.empty()) throw std::invalid_argument("empty numeric values for '" + attribute + "'");
  NumericScaler s;
  s.attribute = attribute;
  s.min = values[0];
  s.max = values[0];
  for (double v : values) {
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  return s;
}

FeatureLayout build_layout(const AttributeSchema& schema, const FittedEncoder& activity,
                           const std::unordered_map<std::string, FittedEncoder>& categorical,
                           const std::unordered_map<std::string, NumericScaler>& numerical) {
  FeatureLayout layout;
  int col = 0;
  layout.blocks.push_back({BlockKind::Activity, schema.activity_column, col, activity.width});
  col += activity.width;
  layout.blocks.push_back({BlockKind::TimeDelta, schema.timestamp_column, col, 1});
  col += 1;
  for (const auto& attr : schema.attributes) {
    if (attr.kind == AttrKind::Categorical) {
      auto it = categorical.find(attr.name);
      if (it == categorical.end())
        throw std::runtime_error("no fitted encoder for attribute '" + attr.name + "'");
      layout.blocks.push_back({BlockKind::CategoricalContext, attr.name, col, it->second.width});
      col += it->second.width;
    } else {
      if (numerical.find(attr.name) == numerical.end())
        throw std::runtime_error("no fitted scaler for attribute '" + attr.name + "'");
      layout.blocks.push_back({BlockKind::NumericalContext, attr.name, col, 1});
      col += 1;
    }
  }
  layout.total_width = col;
  return layout;
}

EncodingModel fit_encoding(const EventLog& log, Technique technique, const Word2vecParams& w2v) {
  EncodingModel model;
  model.technique = technique;

  auto fit_categorical = [&](const std::string& attribute, auto value_of) {
    switch (technique) {
      case Technique::Hash:
        return fit_hash(attribute);
      case Technique::Word2vec: {
        std::vector<std::vector<std::string>> corpus;
        corpus.reserve(log.traces.size());
        for (const auto& t : log.traces) {
          std::vector<std::string> seq;
          seq.reserve(t.events.size());
          for (const auto& e : t.events) seq.push_back(value_of(e));
          corpus.push_back(std::move(seq));
        }
        return train_word2vec(corpus, attribute, w2v);
      }
      default: {
        std::vector<std::string> values;
        values.reserve(log.event_count());
        for (const auto& t : log.traces)
          for (const auto& e : t.events) values.push_back(value_of(e));
        if (technique == Technique::Ordinal) return fit_ordinal(values, attribute);
        if (technique == Technique::Binary) return fit_binary(values, attribute);
        return fit_onehot(values, attribute);
      }
    }
  };

  model.activity = fit_categorical(log.schema.activity_column,
                                   [](const Event& e) { return e.activity; });
  {
    // Label vocabulary in order of first appearance, independent of technique.
    std::unordered_map<std::string, int> seen;
    for (const auto& t : log.traces)
      for (const auto& e : t.events)
        if (seen.emplace(e.activity, 1).second) model.activity_vocabulary.push_back(e.activity);
  }

  for (std::size_t j = 0; j < log.context_names.size(); ++j) {
    const AttrInfo* info = log.schema.find(log.context_names[j]);
    if (info == nullptr)
      throw std::runtime_error("schema missing attribute '" + log.context_names[j] + "'");
    if (info->kind == AttrKind::Categorical) {
      auto value_of = [j](const Event& e) { return e.context[j].value_or(""); };
      model.categorical.emplace(info->name, fit_categorical(info->name, value_of));
    } else {
      std::vector<double> values;
      for (const auto& t : log.traces)
        for (const auto& e : t.events)
          if (e.context[j]) {
            double x;
            if (parse_number(*e.context[j], x)) values.push_back(x);
          }
      model.numerical.emplace(info->name, fit_scaler(values, info->name));
    }
  }

  std::vector<double> deltas;
  for (const auto& t : log.traces)
    for (std::size_t i = 0; i < t.events.size(); ++i)
      deltas.push_back(i == 0 ? 0.0 : t.events[i].timestamp - t.events[i - 1].timestamp);
  model.delta_scaler = fit_scaler(deltas, "__time_delta__");

  model.layout = build_layout(log.schema, model.activity, model.categorical, model.numerical);
  return model;
}

std::string encoder_to_json(const FittedEncoder& enc) {
  nlohmann::json j;
  j["technique"] = technique_name(enc.technique);
  j["attribute"] = enc.attribute;
  j["width"] = enc.width;
  if (enc.technique == Technique::Hash) {
    j["hash_dims"] = enc.hash_dims;
  } else {
    j["vocabulary"] = enc.vocabulary;
  }
  if (enc.technique == Technique::Word2vec) {
    std::vector<std::vector<double>> rows;
    for (Eigen::Index r = 0; r < enc.embeddings.rows(); ++r) {
      std::vector<double> row(enc.embeddings.cols());
      for (Eigen::Index c = 0; c < enc.embeddings.cols(); ++c) row[c] = enc.embeddings(r, c);
      rows.push_back(std::move(row));
    }
    j["embeddings"] = rows;
  }
  return j.dump(2);
}

FittedEncoder encoder_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  FittedEncoder enc;
  enc.technique = technique_from_name(j.at("technique").get<std::string>());
  enc.attribute = j.at("attribute").get<std::string>();
  enc.width = j.at("width").get<int>();
  if (enc.technique == Technique::Hash) {
    enc.hash_dims = j.at("hash_dims").get<int>();
  } else {
    enc.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    for (std::size_t i = 0; i < enc.vocabulary.size(); ++i)
      enc.index.emplace(enc.vocabulary[i], static_cast<int>(i) + 1);
  }
  if (enc.technique == Technique::Word2vec) {
    const auto rows = j.at("embeddings").get<std::vector<std::vector<double>>>();
    enc.embeddings.resize(static_cast<Eigen::Index>(rows.size()), enc.width);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int c = 0; c < enc.width; ++c) enc.embeddings(static_cast<Eigen::Index>(r), c) = rows[r][c];
  }
  return enc;
}

}  // namespace nap
