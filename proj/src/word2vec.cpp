#include <cmath>
#include <random>
#include <stdexcept>

#include "nap/encode.hpp"

namespace nap {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

// CBOW with negative sampling. Context vectors are averaged, the target
// plus `negatives` noise words (unigram^0.75 distribution) drive the
// update. Input embeddings are the encoder output.
FittedEncoder train_word2vec(const std::vector<std::vector<std::string>>& corpus,
                             const std::string& attribute, const Word2vecParams& params) {
  if (corpus.empty()) throw std::invalid_argument("empty word2vec corpus");
  if (params.epochs < 1) throw std::invalid_argument("word2vec epochs must be >= 1");

  FittedEncoder enc;
  enc.technique = Technique::Word2vec;
  enc.attribute = attribute;
  enc.width = params.dims;

  std::vector<std::size_t> counts;
  for (const auto& seq : corpus)
    for (const auto& w : seq) {
      auto [it, inserted] = enc.index.emplace(w, static_cast<int>(enc.vocabulary.size()) + 1);
      if (inserted) {
        enc.vocabulary.push_back(w);
        counts.push_back(0);
      }
      ++counts[it->second - 1];
    }
  if (enc.vocabulary.empty()) throw std::invalid_argument("empty word2vec corpus");
  const int vocab = static_cast<int>(enc.vocabulary.size());

  std::mt19937_64 rng(params.seed);
  const double init = 0.5 / params.dims;
  std::uniform_real_distribution<double> uinit(-init, init);
  Eigen::MatrixXd in(vocab, params.dims);   // input embeddings
  Eigen::MatrixXd out(vocab, params.dims);  // output (context) weights
  for (Eigen::Index r = 0; r < in.rows(); ++r)
    for (Eigen::Index c = 0; c < in.cols(); ++c) in(r, c) = uinit(rng);
  out.setZero();

  // Noise distribution: unigram counts raised to 0.75.
  std::vector<double> noise(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    noise[i] = std::pow(static_cast<double>(counts[i]), 0.75);
  std::discrete_distribution<int> noise_dist(noise.begin(), noise.end());

  Eigen::RowVectorXd h(params.dims), grad_h(params.dims);
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    const double lr = std::max(1e-4, params.lr0 - epoch * params.lr_decay);
    for (const auto& seq : corpus) {
      const int n = static_cast<int>(seq.size());
      for (int pos = 0; pos < n; ++pos) {
        const int target = enc.index.at(seq[pos]) - 1;
        const int lo = std::max(0, pos - params.window);
        const int hi = std::min(n - 1, pos + params.window);
        if (hi - lo < 1) continue;  // no context words

        h.setZero();
        int ctx = 0;
        for (int i = lo; i <= hi; ++i) {
          if (i == pos) continue;
          h += in.row(enc.index.at(seq[i]) - 1);
          ++ctx;
        }
        if (ctx == 0) continue;
        h /= static_cast<double>(ctx);

        grad_h.setZero();
        for (int s = 0; s <= params.negatives; ++s) {
          int word;
          double label;
          if (s == 0) {
            word = target;
            label = 1.0;
          } else {
            word = noise_dist(rng);
            if (word == target) continue;
            label = 0.0;
          }
          const double score = sigmoid(h.dot(out.row(word)));
          const double g = lr * (label - score);
          grad_h += g * out.row(word);
          out.row(word) += g * h;
        }
        const Eigen::RowVectorXd upd = grad_h / static_cast<double>(ctx);
        for (int i = lo; i <= hi; ++i) {
          if (i == pos) continue;
          in.row(enc.index.at(seq[i]) - 1) += upd;
        }
      }
    }
  }
  enc.embeddings = std::move(in);
  return enc;
}

}  // namespace nap
