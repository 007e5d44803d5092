#include "cmsa/embed.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>

#include "cmsa/error.hpp"
#include "cmsa/random.hpp"
#include "cmsa/text_format.hpp"

namespace cmsa {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

class NegativeSamplingUpdater {
 public:
  NegativeSamplingUpdater(EmbeddingMatrix& output, const std::vector<double>& noise, int negatives,
                          std::mt19937_64& rng)
      : output_(output), noise_(noise.begin(), noise.end()), negatives_(negatives), rng_(rng) {}

  // One positive target plus `negatives` noise words against hidden vector
  // `hidden`. Updates the output vectors and returns the hidden gradient step.
  Eigen::RowVectorXd step(const Eigen::RowVectorXd& hidden, int target, double lr) {
    Eigen::RowVectorXd grad = Eigen::RowVectorXd::Zero(hidden.size());
    for (int k = 0; k <= negatives_; ++k) {
      int word = target;
      double label = 1.0;
      if (k > 0) {
        word = noise_(rng_);
        if (word == target) continue;
        label = 0.0;
      }
      auto out_row = output_.row(word);
      const double g = (label - sigmoid(hidden.dot(out_row))) * lr;
      grad.noalias() += g * out_row;
      out_row.noalias() += g * hidden;
    }
    return grad;
  }

 private:
  EmbeddingMatrix& output_;
  std::discrete_distribution<int> noise_;
  int negatives_;
  std::mt19937_64& rng_;
};

}  // namespace

EmbedMode parse_embed_mode(std::string_view name) {
  if (name == "skipgram") return EmbedMode::kSkipGram;
  if (name == "cbow") return EmbedMode::kCbow;
  throw ContractError("unknown embedding mode '" + std::string(name) + "' (expected skipgram or cbow)");
}

void EmbedTrainConfig::validate() const {
  if (dim < 1) throw ContractError("embedding dim must be >= 1");
  if (!(lr > 0.0)) throw ContractError("embedding lr must be > 0");
  if (window < 1) throw ContractError("window must be >= 1");
  if (epochs < 1) throw ContractError("epochs must be >= 1");
  if (negatives < 1) throw ContractError("negatives must be >= 1");
}

EmbeddingMatrix init_embeddings(std::size_t vocab_size, int dim, std::uint64_t seed) {
  auto rng = make_rng(seed, "embed.init");
  const double bound = 0.5 / dim;
  std::uniform_real_distribution<double> uniform(-bound, bound);
  EmbeddingMatrix m(static_cast<Eigen::Index>(vocab_size), dim);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = uniform(rng);
  }
  if (m.rows() > Vocabulary::kPad) m.row(Vocabulary::kPad).setZero();
  return m;
}

std::vector<double> noise_distribution(const Vocabulary& vocab) {
  std::vector<double> w(vocab.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (static_cast<int>(i) == Vocabulary::kPad) continue;
    w[i] = std::pow(static_cast<double>(vocab.count(static_cast<int>(i))), 0.75);
    total += w[i];
  }
  if (total > 0.0) {
    for (double& x : w) x /= total;
  }
  return w;
}

EmbedTrainResult train_embeddings(std::span<const TweetExample> corpus, const Vocabulary& vocab,
                                  const EmbedTrainConfig& cfg) {
  cfg.validate();
  EmbedTrainResult result;
  result.vectors = init_embeddings(vocab.size(), cfg.dim, cfg.seed);

  std::vector<std::vector<int>> sentences;
  std::uint64_t total_tokens = 0;
  std::uint64_t known_tokens = 0;
  for (const auto& ex : corpus) {
    auto ids = vocab.encode(ex);
    for (int id : ids) known_tokens += id != Vocabulary::kUnk;
    total_tokens += ids.size();
    sentences.push_back(std::move(ids));
  }
  if (known_tokens < 2) {
    result.warning = "fewer than 2 in-vocabulary tokens; returning initial vectors";
    return result;
  }

  EmbeddingMatrix& input = result.vectors;
  EmbeddingMatrix output = EmbeddingMatrix::Zero(input.rows(), input.cols());
  auto rng = make_rng(cfg.seed, "embed.sample");
  NegativeSamplingUpdater updater(output, noise_distribution(vocab), cfg.negatives, rng);
  std::uniform_int_distribution<int> window_size(1, cfg.window);

  const double total_steps = static_cast<double>(total_tokens) * cfg.epochs;
  std::uint64_t step = 0;
  Eigen::RowVectorXd hidden(cfg.dim);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& s : sentences) {
      const int n = static_cast<int>(s.size());
      for (int pos = 0; pos < n; ++pos, ++step) {
        const double lr = cfg.lr * (1.0 - static_cast<double>(step) / total_steps);
        const int b = window_size(rng);
        const int lo = std::max(0, pos - b);
        const int hi = std::min(n - 1, pos + b);
        if (lo == hi) continue;

        if (cfg.mode == EmbedMode::kSkipGram) {
          for (int c = lo; c <= hi; ++c) {
            if (c == pos) continue;
            hidden = input.row(s[pos]);
            input.row(s[pos]) += updater.step(hidden, s[c], lr);
          }
        } else {
          hidden.setZero();
          for (int c = lo; c <= hi; ++c) {
            if (c != pos) hidden += input.row(s[c]);
          }
          hidden /= static_cast<double>(hi - lo);
          const Eigen::RowVectorXd grad = updater.step(hidden, s[pos], lr);
          for (int c = lo; c <= hi; ++c) {
            if (c != pos) input.row(s[c]) += grad;
          }
        }
        ++result.updates;
      }
    }
  }
  result.trained = true;
  return result;
}

void save_word2vec_text(std::ostream& out, const EmbeddingMatrix& vectors, const Vocabulary& vocab) {
  if (static_cast<std::size_t>(vectors.rows()) != vocab.size()) {
    throw ContractError("embedding rows do not match vocabulary size");
  }
  out << vectors.rows() << ' ' << vectors.cols() << '\n';
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    out << vocab.word(static_cast<int>(i));
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) out << ' ' << format_shortest(vectors(i, j));
    out << '\n';
  }
}

Word2VecLoadStats load_word2vec_text(std::istream& in, const Vocabulary& vocab, EmbeddingMatrix& vectors) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(1, "missing word2vec header");
  const auto header = split_ws(line);
  if (header.size() != 2) throw FormatError(1, "expected header 'V d'");
  const auto rows = parse_int(header[0], 1);
  const auto dim = parse_int(header[1], 1);
  if (rows < 0 || dim < 1) throw FormatError(1, "bad header dimensions");
  if (dim != vectors.cols()) {
    throw FormatError(1, "file dimension " + std::to_string(dim) + " does not match expected " +
                             std::to_string(vectors.cols()));
  }

  Word2VecLoadStats stats;
  std::size_t line_no = 1;
  long long seen = 0;
  Eigen::RowVectorXd row(dim);
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (static_cast<long long>(fields.size()) != dim + 1) {
      throw FormatError(line_no, "expected " + std::to_string(dim) + " values, found " +
                                     std::to_string(fields.size() - 1));
    }
    for (long long j = 0; j < dim; ++j) row(j) = parse_double(fields[j + 1], line_no);
    ++seen;
    if (auto id = vocab.find(fields[0])) {
      vectors.row(*id) = row;
      ++stats.loaded;
    } else {
      ++stats.skipped;
    }
  }
  if (seen != rows) {
    throw FormatError(line_no, "header announces " + std::to_string(rows) + " rows, found " + std::to_string(seen));
  }
  return stats;
}

}  // namespace cmsa
