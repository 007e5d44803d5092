// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// binding criterion fails. Criterion 8 needs the task data (CMSA_SENTIMIX_DIR)
// and never affects the exit status.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cmsa/corpus.hpp"
#include "cmsa/embed.hpp"
#include "cmsa/metrics.hpp"
#include "cmsa/model_io.hpp"
#include "cmsa/preprocess.hpp"
#include "cmsa/rcnn.hpp"
#include "cmsa/trainer.hpp"
#include "cmsa/vocab.hpp"
#include "fixtures.hpp"
#include "gradcheck.hpp"

using namespace cmsa;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kTableTolerance = 0.00005;
constexpr double kGradientTolerance = 1e-4;
constexpr double kGradientStep = 1e-5;
constexpr int kGradientInstances = 25;
constexpr double kFixtureTolerance = 1e-10;
constexpr int kOverfitEpochs = 200;
constexpr double kSoftmaxTolerance = 1e-9;
constexpr double kCosineGap = 0.2;
constexpr double kSentimixFloor = 0.60;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::string> notes;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1 ------------------------------------------------------------------------
Outcome metric_reconstruction() {
  Outcome o;
  o.pass = true;
  std::ostringstream detail;
  struct Run {
    const char* name;
    const std::vector<std::vector<std::int64_t>>& counts;
    fixtures::Triple table;
    const fixtures::Triple* class_table;
  };
  const Run runs[] = {{"skipgram", fixtures::kSkipGramCounts, fixtures::kTableSkipGram, fixtures::kTableSkipGramClass},
                      {"cbow", fixtures::kCbowCounts, fixtures::kTableCbow, fixtures::kTableCbowClass}};
  int misses = 0;
  for (const auto& run : runs) {
    const auto m = ConfusionMatrix::from_rows(run.counts);
    const auto w = weighted_metrics(m);
    const double got[3] = {w.precision, w.recall, w.f1};
    const double want[3] = {run.table.p, run.table.r, run.table.f};
    const char* names[3] = {"P", "R", "F1"};
    for (int i = 0; i < 3; ++i) {
      const double diff = std::abs(got[i] - want[i]);
      const bool ok = diff <= kTableTolerance;
      if (!ok) ++misses;
      o.pass = o.pass && ok;
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s weighted %-2s %.6f vs %.4f |diff| %.6f %s (4-decimal truncation %s)", run.name,
                    names[i], got[i], want[i], diff, ok ? "ok" : "OUT OF TOLERANCE",
                    std::floor(got[i] * 1e4) / 1e4 == want[i] ? "matches" : "differs");
      o.notes.push_back(buf);
    }
    const auto cm = class_metrics(m);
    for (int k = 0; k < 3; ++k) {
      const double vals[3] = {cm[k].precision, cm[k].recall, cm[k].f1};
      const double tab[3] = {run.class_table[k].p, run.class_table[k].r, run.class_table[k].f};
      for (int i = 0; i < 3; ++i) {
        if (std::stod(format_half_up(vals[i], 2)) != tab[i]) {
          o.pass = false;
          ++misses;
          o.notes.push_back(std::string(run.name) + " class " + std::string(polarity_name(k)) + " " + names[i] + " " +
                            format_half_up(vals[i], 2) + " vs " + fmt("%.2f", tab[i]));
        }
      }
    }
  }
  detail << (misses == 0 ? "all 6 averages within 5e-5, all 18 class values match at 2 decimals"
                         : std::to_string(misses) + " published value(s) outside tolerance");
  o.detail = detail.str();
  return o;
}

// 2 ------------------------------------------------------------------------
Outcome gradient_correctness() {
  Outcome o;
  double worst = 0;
  std::size_t coords = 0;
  std::string where;
  for (int s = 0; s < kGradientInstances; ++s) {
    const auto r = gradcheck::check(gradcheck::random_instance(1000 + s), kGradientStep);
    coords += r.coordinates;
    if (r.worst > worst) {
      worst = r.worst;
      where = "seed " + std::to_string(1000 + s) + " " + r.where;
    }
  }
  o.pass = worst < kGradientTolerance;
  o.detail = std::to_string(kGradientInstances) + " instances, " + std::to_string(coords) +
             " coordinates, worst relative error " + fmt("%.3e", worst) + " (" + where + ")";
  return o;
}

// 3 ------------------------------------------------------------------------
Outcome forward_fixture() {
  Outcome o;
  const std::vector<int> ids = {2, 3};
  const auto t = forward(fixtures::symmetric_params(), fixtures::symmetric_config(), ids);
  double err = std::max(std::abs(t.probs(0) - 0.5), std::abs(t.probs(1) - 0.5));
  const std::vector<int> ids3 = {2, 3, 4};
  const auto a = forward(fixtures::asymmetric_params(), fixtures::asymmetric_config(), ids3);
  for (int k = 0; k < 3; ++k) err = std::max(err, std::abs(a.probs(k) - fixtures::kAsymProbs[k]));
  o.pass = err <= kFixtureTolerance;
  o.detail = "2-word/2-dim instance p=(" + fmt("%.12f", t.probs(0)) + ", " + fmt("%.12f", t.probs(1)) +
             "), asymmetric 3-class variant included, max error " + fmt("%.2e", err);
  return o;
}

// 4 ------------------------------------------------------------------------
Outcome overfit_capacity() {
  Outcome o;
  const auto data = fixtures::marker_corpus();
  const auto vocab = Vocabulary::build(data, 1);
  const auto cfg = fixtures::marker_config();
  auto params = RcnnParams::initialize(cfg, init_embeddings(vocab.size(), cfg.embed_dim, 1), 1);
  TrainConfig tc;  // lr 0.6, batch 64
  tc.max_epochs = kOverfitEpochs;
  tc.patience = 0;
  int reached = 0;
  train(std::move(params), cfg, data, {}, vocab, tc, [&](const EpochRecord& rec, const RcnnParams& p) {
    const auto preds = predict_all(p, cfg, vocab, data);
    for (std::size_t i = 0; i < data.size(); ++i)
      if (preds[i].label != *data[i].label) return true;
    reached = rec.epoch;
    return false;
  });
  o.pass = reached > 0;
  o.detail = reached > 0 ? "32 examples at 100% training accuracy after epoch " + std::to_string(reached)
                         : "did not reach 100% within " + std::to_string(kOverfitEpochs) + " epochs";
  return o;
}

// 5 ------------------------------------------------------------------------
Outcome tokenizer_suite() {
  Outcome o;
  using S = std::vector<std::string>;
  auto texts = [](const std::string& raw) {
    S out;
    for (const auto& t : preprocess_tweet(RawTweet{"u", raw, std::nullopt}).tokens) out.push_back(t.text);
    return out;
  };
  struct Case {
    std::string name;
    std::function<bool()> check;
  };
  const std::vector<Case> cases = {
      {"lowercase LoveIsLove", [] { return lowercase("LoveIsLove") == "loveislove"; }},
      {"lowercase empty", [] { return lowercase("").empty(); }},
      {"lowercase fixed point", [] { return lowercase("été😊") == "été😊"; }},
      {"url see https ://t.co/x", [] { return strip_urls({"see", "https", "://t.co/x"}) == S{"see"}; }},
      {"url no-op", [] { return strip_urls({"no", "links", "here"}) == S{"no", "links", "here"}; }},
      {"url bare http", [] { return strip_urls({"http"}).empty(); }},
      {"mention @ bomanirani", [] { return fold_mentions_topics({"@", "bomanirani", "hi"}) == S{"MENTION", "hi"}; }},
      {"topic # LoveIsLove", [] { return fold_mentions_topics({"#", "LoveIsLove"}) == S{"TOPIC"}; }},
      {"markers no-op", [] { return fold_mentions_topics({"a", "b"}) == S{"a", "b"}; }},
      {"emoji he😊", [] { return split_emoji("he😊") == S{"he", "😊"}; }},
      {"emoji 😊☹", [] { return split_emoji("😊☹") == S{"😊", "☹"}; }},
      {"emoji plain", [] { return split_emoji("plain") == S{"plain"}; }},
      {"garbage â€¦", [] { return is_garbage("â€¦"); }},
      {"garbage à ¥¥", [] { return is_garbage("à") && is_garbage("¥¥"); }},
      {"garbage keeps hello", [] { return !is_garbage("hello"); }},
      {"garbage U+FFFD pair", [] { return is_garbage("\xEF\xBF\xBD\xEF\xBF\xBD"); }},
      {"tweet RT @ bomanirani Good😊 https t.co/x",
       [&] { return texts("RT @ bomanirani Good😊 https t.co/x") == S{"rt", "MENTION", "good", "😊"}; }},
      {"tweet empty", [&] { return texts("").empty(); }},
      {"tweet # LoveIsLove", [&] { return texts("# LoveIsLove") == S{"TOPIC"}; }},
  };
  int failed = 0;
  for (const auto& c : cases) {
    if (!c.check()) {
      ++failed;
      o.notes.push_back("failed: " + c.name);
    }
  }
  o.pass = failed == 0;
  o.detail = std::to_string(cases.size() - failed) + "/" + std::to_string(cases.size()) + " golden cases";
  return o;
}

// 6 ------------------------------------------------------------------------
Outcome invariant_suites() {
  Outcome o;
  o.pass = true;
  auto record = [&](const std::string& name, int checked, int failures) {
    if (failures > 0) o.pass = false;
    o.notes.push_back(name + ": " + std::to_string(checked - failures) + "/" + std::to_string(checked));
  };

  {  // softmax normalization
    int bad = 0;
    for (int s = 0; s < 300; ++s) {
      auto in = gradcheck::random_instance(s);
      in.params.output_weight *= 1.0 + 10.0 * (s % 7);
      const auto p = forward(in.params, in.cfg, in.ids).probs;
      if (std::abs(p.sum() - 1.0) >= kSoftmaxTolerance || p.minCoeff() < 0 || p.maxCoeff() > 1) ++bad;
    }
    record("softmax normalization", 300, bad);
  }
  {  // pool dominance and argmax routing
    int bad = 0;
    for (int s = 0; s < 300; ++s) {
      const auto in = gradcheck::random_instance(s);
      const auto t = forward(in.params, in.cfg, in.ids);
      const auto g = backward(in.params, in.cfg, t, in.gold);
      for (int u = 0; u < in.cfg.hidden_dim; ++u) {
        const int win = t.pool_argmax[u];
        bool ok = t.pooled(u) == t.hidden(win, u);
        for (Eigen::Index i = 0; i < t.hidden.rows(); ++i) ok = ok && t.pooled(u) >= t.hidden(i, u);
        ok = ok && (g.hidden_weight.row(u) - g.hidden_bias(u) * t.features.row(win)).norm() < 1e-12;
        if (!ok) {
          ++bad;
          break;
        }
      }
    }
    record("pool dominance and argmax routing", 300, bad);
  }
  {  // context locality
    int bad = 0, checked = 0;
    std::mt19937_64 rng(5);
    for (int s = 0; s < 300; ++s) {
      const auto in = gradcheck::random_instance(s);
      const int n = static_cast<int>(in.ids.size());
      if (n < 2) continue;
      ++checked;
      const int i = std::uniform_int_distribution<int>(0, n - 1)(rng);
      auto changed = in.ids;
      changed[i] = changed[i] == 2 ? 5 : 2;
      const auto a = forward(in.params, in.cfg, in.ids);
      const auto b = forward(in.params, in.cfg, changed);
      bool ok = true;
      for (int r = 0; r <= i; ++r) ok = ok && a.left_context.row(r) == b.left_context.row(r);
      for (int r = i; r < n; ++r) ok = ok && a.right_context.row(r) == b.right_context.row(r);
      if (!ok) ++bad;
    }
    record("context locality", checked, bad);
  }
  {  // padding invariance
    int bad = 0;
    std::mt19937_64 rng(6);
    for (int s = 0; s < 300; ++s) {
      const auto in = gradcheck::random_instance(s);
      auto padded = in.ids;
      for (int k = std::uniform_int_distribution<int>(1, 4)(rng); k > 0; --k) {
        const auto at = std::uniform_int_distribution<std::size_t>(0, padded.size())(rng);
        padded.insert(padded.begin() + static_cast<std::ptrdiff_t>(at), Vocabulary::kPad);
      }
      if (forward(in.params, in.cfg, in.ids).probs != forward(in.params, in.cfg, padded).probs) ++bad;
    }
    record("padding invariance", 300, bad);
  }
  {  // vocabulary determinism under corpus permutation
    auto corpus = fixtures::cooccurrence_corpus(3);
    corpus.resize(400);
    const auto base = Vocabulary::build(corpus, 2);
    std::ostringstream base_text;
    base.save(base_text);
    std::mt19937_64 rng(7);
    int bad = 0;
    for (int t = 0; t < 50; ++t) {
      std::shuffle(corpus.begin(), corpus.end(), rng);
      const auto v = Vocabulary::build(corpus, 2);
      std::ostringstream text;
      v.save(text);
      if (!(v == base) || text.str() != base_text.str()) ++bad;
    }
    record("vocabulary permutation determinism", 50, bad);
  }
  {  // byte-exact serialization round trips
    int bad = 0;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> val(0.0, 1.0);
    for (int s = 0; s < 100; ++s) {
      auto in = gradcheck::random_instance(s);
      for_each_tensor(in.params, [&](const char*, auto& t) {
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] *= std::pow(10.0, static_cast<int>(rng() % 9) - 4);
      });
      const ModelFile m{in.cfg, in.params, rng(), static_cast<std::uint64_t>(s)};
      std::ostringstream first;
      save_model(first, m);
      std::istringstream in_text(first.str());
      const auto back = load_model(in_text);
      std::ostringstream second;
      save_model(second, back);
      bool ok = first.str() == second.str() && back.params.embeddings == m.params.embeddings &&
                back.params.hidden_weight == m.params.hidden_weight;

      std::vector<TweetExample> words = {fixtures::example("0", {"a", "b", "c"}, 0)};
      const auto v = Vocabulary::build(words, 1);
      EmbeddingMatrix e(v.size(), 1 + s % 6);
      for (Eigen::Index i = 0; i < e.size(); ++i) e.data()[i] = val(rng) * std::pow(10.0, s % 11 - 5);
      std::ostringstream w1;
      save_word2vec_text(w1, e, v);
      EmbeddingMatrix loaded = EmbeddingMatrix::Zero(e.rows(), e.cols());
      std::istringstream w_in(w1.str());
      load_word2vec_text(w_in, v, loaded);
      std::ostringstream w2;
      save_word2vec_text(w2, loaded, v);
      ok = ok && loaded == e && w1.str() == w2.str();
      if (!ok) ++bad;
    }
    record("serialization round trips (model, word2vec)", 100, bad);
  }
  {  // preprocessing idempotence
    const std::vector<std::string> pieces = {"Hello", "@", "#", "@Foo", "#Bar", "http", "t.co/x", "😊", "he😊",
                                             "😊☹", "â€¦", "RT", "MENTION", "x@y", "👍🏽", "🇮🇳", "é", "https:x"};
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
    int bad = 0;
    for (int t = 0; t < 1000; ++t) {
      std::string text;
      for (int k = static_cast<int>(rng() % 8); k > 0; --k) text += pieces[pick(rng)] + (rng() % 3 ? " " : "");
      const auto once = preprocess_tweet(RawTweet{"u", text, std::nullopt});
      const auto twice = preprocess_tweet(RawTweet{"u", detokenize(once), std::nullopt});
      if (twice.tokens != once.tokens) ++bad;
    }
    record("preprocessing idempotence", 1000, bad);
  }
  o.detail = std::to_string(o.notes.size()) + " property suites";
  return o;
}

// 7 ------------------------------------------------------------------------
Outcome embedding_sanity() {
  Outcome o;
  o.pass = true;
  const auto corpus = fixtures::cooccurrence_corpus(2024);
  const auto vocab = Vocabulary::build(corpus, 5);
  std::ostringstream detail;
  for (auto mode : {EmbedMode::kSkipGram, EmbedMode::kCbow}) {
    EmbedTrainConfig cfg;  // 300 dims, lr 0.05, window 5, 5 epochs
    cfg.mode = mode;
    const auto m = train_embeddings(corpus, vocab, cfg).vectors;
    auto cosine = [&](int a, int b) { return m.row(a).dot(m.row(b)) / (m.row(a).norm() * m.row(b).norm()); };
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> word(2, static_cast<int>(vocab.size()) - 1);
    double sum = 0;
    for (int i = 0; i < 100; ++i) {
      int a = word(rng), b = word(rng);
      while (b == a) b = word(rng);
      sum += cosine(a, b);
    }
    const double ab = cosine(vocab.lookup("alpha"), vocab.lookup("beta"));
    const double gap = ab - sum / 100;
    o.pass = o.pass && gap >= kCosineGap;
    detail << (mode == EmbedMode::kSkipGram ? "skipgram" : "cbow") << " gap " << fmt("%.3f", gap) << " ";
    o.notes.push_back(std::string(mode == EmbedMode::kSkipGram ? "skipgram" : "cbow") + ": cos(alpha,beta) " +
                      fmt("%.4f", ab) + ", random-pair mean " + fmt("%.4f", sum / 100));
  }
  o.detail = detail.str() + "(need >= 0.2)";
  return o;
}

// 8 ------------------------------------------------------------------------
std::optional<fs::path> find_split(const fs::path& dir, const std::vector<std::string>& stems) {
  for (const auto& stem : stems)
    for (const char* ext : {".tsv", ".conll", ".txt"})
      if (fs::exists(dir / (stem + ext))) return dir / (stem + ext);
  return std::nullopt;
}

std::optional<Outcome> sentimix() {
  const char* env = std::getenv("CMSA_SENTIMIX_DIR");
  if (!env || !*env) return std::nullopt;
  Outcome o;
  const fs::path dir(env);
  const auto train_path = find_split(dir, {"train"});
  const auto val_path = find_split(dir, {"val", "dev", "validation"});
  const auto test_path = find_split(dir, {"test"});
  if (!train_path || !test_path) {
    o.detail = "expected train.* and test.* (.tsv or .conll) under " + dir.string();
    return o;
  }
  auto load = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return load_corpus(in, p.extension() == ".tsv" ? InputFormat::kTsv : InputFormat::kConll).examples;
  };
  const auto train_set = load(*train_path);
  const auto val_set = val_path ? load(*val_path) : std::vector<TweetExample>{};
  const auto test_set = load(*test_path);
  const auto vocab = Vocabulary::build(train_set, 5);
  EmbedTrainConfig ecfg;
  const auto emb = train_embeddings(train_set, vocab, ecfg).vectors;
  RcnnConfig cfg;
  auto params = RcnnParams::initialize(cfg, emb, 1);
  const auto result = train(std::move(params), cfg, train_set, val_set, vocab, TrainConfig{});
  std::vector<int> preds;
  for (const auto& p : predict_all(result.best, cfg, vocab, test_set, 4)) preds.push_back(p.label);
  const auto report = evaluate(test_set, preds);
  o.pass = report.weighted.f1 >= kSentimixFloor;
  o.detail = "test weighted F1 " + format_half_up(report.weighted.f1, 4) + " (floor 0.60)";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "metric reconstruction", metric_reconstruction}, {2, "gradient correctness", gradient_correctness},
      {3, "forward golden fixture", forward_fixture},      {4, "overfit capacity", overfit_capacity},
      {5, "tokenizer golden suite", tokenizer_suite},      {6, "invariant suites", invariant_suites},
      {7, "embedding sanity", embedding_sanity},
  };
  bool all = true;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    std::printf("%s  %d  %-24s %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    for (const auto& n : o.notes) std::printf("         %s\n", n.c_str());
  }
  std::optional<Outcome> eight;
  try {
    eight = sentimix();
  } catch (const std::exception& e) {
    eight = Outcome{false, std::string("exception: ") + e.what(), {}};
  }
  if (!eight) {
    std::printf("SKIP  8  %-24s set CMSA_SENTIMIX_DIR to the task data to run (non-binding)\n", "task-data F1");
  } else {
    std::printf("%s  8  %-24s %s (non-binding)\n", eight->pass ? "PASS" : "FAIL", "task-data F1", eight->detail.c_str());
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
