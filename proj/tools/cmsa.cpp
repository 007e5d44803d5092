// Command-line front end: preprocess, train-embeddings, train, evaluate, predict.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cmsa/corpus.hpp"
#include "cmsa/embed.hpp"
#include "cmsa/error.hpp"
#include "cmsa/labels.hpp"
#include "cmsa/metrics.hpp"
#include "cmsa/model_io.hpp"
#include "cmsa/rcnn.hpp"
#include "cmsa/text_format.hpp"
#include "cmsa/trainer.hpp"
#include "cmsa/vocab.hpp"

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  bool verbose = false;
};

// Writes to `<path>.tmp` and renames on commit; an uncommitted file is removed.
class OutputFile {
 public:
  explicit OutputFile(fs::path path) : path_(std::move(path)), tmp_(path_) {
    tmp_ += ".tmp";
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot write " + path_.string());
  }
  OutputFile(const OutputFile&) = delete;
  OutputFile& operator=(const OutputFile&) = delete;

  ~OutputFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      fs::remove(tmp_, ec);
    }
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed: " + path_.string());
    out_.close();
    fs::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  fs::path path_;
  fs::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

cmsa::PreprocessedCorpus load_examples(const fs::path& path, const std::string& format, const char* what) {
  auto in = open_input(path);
  try {
    auto corpus = cmsa::load_corpus(in, cmsa::parse_input_format(format));
    if (corpus.dropped_empty > 0) {
      std::cerr << what << ": dropped " << corpus.dropped_empty << " tweet(s) with no tokens left\n";
    }
    return corpus;
  } catch (const cmsa::FormatError& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

cmsa::Vocabulary load_vocab(const fs::path& path) {
  auto in = open_input(path);
  try {
    return cmsa::Vocabulary::load(in);
  } catch (const cmsa::FormatError& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  fs::path out = p;
  out += suffix;
  return out;
}

// ---- preprocess ----------------------------------------------------------

struct PreprocessArgs {
  std::string in, out, format = "tsv";
};

int run_preprocess(const PreprocessArgs& a) {
  auto in = open_input(a.in);
  std::vector<cmsa::RawTweet> raw;
  try {
    raw = cmsa::read_raw(in, cmsa::parse_input_format(a.format));
  } catch (const cmsa::FormatError& e) {
    throw std::runtime_error(a.in + ": " + e.what());
  }
  const auto corpus = cmsa::preprocess_corpus(raw);
  OutputFile out(a.out);
  cmsa::write_tokenized(out.stream(), corpus.examples);
  out.commit();
  std::cerr << "preprocess: " << raw.size() << " record(s) read, " << corpus.examples.size() << " written, "
            << corpus.dropped_empty << " dropped empty\n";
  return 0;
}

// ---- train-embeddings ----------------------------------------------------

struct EmbedArgs {
  std::string train, out, format = "tsv", mode = "skipgram";
  int min_count = 5;
  cmsa::EmbedTrainConfig cfg;
};

int run_train_embeddings(const EmbedArgs& a, const GlobalOptions& g) {
  auto cfg = a.cfg;
  cfg.mode = cmsa::parse_embed_mode(a.mode);
  cfg.seed = g.seed;
  cfg.validate();
  const auto corpus = load_examples(a.train, a.format, "train-embeddings");
  const auto vocab = cmsa::Vocabulary::build(corpus.examples, a.min_count);
  std::cerr << "train-embeddings: " << corpus.examples.size() << " tweet(s), vocabulary " << vocab.size()
            << " (min count " << a.min_count << ")\n";

  const auto result = cmsa::train_embeddings(corpus.examples, vocab, cfg);
  if (!result.warning.empty()) std::cerr << "warning: " << result.warning << '\n';

  OutputFile out(a.out);
  cmsa::save_word2vec_text(out.stream(), result.vectors, vocab);
  OutputFile vocab_out(with_suffix(a.out, ".vocab"));
  vocab.save(vocab_out.stream());
  out.commit();
  vocab_out.commit();
  std::cerr << "train-embeddings: wrote " << a.out << '\n';
  return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string train, val, out, format = "tsv", embeddings, vocab, report, activation = "tanh";
  int min_count = 5;
  cmsa::RcnnConfig model;
  cmsa::TrainConfig cfg;
};

int run_train(const TrainArgs& a, const GlobalOptions& g) {
  auto model_cfg = a.model;
  model_cfg.activation = cmsa::parse_activation(a.activation);
  model_cfg.validate();
  auto cfg = a.cfg;
  cfg.seed = g.seed;
  cfg.validate();

  const auto train_set = load_examples(a.train, a.format, "train");
  cmsa::PreprocessedCorpus val_set;
  if (!a.val.empty()) val_set = load_examples(a.val, a.format, "validation");

  const auto vocab = a.vocab.empty() ? cmsa::Vocabulary::build(train_set.examples, a.min_count) : load_vocab(a.vocab);
  auto embeddings = cmsa::init_embeddings(vocab.size(), model_cfg.embed_dim, g.seed);
  if (!a.embeddings.empty()) {
    auto in = open_input(a.embeddings);
    try {
      const auto stats = cmsa::load_word2vec_text(in, vocab, embeddings);
      std::cerr << "train: loaded " << stats.loaded << " embedding row(s), skipped " << stats.skipped
                << " unknown word(s)\n";
    } catch (const cmsa::FormatError& e) {
      throw std::runtime_error(a.embeddings + ": " + e.what());
    }
  }
  auto params = cmsa::RcnnParams::initialize(model_cfg, std::move(embeddings), g.seed);

  if (g.verbose) {
    std::cerr << "train: " << train_set.examples.size() << " training / " << val_set.examples.size()
              << " validation tweet(s), vocabulary " << vocab.size() << ", d=" << model_cfg.embed_dim
              << " c=" << model_cfg.context_dim << " h=" << model_cfg.hidden_dim << " lr=" << cfg.lr
              << " batch=" << cfg.batch_size << " dropout=" << model_cfg.dropout_rate << '\n';
  }

  auto log_epoch = [](const cmsa::EpochRecord& r, const cmsa::RcnnParams&) {
    std::cerr << "epoch " << r.epoch << "  loss " << cmsa::format_half_up(r.train_loss, 4) << "  train acc "
              << cmsa::format_half_up(r.train_accuracy, 4);
    if (r.val_f1) std::cerr << "  val weighted F1 " << cmsa::format_half_up(*r.val_f1, 4);
    std::cerr << '\n';
    return true;
  };
  const auto result = cmsa::train(std::move(params), model_cfg, train_set.examples, val_set.examples, vocab, cfg,
                                   log_epoch);
  for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "train: best epoch " << result.report.best_epoch << " of " << result.report.epochs.size() << " ("
            << cmsa::format_half_up(result.report.wall_seconds, 1) << " s)\n";

  cmsa::ModelFile model{model_cfg, result.best, vocab.fingerprint(), g.seed};
  const fs::path report_path = a.report.empty() ? with_suffix(a.out, ".report.jsonl") : fs::path(a.report);
  OutputFile model_out(a.out);
  cmsa::save_model(model_out.stream(), model);
  OutputFile vocab_out(with_suffix(a.out, ".vocab"));
  vocab.save(vocab_out.stream());
  OutputFile report_out(report_path);
  cmsa::write_report_jsonl(report_out.stream(), result.report);
  model_out.commit();
  vocab_out.commit();
  report_out.commit();
  return 0;
}

// ---- evaluate / predict ------------------------------------------------------

struct ModelArgs {
  std::string model, vocab;
};

struct LoadedModel {
  cmsa::ModelFile file;
  cmsa::Vocabulary vocab;
};

LoadedModel load_model_with_vocab(const ModelArgs& a) {
  const fs::path vocab_path = a.vocab.empty() ? with_suffix(a.model, ".vocab") : fs::path(a.vocab);
  LoadedModel m{{}, load_vocab(vocab_path)};
  try {
    m.file = cmsa::load_checkpoint(a.model, m.vocab.fingerprint());
  } catch (const cmsa::FormatError& e) {
    throw std::runtime_error(a.model + ": " + e.what());
  }
  if (m.file.params.embeddings.rows() != static_cast<Eigen::Index>(m.vocab.size())) {
    throw std::runtime_error("model and vocabulary sizes differ");
  }
  return m;
}

struct EvalArgs {
  ModelArgs model;
  std::string data, format = "tsv", predictions, report, errors;
  bool macro = false;
};

std::map<std::string, int> read_predictions(const fs::path& path) {
  auto in = open_input(path);
  std::map<std::string, int> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (cmsa::trim_ws(line).empty()) continue;
    const auto fields = cmsa::split_on(cmsa::trim_ws(line), '\t');
    if (fields.size() < 2) throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) +
                                                    ": expected uid<TAB>label");
    const auto label = cmsa::parse_polarity(cmsa::trim_ws(fields[1]));
    if (!label) throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) + ": unknown label");
    out[std::string(cmsa::trim_ws(fields[0]))] = *label;
  }
  return out;
}

int run_evaluate(const EvalArgs& a, const GlobalOptions& g) {
  const auto data = load_examples(a.data, a.format, "evaluate");
  std::vector<int> predicted;
  if (!a.predictions.empty()) {
    const auto by_uid = read_predictions(a.predictions);
    for (const auto& ex : data.examples) {
      auto it = by_uid.find(ex.uid);
      if (it == by_uid.end()) throw std::runtime_error("no prediction for uid '" + ex.uid + "'");
      predicted.push_back(it->second);
    }
  } else {
    const auto m = load_model_with_vocab(a.model);
    for (const auto& p : cmsa::predict_all(m.file.params, m.file.config, m.vocab, data.examples, g.threads)) {
      predicted.push_back(p.label);
    }
  }

  const auto report = cmsa::evaluate(data.examples, predicted);
  std::cout << cmsa::render_report(report, a.macro);
  for (int k = 0; k < report.confusion.num_classes(); ++k) {
    if (report.per_class[k].degenerate) {
      std::cerr << "warning: class " << cmsa::polarity_name(k) << " has an empty row or column\n";
    }
  }
  if (!a.report.empty()) {
    OutputFile out(a.report);
    out.stream() << cmsa::report_to_json(report).dump(2) << '\n';
    out.commit();
  }
  if (!a.errors.empty()) {
    OutputFile out(a.errors);
    out.stream() << cmsa::render_errors(report);
    out.commit();
  }
  return 0;
}

struct PredictArgs {
  ModelArgs model;
  std::string data, format = "tsv", out;
  bool probs = false;
};

int run_predict(const PredictArgs& a, const GlobalOptions& g) {
  const auto data = load_examples(a.data, a.format, "predict");
  const auto m = load_model_with_vocab(a.model);
  const auto predictions = cmsa::predict_all(m.file.params, m.file.config, m.vocab, data.examples, g.threads);

  std::ostringstream buf;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    buf << data.examples[i].uid << '\t' << cmsa::polarity_name(p.label);
    if (a.probs) {
      for (Eigen::Index k = 0; k < p.probs.size(); ++k) buf << '\t' << cmsa::format_shortest(p.probs(k));
    }
    buf << '\n';
  }
  if (a.out.empty()) {
    std::cout << buf.str();
  } else {
    OutputFile out(a.out);
    out.stream() << buf.str();
    out.commit();
  }
  return 0;
}

// Every long flag of `sub` can also come from CMSA_<SUB>_<FLAG>.
void add_env_overrides(CLI::App* sub, const std::string& prefix) {
  for (CLI::Option* opt : sub->get_options([](CLI::Option*) { return true; })) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    std::string name = prefix + "_" + opt->get_lnames().front();
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) {
      return c == '-' ? '_' : static_cast<char>(std::toupper(c));
    });
    opt->envname(name);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentiment classification of code-mixed tweets with a recurrent convolutional network"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Seed for every random stream")->envname("CMSA_SEED");
  app.add_option("--threads", global.threads, "Worker threads for predict/evaluate")
      ->envname("CMSA_THREADS")
      ->check(CLI::PositiveNumber);
  app.add_flag("--verbose", global.verbose, "Extra diagnostics")->envname("CMSA_VERBOSE");

  const std::vector<std::string> formats = {"tsv", "conll"};

  PreprocessArgs pre;
  auto* pre_cmd = app.add_subcommand("preprocess", "Normalize raw tweets into tokenized TSV");
  pre_cmd->add_option("--in", pre.in, "Raw input file")->required();
  pre_cmd->add_option("--out", pre.out, "Tokenized output file")->required();
  pre_cmd->add_option("--format", pre.format, "Input format")->check(CLI::IsMember(formats))->capture_default_str();
  add_env_overrides(pre_cmd, "CMSA_PREPROCESS");

  EmbedArgs emb;
  auto* emb_cmd = app.add_subcommand("train-embeddings", "Train skip-gram or CBOW word vectors");
  emb_cmd->add_option("--train", emb.train, "Training tweets")->required();
  emb_cmd->add_option("--out", emb.out, "word2vec text output (vocabulary goes to <out>.vocab)")->required();
  emb_cmd->add_option("--format", emb.format)->check(CLI::IsMember(formats))->capture_default_str();
  emb_cmd->add_option("--mode", emb.mode)->check(CLI::IsMember({"skipgram", "cbow"}))->capture_default_str();
  emb_cmd->add_option("--dim", emb.cfg.dim)->capture_default_str();
  emb_cmd->add_option("--lr", emb.cfg.lr)->capture_default_str();
  emb_cmd->add_option("--window", emb.cfg.window)->capture_default_str();
  emb_cmd->add_option("--epochs", emb.cfg.epochs)->capture_default_str();
  emb_cmd->add_option("--min-count", emb.min_count)->capture_default_str()->check(CLI::PositiveNumber);
  emb_cmd->add_option("--negatives", emb.cfg.negatives)->capture_default_str();
  add_env_overrides(emb_cmd, "CMSA_TRAIN_EMBEDDINGS");

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Train the classifier with mini-batch SGD");
  tr_cmd->add_option("--train", tr.train, "Training tweets")->required();
  tr_cmd->add_option("--val", tr.val, "Validation tweets for model selection");
  tr_cmd->add_option("--out", tr.out, "Model file (vocabulary goes to <out>.vocab)")->required();
  tr_cmd->add_option("--format", tr.format)->check(CLI::IsMember(formats))->capture_default_str();
  tr_cmd->add_option("--embeddings", tr.embeddings, "Pretrained word2vec text file");
  tr_cmd->add_option("--vocab", tr.vocab, "Use this vocabulary instead of building one");
  tr_cmd->add_option("--report", tr.report, "JSONL epoch report (default <out>.report.jsonl)");
  tr_cmd->add_option("--lr", tr.cfg.lr)->capture_default_str();
  tr_cmd->add_option("--batch", tr.cfg.batch_size)->capture_default_str();
  tr_cmd->add_option("--epochs", tr.cfg.max_epochs)->capture_default_str();
  tr_cmd->add_option("--patience", tr.cfg.patience, "0 disables early stopping")->capture_default_str();
  tr_cmd->add_option("--dropout", tr.model.dropout_rate)->capture_default_str();
  tr_cmd->add_option("--hidden", tr.model.hidden_dim)->capture_default_str();
  tr_cmd->add_option("--context", tr.model.context_dim)->capture_default_str();
  tr_cmd->add_option("--dim", tr.model.embed_dim)->capture_default_str();
  tr_cmd->add_option("--activation", tr.activation)->check(CLI::IsMember({"tanh", "relu"}))->capture_default_str();
  tr_cmd->add_option("--min-count", tr.min_count)->capture_default_str()->check(CLI::PositiveNumber);
  add_env_overrides(tr_cmd, "CMSA_TRAIN");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Score predictions against gold labels");
  ev_cmd->add_option("--data", ev.data, "Gold-labelled tweets")->required();
  ev_cmd->add_option("--format", ev.format)->check(CLI::IsMember(formats))->capture_default_str();
  auto* model_opt = ev_cmd->add_option("--model", ev.model.model, "Model file");
  auto* preds_opt = ev_cmd->add_option("--predictions", ev.predictions, "uid<TAB>label file instead of a model");
  model_opt->excludes(preds_opt);
  ev_cmd->add_option("--vocab", ev.model.vocab, "Vocabulary (default <model>.vocab)");
  ev_cmd->add_option("--report", ev.report, "JSON report output");
  ev_cmd->add_option("--errors", ev.errors, "Misclassification listing output");
  ev_cmd->add_flag("--macro", ev.macro, "Also print macro averages");
  add_env_overrides(ev_cmd, "CMSA_EVALUATE");

  PredictArgs pr;
  auto* pr_cmd = app.add_subcommand("predict", "Label tweets with a trained model");
  pr_cmd->add_option("--model", pr.model.model, "Model file")->required();
  pr_cmd->add_option("--data", pr.data, "Tweets to label")->required();
  pr_cmd->add_option("--format", pr.format)->check(CLI::IsMember(formats))->capture_default_str();
  pr_cmd->add_option("--vocab", pr.model.vocab, "Vocabulary (default <model>.vocab)");
  pr_cmd->add_option("--out", pr.out, "Output file (default standard output)");
  pr_cmd->add_flag("--probs", pr.probs, "Append class probabilities");
  add_env_overrides(pr_cmd, "CMSA_PREDICT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*pre_cmd) return run_preprocess(pre);
    if (*emb_cmd) return run_train_embeddings(emb, global);
    if (*tr_cmd) return run_train(tr, global);
    if (*ev_cmd) {
      if (ev.predictions.empty() && ev.model.model.empty()) throw std::runtime_error("evaluate needs --model or --predictions");
      return run_evaluate(ev, global);
    }
    if (*pr_cmd) return run_predict(pr, global);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
