#include "cmsa/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "cmsa/error.hpp"
#include "cmsa/text_format.hpp"
#include "cmsa/vocab.hpp"

namespace cmsa {

namespace {

constexpr std::string_view kMagic = "#rcnn-model v1";
constexpr int kTensorCount = 11;

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::string next(const char* what) {
    std::string line;
    if (!std::getline(in_, line)) throw FormatError(line_no_ + 1, std::string("unexpected end of file, expected ") + what);
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  // Reads "<key> <value>" and checks the key.
  std::string field(std::string_view key) {
    const std::string line = next(std::string(key).c_str());
    const auto parts = split_ws(line);
    if (parts.size() != 2 || parts[0] != key) {
      throw FormatError(line_no_, "expected '" + std::string(key) + " <value>'");
    }
    return std::string(parts[1]);
  }

  int int_field(std::string_view key) { return static_cast<int>(parse_int(field(key), line_no_)); }

  std::size_t line() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

template <typename Tensor>
void write_tensor(std::ostream& out, std::string_view name, const Tensor& t) {
  out << name << ' ' << t.rows() << ' ' << t.cols() << '\n';
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_g17(t(i, j));
    }
    out << '\n';
  }
}

template <typename Tensor>
void read_tensor(LineReader& reader, std::string_view name, Tensor& t) {
  const std::string header = reader.next("tensor header");
  const auto parts = split_ws(header);
  if (parts.size() != 3 || parts[0] != name) {
    throw FormatError(reader.line(), "expected tensor '" + std::string(name) + " <rows> <cols>'");
  }
  const auto rows = parse_int(parts[1], reader.line());
  const auto cols = parse_int(parts[2], reader.line());
  if (rows != t.rows() || cols != t.cols()) {
    throw FormatError(reader.line(), "tensor " + std::string(name) + " shape " + std::to_string(rows) + "x" +
                                         std::to_string(cols) + " disagrees with the header configuration");
  }
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string line = reader.next("tensor row");
    const auto values = split_ws(line);
    if (static_cast<long long>(values.size()) != cols) {
      throw FormatError(reader.line(), "expected " + std::to_string(cols) + " values");
    }
    for (Eigen::Index j = 0; j < cols; ++j) t(i, j) = parse_double(values[j], reader.line());
  }
}

}  // namespace

void save_model(std::ostream& out, const ModelFile& model) {
  const auto& cfg = model.config;
  model.params.check_shapes(cfg);
  out << kMagic << '\n';
  out << "embed_dim " << cfg.embed_dim << '\n';
  out << "context_dim " << cfg.context_dim << '\n';
  out << "hidden_dim " << cfg.hidden_dim << '\n';
  out << "num_classes " << cfg.num_classes << '\n';
  out << "activation " << activation_name(cfg.activation) << '\n';
  out << "dropout_rate " << format_g17(cfg.dropout_rate) << '\n';
  out << "vocab_size " << model.params.embeddings.rows() << '\n';
  out << "vocab_hash " << format_fingerprint(model.vocab_fingerprint) << '\n';
  out << "seed " << model.seed << '\n';
  out << "tensors " << kTensorCount << '\n';
  for_each_tensor(model.params, [&out](std::string_view name, const auto& t) { write_tensor(out, name, t); });
}

ModelFile load_model(std::istream& in) {
  LineReader reader(in);
  if (reader.next("header") != kMagic) throw FormatError(1, "not an rcnn model file (bad header)");

  ModelFile model;
  auto& cfg = model.config;
  cfg.embed_dim = reader.int_field("embed_dim");
  cfg.context_dim = reader.int_field("context_dim");
  cfg.hidden_dim = reader.int_field("hidden_dim");
  cfg.num_classes = reader.int_field("num_classes");
  try {
    cfg.activation = parse_activation(reader.field("activation"));
  } catch (const ContractError& e) {
    throw FormatError(reader.line(), e.what());
  }
  cfg.dropout_rate = parse_double(reader.field("dropout_rate"), reader.line());
  try {
    cfg.validate();
  } catch (const ContractError& e) {
    throw FormatError(reader.line(), e.what());
  }
  const int vocab_size = reader.int_field("vocab_size");
  if (vocab_size < 0) throw FormatError(reader.line(), "negative vocab_size");

  const std::string hash = reader.field("vocab_hash");
  std::size_t used = 0;
  try {
    model.vocab_fingerprint = std::stoull(hash, &used, 16);
  } catch (const std::exception&) {
    used = 0;
  }
  if (hash.size() != 16 || used != hash.size()) throw FormatError(reader.line(), "bad vocab_hash");

  model.seed = parse_uint(reader.field("seed"), reader.line());
  if (reader.int_field("tensors") != kTensorCount) {
    throw FormatError(reader.line(), "expected " + std::to_string(kTensorCount) + " tensors");
  }

  model.params = RcnnParams::zeros(cfg, static_cast<std::size_t>(vocab_size));
  for_each_tensor(model.params, [&reader](std::string_view name, auto& t) { read_tensor(reader, name, t); });
  return model;
}

void save_checkpoint(const ModelFile& model, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    save_model(out, model);
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

ModelFile load_checkpoint(const std::filesystem::path& path, std::optional<std::uint64_t> expected_vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  ModelFile model = load_model(in);
  if (expected_vocab && *expected_vocab != model.vocab_fingerprint) {
    throw ContractError("vocabulary mismatch: model was trained with vocab " +
                        format_fingerprint(model.vocab_fingerprint) + ", got " + format_fingerprint(*expected_vocab));
  }
  return model;
}

}  // namespace cmsa
