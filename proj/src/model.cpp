#include "ptrparse/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "ptrparse/errors.hpp"

namespace ptrparse {

// ---------------------------------------------------------------------------
// Vocabulary

std::vector<std::string> utf8_chars(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xF0)
      len = 4;
    else if (lead >= 0xE0)
      len = 3;
    else if (lead >= 0xC0)
      len = 2;
    len = std::min(len, text.size() - i);
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

namespace {

const std::string kUnknownToken = "<unk>";

std::vector<std::string> with_reserved_first(const std::string& reserved,
                                             const std::map<std::string, int>& counts) {
  std::vector<std::string> out{reserved};
  for (const auto& [key, count] : counts)
    if (key != reserved) out.push_back(key);
  return out;
}

void build_index(const std::vector<std::string>& items,
                 std::unordered_map<std::string, int>& index) {
  index.clear();
  for (int i = 0; i < static_cast<int>(items.size()); ++i) index.emplace(items[i], i);
}

}  // namespace

Vocabulary Vocabulary::build(const std::vector<BinaryTree>& corpus) {
  std::map<std::string, int> words, chars, tags, general, unary;
  for (const auto& tree : corpus) {
    for (const auto& leaf : tree.leaves) {
      ++words[leaf.word];
      for (auto& c : utf8_chars(leaf.word)) ++chars[c];
      ++tags[leaf.pos];
      ++unary[leaf.unary];
    }
    for (const auto& node : tree.nodes) ++general[node.label];
  }
  const std::string null_label(kNullLabel);
  Vocabulary v;
  v.words_ = with_reserved_first(kUnknownToken, words);
  v.word_counts_.push_back(0);
  for (std::size_t i = 1; i < v.words_.size(); ++i) v.word_counts_.push_back(words[v.words_[i]]);
  v.chars_ = with_reserved_first(kUnknownToken, chars);
  for (const auto& [tag, count] : tags) v.pos_tags_.push_back(tag);
  v.general_labels_ = with_reserved_first(null_label, general);
  v.unary_labels_ = with_reserved_first(null_label, unary);
  v.index();
  return v;
}

Vocabulary Vocabulary::from_lists(std::vector<std::string> words, std::vector<int> word_counts,
                                  std::vector<std::string> chars,
                                  std::vector<std::string> pos_tags,
                                  std::vector<std::string> general_labels,
                                  std::vector<std::string> unary_labels) {
  if (words.empty() || chars.empty() || general_labels.empty() || unary_labels.empty())
    throw DataError("vocabulary lists must contain their reserved first entry");
  if (word_counts.size() != words.size()) throw DataError("word counts do not match words");
  if (general_labels.front() != kNullLabel || unary_labels.front() != kNullLabel)
    throw DataError("label inventories must start with the null label");
  Vocabulary v;
  v.words_ = std::move(words);
  v.word_counts_ = std::move(word_counts);
  v.chars_ = std::move(chars);
  v.pos_tags_ = std::move(pos_tags);
  v.general_labels_ = std::move(general_labels);
  v.unary_labels_ = std::move(unary_labels);
  v.index();
  return v;
}

void Vocabulary::index() {
  build_index(words_, word_index_);
  build_index(chars_, char_index_);
  build_index(pos_tags_, pos_index_);
  build_index(general_labels_, general_index_);
  build_index(unary_labels_, unary_index_);
}

int Vocabulary::word_id(std::string_view word) const {
  auto it = word_index_.find(std::string(word));
  return it == word_index_.end() ? kUnknown : it->second;
}

int Vocabulary::char_id(std::string_view c) const {
  auto it = char_index_.find(std::string(c));
  return it == char_index_.end() ? kUnknown : it->second;
}

int Vocabulary::pos_id(std::string_view tag) const {
  auto it = pos_index_.find(std::string(tag));
  if (it == pos_index_.end()) throw DataError("unknown POS tag: " + std::string(tag));
  return it->second;
}

int Vocabulary::general_label_id(std::string_view label) const {
  auto it = general_index_.find(std::string(label));
  if (it == general_index_.end()) throw DataError("unknown span label: " + std::string(label));
  return it->second;
}

int Vocabulary::unary_label_id(std::string_view label) const {
  auto it = unary_index_.find(std::string(label));
  if (it == unary_index_.end()) throw DataError("unknown unary label: " + std::string(label));
  return it->second;
}

std::vector<int> Vocabulary::char_ids(std::string_view word) const {
  std::vector<int> ids;
  for (const auto& c : utf8_chars(word)) ids.push_back(char_id(c));
  return ids;
}

bool Vocabulary::operator==(const Vocabulary& o) const {
  return words_ == o.words_ && word_counts_ == o.word_counts_ && chars_ == o.chars_ &&
         pos_tags_ == o.pos_tags_ && general_labels_ == o.general_labels_ &&
         unary_labels_ == o.unary_labels_;
}

SentenceInput encode_input(const std::vector<TaggedWord>& tokens, const Vocabulary& vocab) {
  SentenceInput in;
  in.word_ids.reserve(tokens.size());
  in.pos_ids.reserve(tokens.size());
  in.char_ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    in.word_ids.push_back(vocab.word_id(t.word));
    in.pos_ids.push_back(vocab.pos_id(t.pos));
    in.char_ids.push_back(vocab.char_ids(t.word));
  }
  return in;
}

// ---------------------------------------------------------------------------
// Parameters

std::size_t TensorSet::parameter_count() const {
  std::size_t total = 0;
  for_each([&](const std::string&, const Matrix& m) { total += static_cast<std::size_t>(m.size()); });
  return total;
}

void TensorSet::set_zero() {
  for_each([](const std::string&, Matrix& m) { m.setZero(); });
}

namespace {

// Portable uniform doubles from a 64-bit Mersenne twister.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  double operator()(double bound) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return (2.0 * unit - 1.0) * bound;
  }

 private:
  std::mt19937_64 engine_;
};

void fill(Matrix& m, Uniform& rng, double bound) {
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng(bound);
}

void xavier(Matrix& m, Uniform& rng) {
  fill(m, rng, std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols())));
}

ModelParams shaped(const ModelConfig& c, const Vocabulary& vocab) {
  const auto nw = static_cast<Eigen::Index>(vocab.words().size());
  const auto nc = static_cast<Eigen::Index>(vocab.chars().size());
  const auto np = static_cast<Eigen::Index>(vocab.pos_tags().size());
  const auto ng = static_cast<Eigen::Index>(vocab.general_labels().size());
  const auto nu = static_cast<Eigen::Index>(vocab.unary_labels().size());
  ModelParams p;
  p.word_embedding = Matrix::Zero(nw, c.dim);
  p.char_embedding = Matrix::Zero(nc, c.char_dim);
  p.char_input = Matrix::Zero(c.char_dim, c.char_hidden);
  p.char_recurrent = Matrix::Zero(c.char_hidden, c.char_hidden);
  p.char_bias = Matrix::Zero(1, c.char_hidden);
  p.char_projection = Matrix::Zero(c.char_hidden, c.dim);
  p.pos_embedding = Matrix::Zero(np, c.dim);
  p.position_embedding = Matrix::Zero(c.max_length, c.dim);
  p.layers.resize(c.layers);
  for (auto& l : p.layers) {
    l.query = l.key = l.value = l.output = Matrix::Zero(c.dim, c.dim);
    l.norm1_gain = l.norm1_bias = l.norm2_gain = l.norm2_bias = Matrix::Zero(1, c.dim);
    l.ffn_w1 = Matrix::Zero(c.dim, c.ffn_hidden);
    l.ffn_b1 = Matrix::Zero(1, c.ffn_hidden);
    l.ffn_w2 = Matrix::Zero(c.ffn_hidden, c.dim);
    l.ffn_b2 = Matrix::Zero(1, c.dim);
  }
  for (int h = 0; h < 4; ++h) {
    const int hidden = h < 2 ? c.pointing_hidden : c.label_hidden;
    auto& head = p.heads[h];
    head.w1 = Matrix::Zero(c.dim, hidden);
    head.b1 = Matrix::Zero(1, hidden);
    head.w2 = Matrix::Zero(hidden, c.dim);
    head.b2 = Matrix::Zero(1, c.dim);
  }
  p.general_classifier = Matrix::Zero(c.dim, ng);
  p.unary_classifier = Matrix::Zero(c.dim, nu);
  return p;
}

}  // namespace

ModelParams ModelParams::zeros(const ModelConfig& config, const Vocabulary& vocab) {
  if (config.dim < 1 || config.layers < 0 || config.ffn_hidden < 1 || config.pointing_hidden < 1 ||
      config.label_hidden < 1 || config.char_dim < 1 || config.char_hidden < 1 ||
      config.max_length < 1)
    throw DataError("model dimensions must be positive");
  return shaped(config, vocab);
}

ModelParams ModelParams::initialize(const ModelConfig& config, const Vocabulary& vocab,
                                    std::uint64_t seed) {
  ModelParams p = zeros(config, vocab);
  Uniform rng(seed);
  const double embed_bound = 0.1 * std::sqrt(3.0);
  fill(p.word_embedding, rng, embed_bound);
  fill(p.char_embedding, rng, embed_bound);
  xavier(p.char_input, rng);
  xavier(p.char_recurrent, rng);
  xavier(p.char_projection, rng);
  fill(p.pos_embedding, rng, embed_bound);
  fill(p.position_embedding, rng, embed_bound);
  for (auto& l : p.layers) {
    xavier(l.query, rng);
    xavier(l.key, rng);
    xavier(l.value, rng);
    xavier(l.output, rng);
    xavier(l.ffn_w1, rng);
    xavier(l.ffn_w2, rng);
    l.norm1_gain.setOnes();
    l.norm2_gain.setOnes();
  }
  for (auto& head : p.heads) {
    xavier(head.w1, rng);
    xavier(head.w2, rng);
  }
  xavier(p.general_classifier, rng);
  xavier(p.unary_classifier, rng);
  return p;
}

Gradients Gradients::zeros_like(const TensorSet& params) {
  Gradients g;
  static_cast<TensorSet&>(g) = params;
  g.set_zero();
  return g;
}

void Gradients::add(const TensorSet& other, double scale) {
  std::vector<const Matrix*> sources;
  other.for_each([&](const std::string&, const Matrix& m) { sources.push_back(&m); });
  std::size_t i = 0;
  for_each([&](const std::string& name, Matrix& m) {
    const Matrix& src = *sources.at(i++);
    if (src.rows() != m.rows() || src.cols() != m.cols())
      throw DataError("gradient shape mismatch for " + name);
    m += scale * src;
  });
}

// ---------------------------------------------------------------------------
// Forward pass

Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double peak = logits.row(r).maxCoeff();
    out.row(r) = (logits.row(r).array() - peak).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

namespace {

Matrix add_row(Matrix m, const Matrix& row) {
  m.rowwise() += row.row(0);
  return m;
}

Matrix relu(const Matrix& m) { return m.cwiseMax(0.0); }

Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias, NormTrace& trace) {
  const auto n = x.rows();
  const auto d = static_cast<double>(x.cols());
  trace.normalized.resize(n, x.cols());
  trace.inv_std.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mean = x.row(r).sum() / d;
    const RowVector centered = x.row(r).array() - mean;
    const double var = centered.squaredNorm() / d;
    trace.inv_std(r) = 1.0 / std::sqrt(var + kLayerNormEpsilon);
    trace.normalized.row(r) = centered * trace.inv_std(r);
  }
  Matrix y = trace.normalized.array().rowwise() * gain.row(0).array();
  return add_row(std::move(y), bias);
}

CharTrace run_chars(const std::vector<int>& ids, const ModelParams& p) {
  CharTrace t;
  t.ids = ids;
  const auto hidden = p.char_recurrent.rows();
  t.states = Matrix::Zero(static_cast<Eigen::Index>(ids.size()) + 1, hidden);
  for (std::size_t s = 0; s < ids.size(); ++s) {
    const auto step = static_cast<Eigen::Index>(s);
    RowVector a = p.char_embedding.row(ids[s]) * p.char_input +
                  t.states.row(step) * p.char_recurrent + p.char_bias.row(0);
    t.states.row(step + 1) = a.array().tanh();
  }
  return t;
}

LayerTrace run_layer(const Matrix& x, const EncoderLayer& l) {
  LayerTrace t;
  t.input = x;
  t.q = x * l.query;
  t.k = x * l.key;
  t.v = x * l.value;
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.cols()));
  t.attention = softmax_rows((t.q * t.k.transpose()) * scale);
  t.context = t.attention * t.v;
  const Matrix residual1 = x + t.context * l.output;
  t.normed1 = layer_norm(residual1, l.norm1_gain, l.norm1_bias, t.norm1);
  t.ffn_pre = add_row(t.normed1 * l.ffn_w1, l.ffn_b1);
  const Matrix residual2 = t.normed1 + add_row(relu(t.ffn_pre) * l.ffn_w2, l.ffn_b2);
  t.output = layer_norm(residual2, l.norm2_gain, l.norm2_bias, t.norm2);
  return t;
}

HeadTrace run_head(const Matrix& h, const HeadParams& p) {
  HeadTrace t;
  t.pre = add_row(h * p.w1, p.b1);
  t.out = add_row(relu(t.pre) * p.w2, p.b2);
  return t;
}

std::vector<int> clamped_positions(int n, const ModelParams& p) {
  const int rows = static_cast<int>(p.position_embedding.rows());
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = std::min(i, rows - 1);
  return out;
}

}  // namespace

Vector char_encode(const std::vector<int>& char_ids, const ModelParams& params) {
  const auto trace = run_chars(char_ids, params);
  const RowVector out = trace.states.row(trace.states.rows() - 1) * params.char_projection;
  return out.transpose();
}

Vector char_encode(std::string_view word, const ModelParams& params, const Vocabulary& vocab) {
  return char_encode(vocab.char_ids(word), params);
}

Matrix embed_sentence(const SentenceInput& input, const ModelParams& p) {
  const int n = input.size();
  Matrix e(n, p.word_embedding.cols());
  for (int i = 0; i < n; ++i) {
    e.row(i) = char_encode(input.char_ids[i], p).transpose() + p.word_embedding.row(input.word_ids[i]) +
               p.pos_embedding.row(input.pos_ids[i]);
  }
  return e;
}

Matrix embed_sentence(const std::vector<TaggedWord>& tokens, const ModelParams& params,
                      const Vocabulary& vocab) {
  return embed_sentence(encode_input(tokens, vocab), params);
}

Matrix encode(const Matrix& embeddings, const ModelParams& params) {
  const auto positions = clamped_positions(static_cast<int>(embeddings.rows()), params);
  Matrix x = embeddings;
  for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) += params.position_embedding.row(positions[i]);
  for (const auto& layer : params.layers) x = run_layer(x, layer).output;
  return x;
}

Matrix head_transform(const Matrix& hidden, Head head, const ModelParams& params) {
  return run_head(hidden, params.head(head)).out;
}

std::pair<Matrix, Matrix> pointing_tables(const Matrix& general_states,
                                          const Matrix& singleton_states) {
  return {softmax_rows(general_states * general_states.transpose()),
          softmax_rows(singleton_states * singleton_states.transpose())};
}

std::pair<Matrix, Matrix> label_tables(const Matrix& general_label_states,
                                       const Matrix& unary_label_states, const ModelParams& params) {
  return {softmax_rows(general_label_states * params.general_classifier),
          softmax_rows(unary_label_states * params.unary_classifier)};
}

ForwardTrace forward_trace(const SentenceInput& input, const ModelParams& p) {
  const int n = input.size();
  if (n < 1) throw DataError("cannot score an empty sentence");
  ForwardTrace t;
  const auto dim = p.word_embedding.cols();
  t.char_vectors.resize(n, dim);
  t.embeddings.resize(n, dim);
  t.chars.reserve(n);
  for (int i = 0; i < n; ++i) {
    t.chars.push_back(run_chars(input.char_ids[i], p));
    const auto& states = t.chars.back().states;
    t.char_vectors.row(i) = states.row(states.rows() - 1) * p.char_projection;
    t.embeddings.row(i) = t.char_vectors.row(i) + p.word_embedding.row(input.word_ids[i]) +
                          p.pos_embedding.row(input.pos_ids[i]);
  }
  t.positions = clamped_positions(n, p);
  Matrix x = t.embeddings;
  for (int i = 0; i < n; ++i) x.row(i) += p.position_embedding.row(t.positions[i]);
  t.layers.reserve(p.layers.size());
  for (const auto& layer : p.layers) {
    t.layers.push_back(run_layer(x, layer));
    x = t.layers.back().output;
  }
  t.hidden = std::move(x);
  for (int h = 0; h < 4; ++h) t.heads[h] = run_head(t.hidden, p.heads[h]);
  std::tie(t.tables.gp, t.tables.sp) = pointing_tables(t.heads[0].out, t.heads[1].out);
  std::tie(t.tables.gc, t.tables.uc) = label_tables(t.heads[2].out, t.heads[3].out, p);
  return t;
}

ScoreTables forward(const SentenceInput& input, const ModelParams& params) {
  return forward_trace(input, params).tables;
}

ScoreTables forward(const std::vector<TaggedWord>& tokens, const ModelParams& params,
                    const Vocabulary& vocab) {
  return forward(encode_input(tokens, vocab), params);
}

}  // namespace ptrparse
