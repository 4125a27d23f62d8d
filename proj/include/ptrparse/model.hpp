#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ptrparse/treebank.hpp"

namespace ptrparse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

struct ModelConfig {
  int dim = 64;              // token representation size
  int layers = 2;            // self-attention layers
  int ffn_hidden = 128;      // encoder feed-forward sublayer
  int pointing_hidden = 128; // gp / sp heads
  int label_hidden = 64;     // gc / uc heads
  int char_dim = 64;
  int char_hidden = 64;
  int max_length = 256;      // learned position embeddings; longer inputs reuse the last row

  bool operator==(const ModelConfig&) const = default;
};

// Word, character, POS and label inventories, all built from training data.
// Id 0 is UNK for words and characters and the null label for both label
// inventories.
class Vocabulary {
 public:
  static constexpr int kUnknown = 0;
  static constexpr int kNullLabelId = 0;

  static Vocabulary build(const std::vector<BinaryTree>& corpus);
  static Vocabulary from_lists(std::vector<std::string> words, std::vector<int> word_counts,
                               std::vector<std::string> chars, std::vector<std::string> pos_tags,
                               std::vector<std::string> general_labels,
                               std::vector<std::string> unary_labels);

  int word_id(std::string_view word) const;
  int char_id(std::string_view utf8_char) const;
  int pos_id(std::string_view tag) const;  // throws DataError on unknown tags
  int general_label_id(std::string_view label) const;
  int unary_label_id(std::string_view label) const;
  std::vector<int> char_ids(std::string_view word) const;

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<int>& word_counts() const { return word_counts_; }
  const std::vector<std::string>& chars() const { return chars_; }
  const std::vector<std::string>& pos_tags() const { return pos_tags_; }
  const std::vector<std::string>& general_labels() const { return general_labels_; }
  const std::vector<std::string>& unary_labels() const { return unary_labels_; }

  bool operator==(const Vocabulary& other) const;

 private:
  void index();

  std::vector<std::string> words_;
  std::vector<int> word_counts_;
  std::vector<std::string> chars_;
  std::vector<std::string> pos_tags_;
  std::vector<std::string> general_labels_;
  std::vector<std::string> unary_labels_;
  std::unordered_map<std::string, int> word_index_, char_index_, pos_index_, general_index_,
      unary_index_;
};

// Splits UTF-8 text into code points, each kept as its byte sequence.
std::vector<std::string> utf8_chars(std::string_view text);

enum class Head : int { kGeneralPointing = 0, kSingletonPointing, kGeneralLabel, kUnaryLabel };
inline constexpr std::array<const char*, 4> kHeadNames = {"gp", "sp", "gc", "uc"};

struct EncoderLayer {
  Matrix query, key, value, output;       // dim x dim
  Matrix norm1_gain, norm1_bias;          // 1 x dim
  Matrix ffn_w1, ffn_b1, ffn_w2, ffn_b2;  // dim x ffn_hidden, 1 x ffn_hidden, ...
  Matrix norm2_gain, norm2_bias;
};

// FFN(x) = ReLU(x W1 + b1) W2 + b2
struct HeadParams {
  Matrix w1, b1, w2, b2;
};

// Every trainable tensor. Vectors are stored as 1 x k matrices so that all
// tensors can be visited uniformly.
struct TensorSet {
  Matrix word_embedding;      // |words| x dim
  Matrix char_embedding;      // |chars| x char_dim
  Matrix char_input;          // char_dim x char_hidden
  Matrix char_recurrent;      // char_hidden x char_hidden
  Matrix char_bias;           // 1 x char_hidden
  Matrix char_projection;     // char_hidden x dim
  Matrix pos_embedding;       // |pos| x dim
  Matrix position_embedding;  // max_length x dim
  std::vector<EncoderLayer> layers;
  std::array<HeadParams, 4> heads;
  Matrix general_classifier;  // dim x |L_g|
  Matrix unary_classifier;    // dim x |L_u|

  HeadParams& head(Head h) { return heads[static_cast<int>(h)]; }
  const HeadParams& head(Head h) const { return heads[static_cast<int>(h)]; }

  template <typename F>
  void for_each(F&& f) {
    visit(*this, f);
  }
  template <typename F>
  void for_each(F&& f) const {
    visit(*this, f);
  }

  std::size_t parameter_count() const;
  void set_zero();

 private:
  template <typename Self, typename F>
  static void visit(Self& self, F& f) {
    f("word_embedding", self.word_embedding);
    f("char_embedding", self.char_embedding);
    f("char_input", self.char_input);
    f("char_recurrent", self.char_recurrent);
    f("char_bias", self.char_bias);
    f("char_projection", self.char_projection);
    f("pos_embedding", self.pos_embedding);
    f("position_embedding", self.position_embedding);
    for (std::size_t l = 0; l < self.layers.size(); ++l) {
      auto& layer = self.layers[l];
      const std::string p = "layers." + std::to_string(l) + ".";
      f(p + "query", layer.query);
      f(p + "key", layer.key);
      f(p + "value", layer.value);
      f(p + "output", layer.output);
      f(p + "norm1_gain", layer.norm1_gain);
      f(p + "norm1_bias", layer.norm1_bias);
      f(p + "ffn_w1", layer.ffn_w1);
      f(p + "ffn_b1", layer.ffn_b1);
      f(p + "ffn_w2", layer.ffn_w2);
      f(p + "ffn_b2", layer.ffn_b2);
      f(p + "norm2_gain", layer.norm2_gain);
      f(p + "norm2_bias", layer.norm2_bias);
    }
    for (std::size_t h = 0; h < self.heads.size(); ++h) {
      auto& head = self.heads[h];
      const std::string p = std::string("heads.") + kHeadNames[h] + ".";
      f(p + "w1", head.w1);
      f(p + "b1", head.b1);
      f(p + "w2", head.w2);
      f(p + "b2", head.b2);
    }
    f("general_classifier", self.general_classifier);
    f("unary_classifier", self.unary_classifier);
  }
};

struct ModelParams : TensorSet {
  // Xavier-uniform weights, small uniform embeddings, unit norm gains.
  static ModelParams initialize(const ModelConfig& config, const Vocabulary& vocab,
                                std::uint64_t seed);
  // Correctly shaped, all zeros.
  static ModelParams zeros(const ModelConfig& config, const Vocabulary& vocab);
};

struct Gradients : TensorSet {
  static Gradients zeros_like(const TensorSet& params);
  void add(const TensorSet& other, double scale = 1.0);
};

// Everything the model needs to know about a trained parser.
struct Model {
  ModelConfig config;
  Vocabulary vocab;
  ModelParams params;
};

// Ids for one POS-tagged sentence.
struct SentenceInput {
  std::vector<int> word_ids;
  std::vector<int> pos_ids;
  std::vector<std::vector<int>> char_ids;

  int size() const { return static_cast<int>(word_ids.size()); }
};

SentenceInput encode_input(const std::vector<TaggedWord>& tokens, const Vocabulary& vocab);

// Per-sentence model outputs. gp, sp: n x n; gc: n x |L_g|; uc: n x |L_u|.
// Every row is a probability distribution.
struct ScoreTables {
  Matrix gp, sp, gc, uc;

  int size() const { return static_cast<int>(gp.rows()); }
};

// Intermediate values of one forward pass, kept for reverse-mode gradients.
struct CharTrace {
  std::vector<int> ids;
  Matrix states;  // (len + 1) x char_hidden, row 0 is the zero initial state
};

struct NormTrace {
  Matrix normalized;  // x_hat
  Vector inv_std;     // per row
};

struct LayerTrace {
  Matrix input;
  Matrix q, k, v, attention, context;
  NormTrace norm1;
  Matrix normed1;
  Matrix ffn_pre;
  NormTrace norm2;
  Matrix output;
};

struct HeadTrace {
  Matrix pre;  // x W1 + b1
  Matrix out;  // ReLU(pre) W2 + b2
};

struct ForwardTrace {
  std::vector<CharTrace> chars;
  Matrix char_vectors;  // n x dim
  Matrix embeddings;    // e_i = char + word + pos
  std::vector<int> positions;
  std::vector<LayerTrace> layers;
  Matrix hidden;
  std::array<HeadTrace, 4> heads;
  ScoreTables tables;
};

inline constexpr double kLayerNormEpsilon = 1e-6;

// Row-wise softmax with the row maximum subtracted first.
Matrix softmax_rows(const Matrix& logits);

Vector char_encode(const std::vector<int>& char_ids, const ModelParams& params);
Vector char_encode(std::string_view word, const ModelParams& params, const Vocabulary& vocab);

Matrix embed_sentence(const SentenceInput& input, const ModelParams& params);
Matrix embed_sentence(const std::vector<TaggedWord>& tokens, const ModelParams& params,
                      const Vocabulary& vocab);

// Adds position embeddings and runs every encoder layer.
Matrix encode(const Matrix& embeddings, const ModelParams& params);

Matrix head_transform(const Matrix& hidden, Head head, const ModelParams& params);

std::pair<Matrix, Matrix> pointing_tables(const Matrix& general_states,
                                          const Matrix& singleton_states);
std::pair<Matrix, Matrix> label_tables(const Matrix& general_label_states,
                                       const Matrix& unary_label_states, const ModelParams& params);

ScoreTables forward(const SentenceInput& input, const ModelParams& params);
ScoreTables forward(const std::vector<TaggedWord>& tokens, const ModelParams& params,
                    const Vocabulary& vocab);

ForwardTrace forward_trace(const SentenceInput& input, const ModelParams& params);

}  // namespace ptrparse
