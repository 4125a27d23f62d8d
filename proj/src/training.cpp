#include "ptrparse/training.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "ptrparse/decoder.hpp"
#include "ptrparse/errors.hpp"
#include "ptrparse/evaluation.hpp"
#include "ptrparse/pointing.hpp"

namespace ptrparse {

TargetSet targets_from_tree(const BinaryTree& tree, const Vocabulary& vocab) {
  TargetSet t;
  const int n = tree.size();
  for (const auto& leaf : tree.leaves) t.unary_label.push_back(vocab.unary_label_id(leaf.unary));
  if (n < 2) return t;
  for (const auto& e : tree_to_pointing(tree).entries) {
    t.general_pointing.push_back(e.target);
    t.general_label.push_back(vocab.general_label_id(e.label));
  }
  for (int i = 1; i <= n; ++i) t.singleton_pointing.push_back(i);
  return t;
}

namespace {

double cross_entropy(const Matrix& probs, const std::vector<int>& targets, int offset) {
  double total = 0;
  for (std::size_t i = 0; i < targets.size(); ++i)
    total -= std::log(probs(static_cast<Eigen::Index>(i), targets[i] - offset));
  return total;
}

void check_sizes(int n, const TargetSet& targets) {
  if (targets.size() != n) throw DataError("targets do not match sentence length");
  const auto expected = static_cast<std::size_t>(n >= 2 ? n : 0);
  if (targets.general_pointing.size() > expected || targets.singleton_pointing.size() > expected ||
      targets.general_label.size() > expected)
    throw DataError("too many pointing targets for sentence length");
}

}  // namespace

LossTerms loss_terms(const ScoreTables& tables, const TargetSet& targets) {
  check_sizes(tables.size(), targets);
  LossTerms terms;
  terms.gp = cross_entropy(tables.gp, targets.general_pointing, 1);
  terms.sp = cross_entropy(tables.sp, targets.singleton_pointing, 1);
  terms.gc = cross_entropy(tables.gc, targets.general_label, 0);
  terms.uc = cross_entropy(tables.uc, targets.unary_label, 0);
  return terms;
}

double loss(const ScoreTables& tables, const TargetSet& targets) {
  return loss_terms(tables, targets).total();
}

// ---------------------------------------------------------------------------
// Reverse mode

namespace {

RowVector column_sums(const Matrix& m) { return m.colwise().sum(); }

// Softmax cross-entropy: returns the loss and turns `probs` into d(loss)/d(logits).
double softmax_xent_grad(const Matrix& logits, Matrix& probs, const std::vector<int>& targets,
                         int offset) {
  double total = 0;
  const auto rows = static_cast<Eigen::Index>(targets.size());
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double peak = logits.row(r).maxCoeff();
    const double log_z = peak + std::log((logits.row(r).array() - peak).exp().sum());
    const int target = targets[r] - offset;
    total += log_z - logits(r, target);
    probs(r, target) -= 1.0;
  }
  // rows without a target contribute nothing
  probs.bottomRows(probs.rows() - rows).setZero();
  return total;
}

Matrix layer_norm_backward(const Matrix& dy, const NormTrace& trace, const Matrix& gain,
                           Matrix& d_gain, Matrix& d_bias) {
  d_gain.row(0) += (dy.array() * trace.normalized.array()).matrix().colwise().sum();
  d_bias.row(0) += column_sums(dy);
  const Matrix dxhat = dy.array().rowwise() * gain.row(0).array();
  const auto d = static_cast<double>(dy.cols());
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double mean_dxhat = dxhat.row(r).sum() / d;
    const double mean_dot = dxhat.row(r).dot(trace.normalized.row(r)) / d;
    dx.row(r) = trace.inv_std(r) *
                (dxhat.row(r).array() - mean_dxhat - trace.normalized.row(r).array() * mean_dot)
                    .matrix();
  }
  return dx;
}

Matrix relu_mask(const Matrix& pre) { return (pre.array() > 0.0).cast<double>().matrix(); }

// Returns d(loss)/d(input rows of the head).
Matrix head_backward(const HeadTrace& t, const HeadParams& p, const Matrix& hidden,
                     const Matrix& d_out, HeadParams& g) {
  const Matrix act = t.pre.cwiseMax(0.0);
  g.w2 += act.transpose() * d_out;
  g.b2.row(0) += column_sums(d_out);
  const Matrix d_pre = (d_out * p.w2.transpose()).cwiseProduct(relu_mask(t.pre));
  g.w1 += hidden.transpose() * d_pre;
  g.b1.row(0) += column_sums(d_pre);
  return d_pre * p.w1.transpose();
}

Matrix layer_backward(const LayerTrace& t, const EncoderLayer& p, const Matrix& d_output,
                      EncoderLayer& g) {
  // output = LN2(normed1 + FFN(normed1))
  const Matrix d_res2 = layer_norm_backward(d_output, t.norm2, p.norm2_gain, g.norm2_gain, g.norm2_bias);
  const Matrix act = t.ffn_pre.cwiseMax(0.0);
  g.ffn_w2 += act.transpose() * d_res2;
  g.ffn_b2.row(0) += column_sums(d_res2);
  const Matrix d_pre = (d_res2 * p.ffn_w2.transpose()).cwiseProduct(relu_mask(t.ffn_pre));
  g.ffn_w1 += t.normed1.transpose() * d_pre;
  g.ffn_b1.row(0) += column_sums(d_pre);
  const Matrix d_normed1 = d_res2 + d_pre * p.ffn_w1.transpose();

  // normed1 = LN1(input + attention(input) W_o)
  const Matrix d_res1 = layer_norm_backward(d_normed1, t.norm1, p.norm1_gain, g.norm1_gain, g.norm1_bias);
  g.output += t.context.transpose() * d_res1;
  const Matrix d_context = d_res1 * p.output.transpose();
  const Matrix d_attention = d_context * t.v.transpose();
  const Matrix d_v = t.attention.transpose() * d_context;
  const Eigen::VectorXd row_dot = (d_attention.cwiseProduct(t.attention)).rowwise().sum();
  Matrix d_scores = t.attention.cwiseProduct(d_attention.colwise() - row_dot);
  d_scores *= 1.0 / std::sqrt(static_cast<double>(t.input.cols()));
  const Matrix d_q = d_scores * t.k;
  const Matrix d_k = d_scores.transpose() * t.q;
  g.query += t.input.transpose() * d_q;
  g.key += t.input.transpose() * d_k;
  g.value += t.input.transpose() * d_v;
  return d_res1 + d_q * p.query.transpose() + d_k * p.key.transpose() + d_v * p.value.transpose();
}

void check_finite(const TensorSet& grads) {
  grads.for_each([](const std::string& name, const Matrix& m) {
    if (!m.allFinite()) throw TrainingError("non-finite gradient in " + name);
  });
}

}  // namespace

double accumulate_gradients(const SentenceInput& input, const ModelParams& p,
                            const TargetSet& targets, Gradients& into, double scale) {
  const int n = input.size();
  check_sizes(n, targets);
  const ForwardTrace t = forward_trace(input, p);

  const Matrix& h_gp = t.heads[0].out;
  const Matrix& h_sp = t.heads[1].out;
  const Matrix& h_gc = t.heads[2].out;
  const Matrix& h_uc = t.heads[3].out;

  Matrix d_gp = t.tables.gp, d_sp = t.tables.sp, d_gc = t.tables.gc, d_uc = t.tables.uc;
  double total = 0;
  total += softmax_xent_grad(h_gp * h_gp.transpose(), d_gp, targets.general_pointing, 1);
  total += softmax_xent_grad(h_sp * h_sp.transpose(), d_sp, targets.singleton_pointing, 1);
  total += softmax_xent_grad(h_gc * p.general_classifier, d_gc, targets.general_label, 0);
  total += softmax_xent_grad(h_uc * p.unary_classifier, d_uc, targets.unary_label, 0);
  if (!std::isfinite(total)) throw TrainingError("non-finite loss");

  Gradients g = Gradients::zeros_like(p);
  std::array<Matrix, 4> d_heads;
  d_heads[0] = d_gp * h_gp + d_gp.transpose() * h_gp;
  d_heads[1] = d_sp * h_sp + d_sp.transpose() * h_sp;
  d_heads[2] = d_gc * p.general_classifier.transpose();
  d_heads[3] = d_uc * p.unary_classifier.transpose();
  g.general_classifier += h_gc.transpose() * d_gc;
  g.unary_classifier += h_uc.transpose() * d_uc;

  Matrix d_hidden = Matrix::Zero(t.hidden.rows(), t.hidden.cols());
  for (int h = 0; h < 4; ++h)
    d_hidden += head_backward(t.heads[h], p.heads[h], t.hidden, d_heads[h], g.heads[h]);

  Matrix d_x = std::move(d_hidden);
  for (int l = static_cast<int>(p.layers.size()) - 1; l >= 0; --l)
    d_x = layer_backward(t.layers[l], p.layers[l], d_x, g.layers[l]);

  for (int i = 0; i < n; ++i) {
    const RowVector d_e = d_x.row(i);
    g.position_embedding.row(t.positions[i]) += d_e;
    g.word_embedding.row(input.word_ids[i]) += d_e;
    g.pos_embedding.row(input.pos_ids[i]) += d_e;

    // char vector = h_T W_proj, h_s = tanh(x_s W_in + h_{s-1} W_rec + b)
    const auto& chars = t.chars[i];
    const auto len = static_cast<Eigen::Index>(chars.ids.size());
    g.char_projection += chars.states.row(len).transpose() * d_e;
    RowVector d_h = d_e * p.char_projection.transpose();
    for (Eigen::Index s = len; s >= 1; --s) {
      const RowVector h = chars.states.row(s);
      const RowVector d_a = d_h.array() * (1.0 - h.array().square());
      g.char_input += p.char_embedding.row(chars.ids[s - 1]).transpose() * d_a;
      g.char_recurrent += chars.states.row(s - 1).transpose() * d_a;
      g.char_bias.row(0) += d_a;
      g.char_embedding.row(chars.ids[s - 1]) += d_a * p.char_input.transpose();
      d_h = d_a * p.char_recurrent.transpose();
    }
  }
  check_finite(g);
  into.add(g, scale);
  return total;
}

BackwardResult backward(const SentenceInput& input, const ModelParams& params,
                        const TargetSet& targets) {
  BackwardResult r{0, Gradients::zeros_like(params)};
  r.loss = accumulate_gradients(input, params, targets, r.gradients);
  return r;
}

// ---------------------------------------------------------------------------
// Optimizer

void Hyperparams::validate() const {
  if (!(learning_rate > 0) || warmup_steps < 0 || batch_size < 1 || epochs < 1 ||
      !(beta1 > 0 && beta1 < 1) || !(beta2 > 0 && beta2 < 1) || !(epsilon > 0) ||
      unk_probability < 0 || unk_probability > 1 || threads < 1)
    throw DataError("invalid hyperparameters");
}

double learning_rate_at(int step, const Hyperparams& hyper) {
  if (hyper.warmup_steps <= 0 || step >= hyper.warmup_steps) return hyper.learning_rate;
  return hyper.learning_rate * static_cast<double>(step) / hyper.warmup_steps;
}

AdamState AdamState::zeros_like(const ModelParams& params) {
  return {Gradients::zeros_like(params), Gradients::zeros_like(params)};
}

void adam_step(ModelParams& params, const Gradients& gradients, int step,
               const Hyperparams& hyper, AdamState& state) {
  if (step < 1) throw DataError("Adam steps are 1-based");
  const double lr = learning_rate_at(step, hyper);
  const double correction1 = 1.0 - std::pow(hyper.beta1, step);
  const double correction2 = 1.0 - std::pow(hyper.beta2, step);

  std::vector<const Matrix*> grads;
  std::vector<Matrix*> first, second;
  gradients.for_each([&](const std::string&, const Matrix& m) { grads.push_back(&m); });
  state.first_moment.for_each([&](const std::string&, Matrix& m) { first.push_back(&m); });
  state.second_moment.for_each([&](const std::string&, Matrix& m) { second.push_back(&m); });
  std::size_t i = 0;
  params.for_each([&](const std::string&, Matrix& p) {
    const Matrix& g = *grads[i];
    Matrix& m = *first[i];
    Matrix& v = *second[i];
    ++i;
    m = hyper.beta1 * m + (1.0 - hyper.beta1) * g;
    v = hyper.beta2 * v + (1.0 - hyper.beta2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / correction1) /
                 ((v.array() / correction2).sqrt() + hyper.epsilon);
  });
}

std::string format_epoch(const EpochRecord& r) {
  std::ostringstream out;
  out.precision(6);
  out << r.epoch << '\t' << std::fixed << r.mean_loss << '\t' << r.dev_f1 << '\t'
      << std::scientific << r.learning_rate;
  return out.str();
}

// ---------------------------------------------------------------------------
// Training loop

namespace {

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t bound) { return static_cast<std::size_t>(unit() * bound); }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

template <typename F>
void parallel_for(int count, int threads, F&& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += threads) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double dev_f1(const Model& model, const std::vector<SyntaxTree>& dev) {
  std::vector<SyntaxTree> predicted;
  predicted.reserve(dev.size());
  for (const auto& gold : dev) predicted.push_back(parse_sentence(tagged_words(gold), model));
  return corpus_eval(dev, predicted).f1;
}

}  // namespace

TrainResult train(const std::vector<BinaryTree>& corpus, const std::vector<SyntaxTree>& dev,
                  const ModelConfig& config, const Hyperparams& hyper,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  if (corpus.empty()) throw DataError("training corpus is empty");
  hyper.validate();

  Model model{config, Vocabulary::build(corpus), {}};
  model.params = ModelParams::initialize(config, model.vocab, hyper.seed);
  const auto& vocab = model.vocab;

  std::vector<SentenceInput> inputs;
  std::vector<TargetSet> targets;
  for (const auto& tree : corpus) {
    std::vector<TaggedWord> words;
    for (const auto& leaf : tree.leaves) words.push_back({leaf.word, leaf.pos});
    inputs.push_back(encode_input(words, vocab));
    targets.push_back(targets_from_tree(tree, vocab));
  }

  Random rng(hyper.seed ^ 0x9E3779B97F4A7C15ULL);
  AdamState adam = AdamState::zeros_like(model.params);
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  result.model = model;
  int step = 0;
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      const int batch = static_cast<int>(std::min<std::size_t>(hyper.batch_size, order.size() - start));
      std::vector<SentenceInput> batch_inputs;
      for (int b = 0; b < batch; ++b) {
        SentenceInput in = inputs[order[start + b]];
        for (auto& id : in.word_ids) {
          if (id != Vocabulary::kUnknown && vocab.word_counts()[id] < hyper.unk_min_count &&
              rng.unit() < hyper.unk_probability)
            id = Vocabulary::kUnknown;
        }
        batch_inputs.push_back(std::move(in));
      }

      std::vector<Gradients> slots(batch);
      std::vector<double> losses(batch, 0.0);
      parallel_for(batch, hyper.threads, [&](int b) {
        slots[b] = Gradients::zeros_like(model.params);
        losses[b] = accumulate_gradients(batch_inputs[b], model.params, targets[order[start + b]],
                                         slots[b]);
      });
      Gradients grads = Gradients::zeros_like(model.params);
      for (int b = 0; b < batch; ++b) {
        grads.add(slots[b], 1.0 / batch);
        epoch_loss += losses[b];
      }
      if (!std::isfinite(epoch_loss))
        throw TrainingError("training diverged at epoch " + std::to_string(epoch) + ", step " +
                            std::to_string(step + 1));
      adam_step(model.params, grads, ++step, hyper, adam);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.mean_loss = epoch_loss / static_cast<double>(corpus.size());
    record.learning_rate = learning_rate_at(step, hyper);
    record.dev_f1 = dev.empty() ? 0.0 : dev_f1(model, dev);
    result.log.push_back(record);
    if (on_epoch) on_epoch(record);

    if (dev.empty() || record.dev_f1 > result.best_dev_f1) {
      result.best_dev_f1 = record.dev_f1;
      result.best_epoch = epoch;
      result.model.params = model.params;
    }
  }
  return result;
}

double pointing_accuracy(const Model& model, const std::vector<BinaryTree>& corpus,
                         bool include_self) {
  long correct = 0, total = 0;
  for (const auto& tree : corpus) {
    if (tree.size() < 2) continue;
    std::vector<TaggedWord> words;
    for (const auto& leaf : tree.leaves) words.push_back({leaf.word, leaf.pos});
    auto tables = forward(words, model.params, model.vocab);
    if (!include_self) tables.gp.diagonal().setConstant(-1.0);
    const auto pointing = tree_to_pointing(tree);
    for (const auto& e : pointing.entries) {
      Eigen::Index best = 0;
      tables.gp.row(e.query - 1).maxCoeff(&best);
      correct += (best + 1 == e.target);
      ++total;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(correct) / total;
}

}  // namespace ptrparse
