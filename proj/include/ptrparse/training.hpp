#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ptrparse/model.hpp"
#include "ptrparse/treebank.hpp"

namespace ptrparse {

// Supervision for one sentence. Pointing targets are 1-based positions, label
// targets are inventory ids. For n = 1 only `unary_label` is filled.
struct TargetSet {
  std::vector<int> general_pointing;    // p_i; entry n is 1
  std::vector<int> singleton_pointing;  // i for every i
  std::vector<int> general_label;       // l_i; entry n is the root label
  std::vector<int> unary_label;

  int size() const { return static_cast<int>(unary_label.size()); }
};

TargetSet targets_from_tree(const BinaryTree& tree, const Vocabulary& vocab);

struct LossTerms {
  double gp = 0, sp = 0, gc = 0, uc = 0;
  double total() const { return gp + sp + gc + uc; }
};

LossTerms loss_terms(const ScoreTables& tables, const TargetSet& targets);
double loss(const ScoreTables& tables, const TargetSet& targets);

struct BackwardResult {
  double loss = 0;
  Gradients gradients;
};

// Exact gradients of the summed cross-entropy loss for one sentence.
// Throws TrainingError naming the first tensor with a non-finite gradient.
BackwardResult backward(const SentenceInput& input, const ModelParams& params,
                        const TargetSet& targets);

// Adds scale * d(loss)/d(params) into `into` and returns the loss.
double accumulate_gradients(const SentenceInput& input, const ModelParams& params,
                            const TargetSet& targets, Gradients& into, double scale = 1.0);

struct Hyperparams {
  double learning_rate = 0.004;
  int warmup_steps = 100;
  int batch_size = 8;
  int epochs = 50;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int unk_min_count = 2;         // words rarer than this are dropped to UNK...
  double unk_probability = 0.5;  // ...with this probability while training
  int threads = 1;

  void validate() const;
};

// Linear warm-up from 0 to the base rate, constant afterwards. `step` is 1-based.
double learning_rate_at(int step, const Hyperparams& hyper);

struct AdamState {
  Gradients first_moment;
  Gradients second_moment;

  static AdamState zeros_like(const ModelParams& params);
};

void adam_step(ModelParams& params, const Gradients& gradients, int step,
               const Hyperparams& hyper, AdamState& state);

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0;
  double dev_f1 = 0;
  double learning_rate = 0;
};

// "epoch\tmean_loss\tdev_f1\tlr"
std::string format_epoch(const EpochRecord& record);

struct TrainResult {
  Model model;  // parameters of the best dev-F1 epoch
  std::vector<EpochRecord> log;
  int best_epoch = 0;
  double best_dev_f1 = -1;
};

// Mini-batch Adam over `corpus`. After every epoch the dev set is parsed and
// the parameters with the best labeled F1 are kept (the last epoch when `dev`
// is empty).
TrainResult train(const std::vector<BinaryTree>& corpus, const std::vector<SyntaxTree>& dev,
                  const ModelConfig& config, const Hyperparams& hyper,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

// Fraction of gp targets (all n entries per sentence) that are the row argmax.
// The diagonal is skipped unless include_self is set: no target is ever the
// query itself and the decoder never reads gp(i, i).
double pointing_accuracy(const Model& model, const std::vector<BinaryTree>& corpus,
                         bool include_self = false);

}  // namespace ptrparse
