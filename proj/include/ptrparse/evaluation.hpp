#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "ptrparse/decoder.hpp"
#include "ptrparse/treebank.hpp"

namespace ptrparse {

struct EvalOptions {
  std::set<std::string> excluded_pos;     // tokens dropped before span extraction
  std::set<std::string> excluded_labels;  // brackets never counted

  // evalb COLLINS.prm style: punctuation deleted and TOP brackets ignored.
  static EvalOptions collins();
};

struct SentenceCounts {
  int length = 0;
  int matched = 0;
  int gold = 0;
  int predicted = 0;

  bool exact() const { return matched == gold && matched == predicted; }
};

struct EvalResult {
  std::int64_t matched = 0;
  std::int64_t gold_total = 0;
  std::int64_t pred_total = 0;
  std::int64_t exact_match = 0;
  std::int64_t sentences = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;

  static EvalResult from_counts(const std::vector<SentenceCounts>& counts);
};

// Labeled brackets (first, last, label) of every nonterminal; preterminals
// excluded, duplicates kept.
SpanSet labeled_brackets(const SyntaxTree& tree, const EvalOptions& options = {});

// Multiset comparison of labeled brackets. Throws DataError when the trees
// do not have the same number of tokens.
SentenceCounts eval_spans(const SyntaxTree& gold, const SyntaxTree& predicted,
                          const EvalOptions& options = {});

EvalResult corpus_eval(const std::vector<SyntaxTree>& gold,
                       const std::vector<SyntaxTree>& predicted, const EvalOptions& options = {},
                       std::vector<SentenceCounts>* per_sentence = nullptr);

EvalResult corpus_eval_files(const std::filesystem::path& gold, const std::filesystem::path& predicted,
                             const EvalOptions& options = {},
                             std::vector<SentenceCounts>* per_sentence = nullptr);

// Optional per-sentence lines "id\tlength\tmatched\tgold\tpred", then the
// tab-separated summary.
std::string format_report(const EvalResult& result,
                          const std::vector<SentenceCounts>* per_sentence = nullptr);

// Right-branching reference parser: the root takes the most frequent root
// label of the training trees, every other span the most frequent non-null
// label among non-root spans, and leaves carry no unary chain.
struct RightBranchingBaseline {
  std::string root_label;
  std::string span_label;

  static RightBranchingBaseline fit(const std::vector<BinaryTree>& corpus);
  SyntaxTree parse(const std::vector<TaggedWord>& words) const;
};

struct BenchResult {
  std::int64_t sentences = 0;
  std::int64_t tokens = 0;
  double seconds = 0;
  double sentences_per_second = 0;
  DecodeStats work;
};

// Parses one sentence at a time (batch size 1) and times the whole run.
BenchResult speed_benchmark(const std::vector<std::vector<TaggedWord>>& sentences,
                            const Model& model, const DecodeOptions& options = {});

std::string format_bench(const BenchResult& result);

}  // namespace ptrparse
