#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ptrparse/model.hpp"
#include "ptrparse/treebank.hpp"

namespace ptrparse {

struct DecodeOptions {
  // Combine log-probabilities instead of probabilities in split scores.
  bool log_space = false;
};

struct DecodeStats {
  std::int64_t spans_processed = 0;   // spans popped with j > i
  std::int64_t split_candidates = 0;  // sum of (j - i) over those spans
};

enum class LabelKind { kGeneral, kUnary };

// Score of splitting (i, j) into (i, k) and (k + 1, j); 1-based, i <= k < j.
// Throws std::out_of_range for invalid indices.
double split_score(const ScoreTables& tables, int i, int k, int j, bool log_space = false);

// argmax over k in [i, j - 1]; ties go to the smallest k.
int best_split(const ScoreTables& tables, int i, int j, const DecodeOptions& options = {});

// argmax label id at a 1-based position; ties go to the smallest id.
int assign_label(const ScoreTables& tables, int position, LabelKind kind);

// Greedy top-down decoding with a FIFO queue of spans.
BinaryTree decode(const ScoreTables& tables, const std::vector<TaggedWord>& words,
                  const std::vector<std::string>& general_labels,
                  const std::vector<std::string>& unary_labels, const DecodeOptions& options = {},
                  DecodeStats* stats = nullptr);

// forward -> decode -> debinarize
SyntaxTree parse_sentence(const std::vector<TaggedWord>& words, const Model& model,
                          const DecodeOptions& options = {}, DecodeStats* stats = nullptr);

}  // namespace ptrparse
