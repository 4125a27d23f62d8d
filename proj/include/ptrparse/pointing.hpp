#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ptrparse/treebank.hpp"

namespace ptrparse {

// Token `query` points at `target`; together they delimit the largest span
// that starts or ends at `query`. Positions are 1-based.
struct Pointing {
  int query = 0;
  int target = 0;
  std::string label;

  int span_first() const { return query < target ? query : target; }
  int span_last() const { return query < target ? target : query; }
  bool operator==(const Pointing&) const = default;
};

// One entry per query position 1..n, ordered by query. The last entry is the
// trivial (n -> 1) pointing carrying the root label. Empty for n = 1.
struct PointingSet {
  std::vector<Pointing> entries;

  int size() const { return static_cast<int>(entries.size()); }
  bool operator==(const PointingSet&) const = default;
};

PointingSet tree_to_pointing(const BinaryTree& tree);

enum class PointingIssue {
  kNone,
  kCoverage,      // queries are not exactly 1..n
  kOutOfRange,    // target outside 1..n
  kSelfPointing,  // target == query
  kTrivialEntry,  // entry n does not point at 1 or its label differs from the root
  kDuplicate,     // two queries induce the same span
  kMissingRoot,   // no entry induces (1, n)
  kOverlap,       // two induced spans cross
  kNotBinary,     // induced family does not form a binary tree
  kNotMaximal,    // an entry's span is not the largest span at its query
};

struct PointingDiagnostic {
  PointingIssue issue = PointingIssue::kNone;
  int first_query = 0;   // offending entries, 0 when not applicable
  int second_query = 0;
  int token = 0;         // shared token for kOverlap
  std::string message;

  bool valid() const { return issue == PointingIssue::kNone; }
};

PointingDiagnostic validate_pointing(const PointingSet& pointing);

// Throws TreeError carrying the validation message when `pointing` is invalid.
BinaryTree pointing_to_tree(const PointingSet& pointing, std::vector<BinaryLeaf> leaves);

// Debug text format, one "i -> p label" line per entry.
std::string format_pointing(const PointingSet& pointing);
PointingSet parse_pointing(std::string_view text);

}  // namespace ptrparse
