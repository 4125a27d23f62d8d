#pragma once

#include <compare>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ptrparse {

// Dummy label for spans introduced by binarization, and for leaves without a
// unary chain.
inline constexpr std::string_view kNullLabel = "\xE2\x88\x85";  // U+2205

struct TaggedWord {
  std::string word;
  std::string pos;

  bool operator==(const TaggedWord&) const = default;
};

// n-ary constituency tree. A node without children is a preterminal: `label`
// holds its POS tag and `word` the token.
struct SyntaxTree {
  std::string label;
  std::string word;
  std::vector<SyntaxTree> children;

  static SyntaxTree preterminal(std::string pos, std::string word);
  static SyntaxTree node(std::string label, std::vector<SyntaxTree> children);

  bool is_preterminal() const { return children.empty(); }
  bool operator==(const SyntaxTree&) const = default;
};

std::size_t leaf_count(const SyntaxTree& tree);
std::vector<TaggedWord> tagged_words(const SyntaxTree& tree);

struct BinaryLeaf {
  std::string word;
  std::string pos;
  std::string unary{kNullLabel};

  bool operator==(const BinaryLeaf&) const = default;
};

// Strictly binary tree over n leaves, stored as an arena. Internal nodes are
// kept in preorder so that structurally equal trees compare equal; nodes[0]
// is the root whenever n >= 2.
//
// A child reference is either a node index (>= 0) or an encoded leaf index
// (~leaf, always < 0).
struct BinaryTree {
  struct Node {
    int left = 0;
    int right = 0;
    int first = 0;  // 1-based, inclusive
    int last = 0;   // 1-based, inclusive
    std::string label;

    bool operator==(const Node&) const = default;
  };

  std::vector<BinaryLeaf> leaves;
  std::vector<Node> nodes;

  static constexpr bool is_leaf_ref(int ref) { return ref < 0; }
  static constexpr int leaf_ref(int leaf_index) { return ~leaf_index; }
  static constexpr int leaf_index(int ref) { return ~ref; }

  int size() const { return static_cast<int>(leaves.size()); }
  int root_ref() const { return nodes.empty() ? leaf_ref(0) : 0; }

  bool operator==(const BinaryTree&) const = default;
};

struct LabeledSpan {
  int first = 0;  // 1-based, inclusive
  int last = 0;   // 1-based, inclusive
  std::string label;

  int width() const { return last - first + 1; }
  auto operator<=>(const LabeledSpan&) const = default;
};

using SpanSet = std::vector<LabeledSpan>;

// Removes function tags and coindexation ("NP-SBJ-1" -> "NP", "NP=2" -> "NP").
// Labels that start with '-' ("-NONE-", "-LRB-") are left untouched.
std::string strip_function_tags(std::string_view label);

// Reads zero or more PTB trees. Function tags are stripped from nonterminals
// and -NONE- elements pruned; trees left empty by pruning are skipped and a
// message is appended to `warnings` when given. Throws ParseError.
std::vector<SyntaxTree> parse_bracketed(std::string_view text,
                                        std::vector<std::string>* warnings = nullptr);

std::vector<SyntaxTree> read_treebank(const std::filesystem::path& path,
                                      std::vector<std::string>* warnings = nullptr);

std::string write_bracketed(const SyntaxTree& tree);

struct BinarizeOptions {
  std::string delimiter = "+";
};

struct DebinarizeOptions {
  std::string delimiter = "+";
  std::string fallback_root = "TOP";
};

// Right-branching binarization with unary-chain collapsing.
BinaryTree binarize(const SyntaxTree& tree, const BinarizeOptions& options = {});

SyntaxTree debinarize(const BinaryTree& tree, const DebinarizeOptions& options = {});

// The n-1 labeled internal spans, in preorder.
SpanSet spans_of(const BinaryTree& tree);

// One (i, i, unary) span per leaf carrying a unary chain.
SpanSet unary_spans_of(const BinaryTree& tree);

bool is_laminar(const SpanSet& spans);

// Assembles the binary tree whose internal spans are exactly `spans`.
// Throws TreeError when the family is not a binary laminar family rooted at
// (1, n).
BinaryTree build_binary_tree(std::vector<BinaryLeaf> leaves, SpanSet spans);

// Throws TreeError describing the first broken structural invariant.
void check_binary_tree(const BinaryTree& tree);

std::vector<BinaryLeaf> leaves_from_words(const std::vector<TaggedWord>& words);

}  // namespace ptrparse
