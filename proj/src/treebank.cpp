#include "ptrparse/treebank.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "ptrparse/errors.hpp"

namespace ptrparse {

SyntaxTree SyntaxTree::preterminal(std::string pos, std::string word) {
  SyntaxTree t;
  t.label = std::move(pos);
  t.word = std::move(word);
  return t;
}

SyntaxTree SyntaxTree::node(std::string label, std::vector<SyntaxTree> children) {
  SyntaxTree t;
  t.label = std::move(label);
  t.children = std::move(children);
  return t;
}

std::size_t leaf_count(const SyntaxTree& tree) {
  if (tree.is_preterminal()) return 1;
  std::size_t n = 0;
  for (const auto& c : tree.children) n += leaf_count(c);
  return n;
}

namespace {

void collect_words(const SyntaxTree& t, std::vector<TaggedWord>& out) {
  if (t.is_preterminal()) {
    out.push_back({t.word, t.label});
    return;
  }
  for (const auto& c : t.children) collect_words(c, out);
}

}  // namespace

std::vector<TaggedWord> tagged_words(const SyntaxTree& tree) {
  std::vector<TaggedWord> out;
  collect_words(tree, out);
  return out;
}

std::string strip_function_tags(std::string_view label) {
  if (label.empty() || label.front() == '-') return std::string(label);
  const auto cut = label.find_first_of("-=");
  return std::string(label.substr(0, cut));
}

// ---------------------------------------------------------------------------
// Reader

namespace {

class BracketReader {
 public:
  explicit BracketReader(std::string_view text) : text_(text) {}

  std::vector<SyntaxTree> read_all(std::vector<std::string>* warnings) {
    std::vector<SyntaxTree> trees;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) break;
      if (text_[pos_] != '(') fail("expected '('");
      const std::size_t start = pos_;
      auto tree = read_node(/*top_level=*/true);
      if (tree) {
        trees.push_back(std::move(*tree));
      } else if (warnings) {
        auto [line, col] = location(start);
        warnings->push_back("skipping empty tree at line " + std::to_string(line) +
                            ", column " + std::to_string(col));
      }
    }
    return trees;
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  std::string_view read_atom() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '(' &&
           text_[pos_] != ')')
      ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::pair<std::size_t, std::size_t> location(std::size_t offset) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    return {line, col};
  }

  [[noreturn]] void fail(const std::string& msg) const {
    auto [line, col] = location(pos_);
    throw ParseError(msg, line, col);
  }

  // Returns nothing when the subtree vanished after -NONE- pruning.
  std::optional<SyntaxTree> read_node(bool top_level) {
    ++pos_;  // '('
    skip_space();
    if (pos_ >= text_.size()) fail("unbalanced parentheses");
    std::string label;
    if (text_[pos_] != '(' && text_[pos_] != ')') label = std::string(read_atom());
    skip_space();
    if (pos_ >= text_.size()) fail("unbalanced parentheses");

    if (text_[pos_] != '(' && text_[pos_] != ')') {
      // preterminal
      if (label.empty()) fail("missing POS tag");
      std::string word(read_atom());
      skip_space();
      if (pos_ >= text_.size()) fail("unbalanced parentheses");
      if (text_[pos_] != ')') fail("expected ')' after word");
      ++pos_;
      if (label == "-NONE-") return std::nullopt;
      return SyntaxTree::preterminal(std::move(label), std::move(word));
    }

    std::vector<SyntaxTree> children;
    bool saw_child = false;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) fail("unbalanced parentheses");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      if (text_[pos_] != '(') fail("unexpected token");
      saw_child = true;
      if (auto child = read_node(false)) children.push_back(std::move(*child));
    }
    if (!saw_child) fail("empty constituent");
    if (children.empty()) return std::nullopt;
    if (label.empty()) {
      if (top_level && children.size() == 1) return std::move(children.front());
      fail("missing constituent label");
    }
    return SyntaxTree::node(strip_function_tags(label), std::move(children));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<SyntaxTree> parse_bracketed(std::string_view text, std::vector<std::string>* warnings) {
  return BracketReader(text).read_all(warnings);
}

std::vector<SyntaxTree> read_treebank(const std::filesystem::path& path,
                                      std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open treebank file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_bracketed(ss.str(), warnings);
}

namespace {

void write_into(const SyntaxTree& t, std::string& out) {
  out += '(';
  out += t.label;
  out += ' ';
  if (t.is_preterminal()) {
    out += t.word;
  } else {
    for (std::size_t i = 0; i < t.children.size(); ++i) {
      if (i) out += ' ';
      write_into(t.children[i], out);
    }
  }
  out += ')';
}

}  // namespace

std::string write_bracketed(const SyntaxTree& tree) {
  std::string out;
  write_into(tree, out);
  return out;
}

// ---------------------------------------------------------------------------
// Binarization

namespace {

class Binarizer {
 public:
  Binarizer(const BinarizeOptions& options, BinaryTree& out) : options_(options), out_(out) {}

  int build(const SyntaxTree& t) {
    const SyntaxTree* cur = &t;
    std::string chain;
    while (!cur->is_preterminal() && cur->children.size() == 1) {
      append(chain, cur->label);
      cur = &cur->children.front();
    }
    if (cur->is_preterminal()) {
      BinaryLeaf leaf{cur->word, cur->label, chain.empty() ? std::string(kNullLabel) : chain};
      out_.leaves.push_back(std::move(leaf));
      return BinaryTree::leaf_ref(static_cast<int>(out_.leaves.size()) - 1);
    }
    append(chain, cur->label);
    return build_nary(chain, cur->children.begin(), cur->children.end());
  }

 private:
  using Iter = std::vector<SyntaxTree>::const_iterator;

  void append(std::string& chain, const std::string& label) const {
    if (!chain.empty()) chain += options_.delimiter;
    chain += label;
  }

  int build_nary(const std::string& label, Iter first, Iter last) {
    const int index = static_cast<int>(out_.nodes.size());
    out_.nodes.emplace_back();
    const int first_leaf = static_cast<int>(out_.leaves.size()) + 1;
    const int left = build(*first);
    const int right = (last - first == 2) ? build(*(first + 1))
                                          : build_nary(std::string(kNullLabel), first + 1, last);
    auto& node = out_.nodes[index];
    node.left = left;
    node.right = right;
    node.first = first_leaf;
    node.last = static_cast<int>(out_.leaves.size());
    node.label = label;
    return index;
  }

  const BinarizeOptions& options_;
  BinaryTree& out_;
};

std::vector<std::string> split_chain(const std::string& label, const std::string& delimiter) {
  std::vector<std::string> parts;
  if (delimiter.empty()) return {label};
  std::size_t start = 0;
  for (;;) {
    const auto at = label.find(delimiter, start);
    if (at == std::string::npos) {
      parts.push_back(label.substr(start));
      return parts;
    }
    parts.push_back(label.substr(start, at - start));
    start = at + delimiter.size();
  }
}

SyntaxTree wrap_chain(const std::string& label, std::vector<SyntaxTree> children,
                      const std::string& delimiter) {
  const auto parts = split_chain(label, delimiter);
  SyntaxTree inner = SyntaxTree::node(parts.back(), std::move(children));
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it)
    inner = SyntaxTree::node(*it, {std::move(inner)});
  return inner;
}

void expand(const BinaryTree& tree, int ref, const DebinarizeOptions& options,
            std::vector<SyntaxTree>& out) {
  if (BinaryTree::is_leaf_ref(ref)) {
    const auto& leaf = tree.leaves.at(BinaryTree::leaf_index(ref));
    auto pre = SyntaxTree::preterminal(leaf.pos, leaf.word);
    if (leaf.unary == kNullLabel)
      out.push_back(std::move(pre));
    else
      out.push_back(wrap_chain(leaf.unary, {std::move(pre)}, options.delimiter));
    return;
  }
  const auto& node = tree.nodes.at(ref);
  if (node.label == kNullLabel) {
    expand(tree, node.left, options, out);
    expand(tree, node.right, options, out);
    return;
  }
  std::vector<SyntaxTree> children;
  expand(tree, node.left, options, children);
  expand(tree, node.right, options, children);
  out.push_back(wrap_chain(node.label, std::move(children), options.delimiter));
}

}  // namespace

BinaryTree binarize(const SyntaxTree& tree, const BinarizeOptions& options) {
  BinaryTree out;
  Binarizer(options, out).build(tree);
  return out;
}

SyntaxTree debinarize(const BinaryTree& tree, const DebinarizeOptions& options) {
  if (tree.leaves.empty()) throw TreeError("cannot debinarize an empty tree");
  std::vector<SyntaxTree> top;
  expand(tree, tree.root_ref(), options, top);
  if (top.size() == 1) return std::move(top.front());
  return SyntaxTree::node(options.fallback_root, std::move(top));
}

// ---------------------------------------------------------------------------
// Spans

SpanSet spans_of(const BinaryTree& tree) {
  SpanSet spans;
  spans.reserve(tree.nodes.size());
  for (const auto& node : tree.nodes) spans.push_back({node.first, node.last, node.label});
  return spans;
}

SpanSet unary_spans_of(const BinaryTree& tree) {
  SpanSet spans;
  for (int i = 0; i < tree.size(); ++i) {
    const auto& leaf = tree.leaves[i];
    if (leaf.unary != kNullLabel) spans.push_back({i + 1, i + 1, leaf.unary});
  }
  return spans;
}

bool is_laminar(const SpanSet& spans) {
  for (std::size_t a = 0; a < spans.size(); ++a) {
    for (std::size_t b = a + 1; b < spans.size(); ++b) {
      const auto& x = spans[a];
      const auto& y = spans[b];
      const bool disjoint = x.last < y.first || y.last < x.first;
      const bool nested = (x.first <= y.first && y.last <= x.last) ||
                          (y.first <= x.first && x.last <= y.last);
      if (!disjoint && !nested) return false;
    }
  }
  return true;
}

namespace {

class SpanAssembler {
 public:
  SpanAssembler(BinaryTree& out, const SpanSet& sorted) : out_(out), spans_(sorted) {}

  int build(int first, int last) {
    if (first == last) return BinaryTree::leaf_ref(first - 1);
    if (next_ >= spans_.size() || spans_[next_].first != first || spans_[next_].last != last)
      throw TreeError("span family is not a binary tree: missing span (" + std::to_string(first) +
                      "," + std::to_string(last) + ")");
    const int index = static_cast<int>(out_.nodes.size());
    out_.nodes.push_back({0, 0, first, last, spans_[next_].label});
    ++next_;
    int split = first;
    if (next_ < spans_.size() && spans_[next_].first == first && spans_[next_].last < last)
      split = spans_[next_].last;
    const int left = build(first, split);
    const int right = build(split + 1, last);
    out_.nodes[index].left = left;
    out_.nodes[index].right = right;
    return index;
  }

  std::size_t consumed() const { return next_; }

 private:
  BinaryTree& out_;
  const SpanSet& spans_;
  std::size_t next_ = 0;
};

}  // namespace

BinaryTree build_binary_tree(std::vector<BinaryLeaf> leaves, SpanSet spans) {
  const int n = static_cast<int>(leaves.size());
  if (n == 0) throw TreeError("tree must have at least one leaf");
  for (const auto& s : spans) {
    if (s.first < 1 || s.last > n || s.first >= s.last)
      throw TreeError("invalid internal span (" + std::to_string(s.first) + "," +
                      std::to_string(s.last) + ") for " + std::to_string(n) + " leaves");
  }
  if (static_cast<int>(spans.size()) != n - 1)
    throw TreeError("a binary tree over " + std::to_string(n) + " leaves needs " +
                    std::to_string(n - 1) + " internal spans, got " +
                    std::to_string(spans.size()));
  // (first asc, last desc) is preorder for a laminar family
  std::sort(spans.begin(), spans.end(), [](const LabeledSpan& a, const LabeledSpan& b) {
    return a.first != b.first ? a.first < b.first : a.last > b.last;
  });
  BinaryTree out;
  out.leaves = std::move(leaves);
  if (n == 1) return out;
  SpanAssembler assembler(out, spans);
  assembler.build(1, n);
  if (assembler.consumed() != spans.size())
    throw TreeError("span family is not a binary tree: unused span (" +
                    std::to_string(spans[assembler.consumed()].first) + "," +
                    std::to_string(spans[assembler.consumed()].last) + ")");
  return out;
}

namespace {

// Returns the covered (first, last) of `ref`, checking the subtree.
std::pair<int, int> check_subtree(const BinaryTree& tree, int ref, int& expected_leaf,
                                  int& expected_node) {
  if (BinaryTree::is_leaf_ref(ref)) {
    const int leaf = BinaryTree::leaf_index(ref);
    if (leaf != expected_leaf) throw TreeError("leaves are not in left-to-right order");
    ++expected_leaf;
    return {leaf + 1, leaf + 1};
  }
  if (ref != expected_node) throw TreeError("internal nodes are not in preorder");
  ++expected_node;
  const auto& node = tree.nodes.at(ref);
  const auto l = check_subtree(tree, node.left, expected_leaf, expected_node);
  const auto r = check_subtree(tree, node.right, expected_leaf, expected_node);
  if (l.first != node.first || r.second != node.last || l.second + 1 != r.first)
    throw TreeError("node span does not match its children");
  return {node.first, node.last};
}

}  // namespace

void check_binary_tree(const BinaryTree& tree) {
  const int n = tree.size();
  if (n == 0) throw TreeError("tree has no leaves");
  if (static_cast<int>(tree.nodes.size()) != n - 1)
    throw TreeError("expected " + std::to_string(n - 1) + " internal nodes, found " +
                    std::to_string(tree.nodes.size()));
  int next_leaf = 0, next_node = 0;
  const auto span = check_subtree(tree, tree.root_ref(), next_leaf, next_node);
  if (span.first != 1 || span.second != n) throw TreeError("root does not cover the sentence");
  if (next_leaf != n || next_node != n - 1) throw TreeError("unreachable leaves or nodes");
}

std::vector<BinaryLeaf> leaves_from_words(const std::vector<TaggedWord>& words) {
  std::vector<BinaryLeaf> leaves;
  leaves.reserve(words.size());
  for (const auto& w : words) leaves.push_back({w.word, w.pos, std::string(kNullLabel)});
  return leaves;
}

}  // namespace ptrparse
