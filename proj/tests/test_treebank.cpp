#include <doctest.h>

#include "ptrparse/errors.hpp"
#include "ptrparse/treebank.hpp"
#include "ptrparse/verification.hpp"

using namespace ptrparse;

namespace {

const std::string kNull(kNullLabel);

SyntaxTree one(const std::string& text) {
  auto trees = parse_bracketed(text);
  REQUIRE(trees.size() == 1);
  return trees.front();
}

}  // namespace

TEST_CASE("reads the running example") {
  const auto t = one(verify::kTennisTree);
  CHECK(t.label == "S");
  CHECK(leaf_count(t) == 5);
  CHECK(t.children.size() == 3);
  const auto words = tagged_words(t);
  CHECK(words[1] == TaggedWord{"enjoys", "VBZ"});
  CHECK(words[4] == TaggedWord{".", "."});
}

TEST_CASE("writes what it reads") {
  const auto t = one(verify::kTennisTree);
  CHECK(write_bracketed(t) == verify::kTennisTree);
  CHECK(one(write_bracketed(t)) == t);
}

TEST_CASE("strips function tags and coindexation") {
  CHECK(strip_function_tags("NP-SBJ-1") == "NP");
  CHECK(strip_function_tags("NP=2") == "NP");
  CHECK(strip_function_tags("PP-LOC") == "PP");
  CHECK(strip_function_tags("-NONE-") == "-NONE-");
  CHECK(strip_function_tags("-LRB-") == "-LRB-");
  CHECK(strip_function_tags("S") == "S");
}

TEST_CASE("unlabeled outer bracket, function tags and empty elements") {
  const auto t = one("( (S (NP-SBJ (-NONE- *T*-1)) (VP (VBD ran)) (. .)) )");
  CHECK(write_bracketed(t) == "(S (VP (VBD ran)) (. .))");
}

TEST_CASE("tree emptied by -NONE- pruning is skipped with a warning") {
  std::vector<std::string> warnings;
  const auto trees = parse_bracketed("(S (-NONE- *))\n(S (NN x))", &warnings);
  CHECK(trees.size() == 1);
  CHECK(warnings.size() == 1);
}

TEST_CASE("malformed input reports line and column") {
  try {
    parse_bracketed("(S (NP (NN a))\n (VP (VBD b)");
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() >= 1);
  }
  CHECK_THROWS_AS(parse_bracketed("(S (NN a)))"), ParseError);
  CHECK_THROWS_AS(parse_bracketed("NN a"), ParseError);
  CHECK(parse_bracketed("").empty());
}

TEST_CASE("binarization of the running example") {
  const auto b = binarize(one(verify::kTennisTree));
  const SpanSet expected = {{1, 5, "S"}, {2, 5, kNull}, {2, 4, "VP"}, {3, 4, "S+VP"}};
  CHECK(spans_of(b) == expected);
  CHECK(b.leaves[0].unary == "NP");
  CHECK(b.leaves[3].unary == "NP");
  CHECK(b.leaves[1].unary == kNull);
  CHECK(unary_spans_of(b) == SpanSet{{1, 1, "NP"}, {4, 4, "NP"}});
  check_binary_tree(b);
}

TEST_CASE("debinarization restores the n-ary tree") {
  const auto t = one(verify::kTennisTree);
  CHECK(debinarize(binarize(t)) == t);

  SyntaxTree collapsed = one("(S (NP (PRP a)) (VP (VBD b)))");
  CHECK(debinarize(binarize(collapsed)) == collapsed);
}

TEST_CASE("chain label splits into nested nodes") {
  BinaryTree b;
  b.leaves = {{"x", "NN", kNull}, {"y", "NN", kNull}};
  b.nodes = {{BinaryTree::leaf_ref(0), BinaryTree::leaf_ref(1), 1, 2, "S+VP"}};
  const auto t = debinarize(b);
  CHECK(t.label == "S");
  REQUIRE(t.children.size() == 1);
  CHECK(t.children[0].label == "VP");
  CHECK(t.children[0].children.size() == 2);
}

TEST_CASE("custom delimiter") {
  const auto t = one("(S (S (VP (VB go))) (. .))");
  const auto b = binarize(t, {"|"});
  CHECK(b.leaves[0].unary == "S|VP");
  CHECK(debinarize(b, {"|", "TOP"}) == t);
}

TEST_CASE("single token trees") {
  const auto t = one("(S (VP (VB go)))");
  const auto b = binarize(t);
  CHECK(b.size() == 1);
  CHECK(b.nodes.empty());
  CHECK(b.leaves[0].unary == "S+VP");
  CHECK(debinarize(b) == t);

  const auto bare = one("(NN go)");
  CHECK(debinarize(binarize(bare)) == bare);
}

TEST_CASE("null-labelled top gets the fallback root") {
  BinaryTree b;
  b.leaves = {{"x", "NN", kNull}, {"y", "NN", kNull}};
  b.nodes = {{BinaryTree::leaf_ref(0), BinaryTree::leaf_ref(1), 1, 2, kNull}};
  const auto t = debinarize(b);
  CHECK(t.label == "TOP");
  CHECK(t.children.size() == 2);
}

TEST_CASE("wide flat constituents binarize to the right") {
  const auto t = one("(NP (DT a) (JJ b) (JJ c) (NN d))");
  const auto b = binarize(t);
  const SpanSet expected = {{1, 4, "NP"}, {2, 4, kNull}, {3, 4, kNull}};
  CHECK(spans_of(b) == expected);
  CHECK(debinarize(b) == t);
}

TEST_CASE("laminarity") {
  CHECK(is_laminar({{1, 5, "S"}, {2, 5, "X"}, {2, 3, "Y"}}));
  CHECK_FALSE(is_laminar({{1, 4, "S"}, {2, 3, "X"}, {3, 4, "Y"}}));
}

TEST_CASE("assembling trees from spans") {
  const auto leaves = leaves_from_words({{"a", "T"}, {"b", "T"}, {"c", "T"}});
  const auto tree = build_binary_tree(leaves, {{2, 3, "X"}, {1, 3, "S"}});
  CHECK(spans_of(tree) == SpanSet{{1, 3, "S"}, {2, 3, "X"}});
  CHECK_THROWS_AS(build_binary_tree(leaves, {{1, 3, "S"}}), TreeError);
  CHECK_THROWS_AS(build_binary_tree(leaves, {{1, 3, "S"}, {1, 2, "X"}, {2, 3, "Y"}}), TreeError);
  CHECK_THROWS_AS(build_binary_tree(leaves, {{1, 2, "X"}, {2, 3, "Y"}}), TreeError);
}

TEST_CASE("round trip over a small corpus") {
  const auto trees = parse_bracketed(
      "(S (NP (DT the) (NN dog)) (VP (VBD barked)) (. .))\n"
      "(S (NP (PRP I)) (VP (VBD saw) (NP (DT a) (JJ big) (NN cat)) (PP (IN with) (NP (NNS eyes)))))\n"
      "(FRAG (NP (NN help)) (. !))");
  REQUIRE(trees.size() == 3);
  for (const auto& t : trees) {
    const auto b = binarize(t);
    check_binary_tree(b);
    CHECK(static_cast<std::size_t>(b.size()) == leaf_count(t));
    CHECK(b.nodes.size() == static_cast<std::size_t>(b.size() - 1));
    CHECK(debinarize(b) == t);
  }
}
