#include <doctest.h>

#include <map>
#include <set>

#include "ptrparse/errors.hpp"
#include "ptrparse/pointing.hpp"
#include "ptrparse/verification.hpp"

using namespace ptrparse;

namespace {

const std::string kNull(kNullLabel);

PointingSet make(std::initializer_list<std::pair<int, int>> pairs) {
  PointingSet p;
  for (auto [q, t] : pairs) p.entries.push_back({q, t, "X"});
  return p;
}

// Brute force: for every token, scan all spans for the widest one that
// starts or ends there.
std::vector<std::pair<int, int>> widest_spans(const BinaryTree& tree) {
  const int n = tree.size();
  const auto spans = spans_of(tree);
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i < n; ++i) {
    int best_width = 0, target = 0;
    for (const auto& s : spans) {
      if (s.first != i && s.last != i) continue;
      if (s.width() > best_width) {
        best_width = s.width();
        target = s.first == i ? s.last : s.first;
      }
    }
    out.emplace_back(i, target);
  }
  out.emplace_back(n, 1);
  return out;
}

}  // namespace

TEST_CASE("running example pointing and labels") {
  const auto tree = binarize(parse_bracketed(verify::kTennisTree).front());
  const auto p = tree_to_pointing(tree);
  REQUIRE(p.size() == 5);
  const std::vector<std::tuple<int, int, std::string>> expected = {
      {1, 5, "S"}, {2, 5, kNull}, {3, 4, "S+VP"}, {4, 2, "VP"}, {5, 1, "S"}};
  for (int i = 0; i < 5; ++i) {
    CHECK(p.entries[i].query == std::get<0>(expected[i]));
    CHECK(p.entries[i].target == std::get<1>(expected[i]));
    CHECK(p.entries[i].label == std::get<2>(expected[i]));
  }
  CHECK(validate_pointing(p).valid());
  CHECK(pointing_to_tree(p, tree.leaves) == tree);
}

TEST_CASE("small trees") {
  const auto two = verify::right_branching_tree(2);
  const auto p2 = tree_to_pointing(two);
  REQUIRE(p2.size() == 2);
  CHECK(p2.entries[0].target == 2);
  CHECK(p2.entries[1].target == 1);

  const auto chain = tree_to_pointing(verify::right_branching_tree(3));
  CHECK(chain.entries[0].target == 3);
  CHECK(chain.entries[1].target == 3);
  CHECK(chain.entries[2].target == 1);

  BinaryTree single;
  single.leaves = {{"x", "NN", kNull}};
  CHECK(tree_to_pointing(single).entries.empty());
}

TEST_CASE("pointing matches the widest span at every token") {
  for (int n = 2; n <= 8; ++n) {
    for (const auto& tree : verify::enumerate_binary_trees(n, {"A", "B"}, 3)) {
      const auto p = tree_to_pointing(tree);
      const auto oracle = widest_spans(tree);
      REQUIRE(p.size() == n);
      for (int i = 0; i < n; ++i) {
        CHECK(p.entries[i].query == oracle[i].first);
        CHECK(p.entries[i].target == oracle[i].second);
      }
    }
  }
}

TEST_CASE("left children point right, right children point left") {
  for (const auto& tree : verify::enumerate_binary_trees(6, {"A"}, 5)) {
    const auto p = tree_to_pointing(tree);
    for (const auto& node : tree.nodes) {
      for (int side = 0; side < 2; ++side) {
        const int ref = side == 0 ? node.left : node.right;
        if (BinaryTree::is_leaf_ref(ref)) continue;
        const auto& child = tree.nodes[ref];
        // the endpoint not shared with the parent carries the child's span
        const int query = side == 0 ? child.last : child.first;
        const auto& e = p.entries[query - 1];
        CHECK(e.span_first() == child.first);
        CHECK(e.span_last() == child.last);
        CHECK((side == 0 ? e.target < e.query : e.target > e.query));
      }
    }
  }
}

TEST_CASE("crossing spans are rejected at the shared token") {
  const auto d = validate_pointing(make({{1, 4}, {2, 3}, {3, 4}, {4, 1}}));
  CHECK(d.issue == PointingIssue::kOverlap);
  CHECK(d.token == 3);
  CHECK(d.message.find("token 3") != std::string::npos);
  CHECK_THROWS_AS(pointing_to_tree(make({{1, 4}, {2, 3}, {3, 4}, {4, 1}}),
                                   leaves_from_words(std::vector<TaggedWord>(4, {"w", "T"}))),
                  TreeError);
}

TEST_CASE("right-branching three-token pointing is valid") {
  // The same three entries describe ((1 (2 3))): 1 -> 3 and 2 -> 3 are
  // different spans.
  CHECK(validate_pointing(make({{1, 3}, {2, 3}, {3, 1}})).valid());
}

TEST_CASE("duplicate spans") {
  const auto d = validate_pointing(make({{1, 4}, {2, 3}, {3, 2}, {4, 1}}));
  CHECK(d.issue == PointingIssue::kDuplicate);
  CHECK(d.first_query == 2);
  CHECK(d.second_query == 3);
}

TEST_CASE("structural rejections") {
  CHECK(validate_pointing(make({{1, 1}, {2, 1}})).issue == PointingIssue::kSelfPointing);
  CHECK(validate_pointing(make({{1, 5}, {2, 1}})).issue == PointingIssue::kOutOfRange);
  CHECK(validate_pointing(make({{1, 2}, {1, 2}})).issue == PointingIssue::kCoverage);
  CHECK(validate_pointing(make({{1, 2}, {2, 3}, {3, 2}})).issue == PointingIssue::kTrivialEntry);
  CHECK(validate_pointing(make({{1, 2}, {2, 3}, {3, 1}})).issue == PointingIssue::kMissingRoot);

  auto relabeled = tree_to_pointing(verify::right_branching_tree(3, "S"));
  relabeled.entries.back().label = "NP";
  CHECK(validate_pointing(relabeled).issue == PointingIssue::kTrivialEntry);
}

TEST_CASE("round trip and injectivity") {
  const std::vector<std::string> pool = {"A", "B", "C"};
  for (int n = 2; n <= 8; ++n) {
    std::set<std::vector<std::pair<int, int>>> seen;
    const auto trees = verify::enumerate_binary_trees(n, pool, 11);
    CHECK(trees.size() == verify::catalan(n - 1));
    for (const auto& tree : trees) {
      const auto p = tree_to_pointing(tree);
      REQUIRE(validate_pointing(p).valid());
      CHECK(pointing_to_tree(p, tree.leaves) == tree);
      std::vector<std::pair<int, int>> key;
      for (const auto& e : p.entries) key.emplace_back(e.query, e.target);
      CHECK(seen.insert(key).second);
    }
  }
}

TEST_CASE("text format") {
  const auto p = tree_to_pointing(binarize(parse_bracketed(verify::kTennisTree).front()));
  const auto text = format_pointing(p);
  CHECK(text.rfind("1 -> 5 S\n", 0) == 0);
  CHECK(parse_pointing(text) == p);
  CHECK(parse_pointing("1 -> 2\n2 -> 1\n").entries[0].label.empty());
  CHECK_THROWS_AS(parse_pointing("1 => 2"), ParseError);
}
