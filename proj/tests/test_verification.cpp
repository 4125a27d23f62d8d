#include <doctest.h>

#include <set>
#include <stdexcept>

#include "ptrparse/verification.hpp"

using namespace ptrparse;

namespace {

// Catalan numbers from the convolution recurrence.
std::vector<std::uint64_t> catalan_table(int upto) {
  std::vector<std::uint64_t> c(upto + 1, 0);
  c[0] = 1;
  for (int m = 1; m <= upto; ++m)
    for (int i = 0; i < m; ++i) c[m] += c[i] * c[m - 1 - i];
  return c;
}

}  // namespace

TEST_CASE("closed-form Catalan numbers") {
  const auto table = catalan_table(15);
  for (int k = 0; k <= 15; ++k) CHECK(verify::catalan(k) == table[k]);
  CHECK(verify::catalan(9) == 4862);
}

TEST_CASE("enumeration covers every shape once") {
  const auto table = catalan_table(11);
  for (int n = 2; n <= 11; ++n) {
    const auto shapes = verify::enumerate_shapes(n);
    CHECK(shapes.size() == table[n - 1]);
    std::set<std::vector<std::pair<int, int>>> distinct;
    for (auto s : shapes) {
      std::sort(s.begin(), s.end());
      distinct.insert(s);
    }
    CHECK(distinct.size() == shapes.size());
  }
  CHECK(verify::enumerate_binary_trees(3, {"A"}, 1).size() == 2);
  CHECK(verify::enumerate_binary_trees(12, {"A"}, 1).size() == 58786);
  CHECK_THROWS_AS(verify::enumerate_shapes(1), std::invalid_argument);
  CHECK_THROWS_AS(verify::enumerate_shapes(13), std::invalid_argument);
}

TEST_CASE("labels are drawn from the seed") {
  const auto a = verify::enumerate_binary_trees(6, {"A", "B", "C"}, 42);
  const auto b = verify::enumerate_binary_trees(6, {"A", "B", "C"}, 42);
  const auto c = verify::enumerate_binary_trees(6, {"A", "B", "C"}, 43);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("round-trip report") {
  const auto two = verify::roundtrip_report(2);
  CHECK(two.trees_checked == 1);
  CHECK(two.passed());

  const auto full = verify::roundtrip_report(9);
  CHECK(full.passed());
  std::int64_t expected = 0;
  for (int n = 2; n <= 9; ++n) expected += static_cast<std::int64_t>(verify::catalan(n - 1));
  CHECK(full.trees_checked == expected);

  const auto corrupted = verify::roundtrip_report(4, 7, true);
  CHECK_FALSE(corrupted.passed());
  CHECK(corrupted.counterexample.has_value());
  CHECK_THROWS_AS(verify::roundtrip_report(11), std::invalid_argument);
}

TEST_CASE("reference decoder edge cases") {
  const std::string null(kNullLabel);
  const std::vector<std::string> g = {null, "A"}, u = {null};
  const ScoreTables t{Matrix::Constant(2, 2, 0.5), Matrix::Constant(2, 2, 0.5),
                      Matrix::Constant(2, 2, 0.5), Matrix::Constant(2, 1, 1.0)};
  const auto tree = verify::reference_decode(t, std::vector<TaggedWord>(2, {"w", "T"}), g, u);
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].first == 1);
  CHECK(tree.nodes[0].last == 2);
}

TEST_CASE("synthetic trees") {
  const auto chain = verify::right_branching_tree(5);
  CHECK(spans_of(chain).back().first == 4);
  const auto balanced = verify::balanced_tree(8);
  CHECK(spans_of(balanced)[1].last == 4);
  check_binary_tree(balanced);
}

TEST_CASE("property table passes") {
  for (const auto& r : verify::run_verification(7)) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}
