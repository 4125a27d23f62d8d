#include <doctest.h>

#include <random>
#include <stdexcept>

#include "fixtures.hpp"
#include "ptrparse/decoder.hpp"
#include "ptrparse/errors.hpp"
#include "ptrparse/verification.hpp"

using namespace ptrparse;

namespace {

const std::string kNull(kNullLabel);
const std::vector<std::string> kGeneral = {kNull, "A", "B", "C"};
const std::vector<std::string> kUnary = {kNull, "U"};

ScoreTables uniform(int n, int g = 4, int u = 2) {
  return {Matrix::Constant(n, n, 1.0 / n), Matrix::Constant(n, n, 1.0 / n),
          Matrix::Constant(n, g, 1.0 / g), Matrix::Constant(n, u, 1.0 / u)};
}

std::vector<TaggedWord> words(int n) { return std::vector<TaggedWord>(n, {"w", "T"}); }

}  // namespace

TEST_CASE("split scores by case") {
  auto t = uniform(5);
  t.sp(0, 0) = 0.9;
  t.gp(1, 4) = 0.7;
  CHECK(split_score(t, 1, 1, 5) == doctest::Approx(1.6));
  t.gp(3, 1) = 0.8;
  t.sp(4, 4) = 0.6;
  CHECK(split_score(t, 2, 4, 5) == doctest::Approx(1.4));
  t.gp(2, 1) = 0.2;
  t.gp(3, 4) = 0.3;
  CHECK(split_score(t, 2, 3, 5) == doctest::Approx(0.5));
  CHECK(split_score(t, 2, 3, 5, true) == doctest::Approx(std::log(0.2) + std::log(0.3)));

  CHECK_THROWS_AS(split_score(t, 2, 5, 5), std::out_of_range);
  CHECK_THROWS_AS(split_score(t, 0, 1, 5), std::out_of_range);
  CHECK_THROWS_AS(split_score(t, 1, 1, 6), std::out_of_range);
}

TEST_CASE("best split matches an exhaustive scan") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = verify::random_tables(8, 4, 2, rng);
    for (int i = 1; i <= 8; ++i) {
      for (int j = i + 1; j <= 8; ++j) {
        int best = i;
        for (int k = i + 1; k < j; ++k)
          if (split_score(t, i, k, j) > split_score(t, i, best, j)) best = k;
        CHECK(best_split(t, i, j) == best);
      }
    }
  }
  CHECK(best_split(uniform(6), 2, 6) == 2);
  CHECK(best_split(uniform(6), 3, 4) == 3);
}

TEST_CASE("label assignment") {
  auto t = uniform(3);
  CHECK(assign_label(t, 2, LabelKind::kUnary) == 0);
  t.gc.row(1) << 0, 0, 1, 0;
  CHECK(assign_label(t, 2, LabelKind::kGeneral) == 2);
  CHECK_THROWS_AS(assign_label(t, 4, LabelKind::kGeneral), std::out_of_range);

  std::mt19937_64 rng(8);
  const auto r = verify::random_tables(6, 4, 2, rng);
  for (int p = 1; p <= 6; ++p) {
    Eigen::Index best;
    r.gc.row(p - 1).maxCoeff(&best);
    CHECK(assign_label(r, p, LabelKind::kGeneral) == best);
  }
}

TEST_CASE("degenerate lengths") {
  auto t1 = uniform(1);
  t1.uc(0, 1) = 0.9;
  const auto one = decode(t1, words(1), kGeneral, kUnary);
  CHECK(one.nodes.empty());
  CHECK(one.leaves[0].unary == "U");

  auto t2 = uniform(2);
  t2.gc.row(0) << 0.1, 0.1, 0.1, 0.7;
  const auto two = decode(t2, words(2), kGeneral, kUnary);
  REQUIRE(two.nodes.size() == 1);
  CHECK(two.nodes[0].label == "C");
}

TEST_CASE("uniform tables give the leftmost-split chain") {
  const auto tree = decode(uniform(6), words(6), kGeneral, kUnary);
  SpanSet expected;
  for (int i = 1; i < 6; ++i) expected.push_back({i, 6, kNull});
  auto spans = spans_of(tree);
  CHECK(spans == expected);
}

TEST_CASE("crafted three-token tables") {
  auto t = uniform(3);
  t.sp(0, 0) = 0.8;
  t.gp(1, 2) = 0.9;
  t.gc.row(0) << 0, 1, 0, 0;
  t.gc.row(1) << 0, 0, 1, 0;
  const auto tree = decode(t, words(3), kGeneral, kUnary);
  CHECK(spans_of(tree) == SpanSet{{1, 3, "A"}, {2, 3, "B"}});
  CHECK(tree == verify::reference_decode(t, words(3), kGeneral, kUnary));
}

TEST_CASE("decoded trees are valid binary trees") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> length(2, 60);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = length(rng);
    const auto t = verify::random_tables(n, 4, 2, rng);
    const auto tree = decode(t, words(n), kGeneral, kUnary);
    CHECK_NOTHROW(check_binary_tree(tree));
    CHECK(tree.nodes.size() == static_cast<std::size_t>(n - 1));
    CHECK(is_laminar(spans_of(tree)));
  }
}

TEST_CASE("queue decoder equals the recursive reference") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> length(1, 20);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = length(rng);
    const auto t = verify::random_tables(n, 4, 2, rng);
    CHECK(decode(t, words(n), kGeneral, kUnary) ==
          verify::reference_decode(t, words(n), kGeneral, kUnary));
    CHECK(decode(t, words(n), kGeneral, kUnary, {true}) ==
          verify::reference_decode(t, words(n), kGeneral, kUnary, true));
  }
}

TEST_CASE("adding a constant to the pointing tables changes nothing") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 15;
    const auto t = verify::random_tables(n, 4, 2, rng);
    auto shifted = t;
    shifted.gp.array() += 0.25;
    shifted.sp.array() += 0.25;
    CHECK(decode(t, words(n), kGeneral, kUnary) == decode(shifted, words(n), kGeneral, kUnary));
  }
}

TEST_CASE("peaked tables recover every tree") {
  const std::vector<std::string> unary = {kNull, "A", "B", "C"};
  for (int n = 2; n <= 7; ++n) {
    for (const auto& tree : verify::enumerate_binary_trees(n, {"A", "B", "C"}, 19)) {
      const auto t = verify::forcing_tables(tree, kGeneral, unary);
      CHECK(decode(t, fixtures::words_of(tree), kGeneral, unary) == tree);
    }
  }
}

TEST_CASE("work counter") {
  DecodeStats chain, balanced;
  const std::vector<std::string> g = {kNull, "X"}, u = {kNull};
  const auto c = verify::right_branching_tree(64);
  const auto b = verify::balanced_tree(64);
  decode(verify::forcing_tables(c, g, u), fixtures::words_of(c), g, u, {}, &chain);
  decode(verify::forcing_tables(b, g, u), fixtures::words_of(b), g, u, {}, &balanced);
  CHECK(chain.split_candidates == 64 * 63 / 2);
  CHECK(chain.spans_processed == 63);
  // each level of the balanced tree scans n minus its span count
  long expected = 0;
  for (int width = 2; width <= 64; width *= 2) expected += 64 - 64 / width;
  CHECK(balanced.split_candidates == expected);
  CHECK(balanced.spans_processed == 63);
}

TEST_CASE("inputs that do not match the tables") {
  CHECK_THROWS_AS(decode(uniform(3), words(4), kGeneral, kUnary), DataError);
  CHECK_THROWS_AS(decode(uniform(3), words(3), {kNull}, kUnary), DataError);
}

TEST_CASE("parse_sentence is repeatable and well formed") {
  const auto corpus = fixtures::small_corpus();
  Model model{fixtures::tiny_config(), Vocabulary::build(corpus), {}};
  model.params = ModelParams::initialize(model.config, model.vocab, 31);
  const auto w = fixtures::words_of(corpus[2]);
  const auto a = parse_sentence(w, model);
  CHECK(a == parse_sentence(w, model));
  CHECK(tagged_words(a) == w);
  CHECK(parse_bracketed(write_bracketed(a)).front() == a);
}
