#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ptrparse/model.hpp"
#include "ptrparse/treebank.hpp"

// Independent oracles: exhaustive tree enumeration, pointing round trips, a
// recursive reference decoder and synthetic score tables. The reference
// decoder shares no code with the queue decoder.
namespace ptrparse::verify {

// Running example used throughout the tests.
inline constexpr const char* kTennisTree =
    "(S (NP (PRP She)) (VP (VBZ enjoys) (S (VP (VBG playing) (NP (NN tennis))))) (. .))";

std::uint64_t catalan(int k);

// Every binary tree shape over n leaves (2 <= n <= 12), each exactly once.
// Internal labels are drawn from `label_pool`, leaf unary labels from
// `label_pool` plus the null label, deterministically from `seed`.
std::vector<BinaryTree> enumerate_binary_trees(int n, const std::vector<std::string>& label_pool,
                                               std::uint64_t seed);

// Shapes only, as span lists (first, last) per tree.
std::vector<std::vector<std::pair<int, int>>> enumerate_shapes(int n);

// Plain recursion over argmax splits; tree-identical to the queue decoder by
// construction of the scoring rule.
BinaryTree reference_decode(const ScoreTables& tables, const std::vector<TaggedWord>& words,
                            const std::vector<std::string>& general_labels,
                            const std::vector<std::string>& unary_labels, bool log_space = false);

struct RoundtripReport {
  int n_max = 0;
  std::int64_t trees_checked = 0;
  std::int64_t mismatches = 0;
  std::optional<std::string> counterexample;

  bool passed() const { return mismatches == 0; }
};

// tree -> pointing -> tree over the full enumeration for n = 2..n_max.
// `corrupt` flips one label of every pointing set before the way back.
RoundtripReport roundtrip_report(int n_max, std::uint64_t seed = 7, bool corrupt = false);

// Random row-stochastic tables of size n.
ScoreTables random_tables(int n, int general_labels, int unary_labels, std::mt19937_64& rng);

// Tables whose rows put `peak` mass on the pointing targets and labels of
// `tree` and spread the rest uniformly.
ScoreTables forcing_tables(const BinaryTree& tree, const std::vector<std::string>& general_labels,
                           const std::vector<std::string>& unary_labels, double peak = 0.9);

BinaryTree right_branching_tree(int n, const std::string& label = "X");
BinaryTree balanced_tree(int n, const std::string& label = "X");

struct PropertyResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// The property table behind `ptrparse verify`. `level` is the largest n for
// the exhaustive checks (2..10).
std::vector<PropertyResult> run_verification(int level, std::uint64_t seed = 7);

}  // namespace ptrparse::verify
