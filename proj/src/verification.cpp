#include "ptrparse/verification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ptrparse/decoder.hpp"
#include "ptrparse/errors.hpp"
#include "ptrparse/pointing.hpp"

namespace ptrparse::verify {

namespace {

using Shape = std::vector<std::pair<int, int>>;

// All shapes of the span [a, b], each as a preorder list of internal spans.
void shapes_of(int a, int b, std::vector<Shape>& out) {
  if (a == b) {
    out.push_back({});
    return;
  }
  for (int s = a; s < b; ++s) {
    std::vector<Shape> left, right;
    shapes_of(a, s, left);
    shapes_of(s + 1, b, right);
    for (const auto& l : left) {
      for (const auto& r : right) {
        Shape shape{{a, b}};
        shape.insert(shape.end(), l.begin(), l.end());
        shape.insert(shape.end(), r.begin(), r.end());
        out.push_back(std::move(shape));
      }
    }
  }
}

std::vector<BinaryLeaf> plain_leaves(int n) {
  std::vector<BinaryLeaf> leaves(n);
  for (int t = 0; t < n; ++t) {
    leaves[t].word = "w" + std::to_string(t + 1);
    leaves[t].pos = "T";
  }
  return leaves;
}

std::string describe(const BinaryTree& tree) {
  std::ostringstream out;
  for (const auto& s : spans_of(tree)) out << '(' << s.first << ',' << s.last << ' ' << s.label << ')';
  for (const auto& l : tree.leaves) out << ' ' << l.unary;
  return out.str();
}

int index_of(const std::vector<std::string>& labels, const std::string& label) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw DataError("label not in inventory: " + label);
  return static_cast<int>(it - labels.begin());
}

Matrix peaked_rows(int rows, int cols, const std::vector<int>& hot, double peak) {
  const double rest = cols > 1 ? (1.0 - peak) / (cols - 1) : 0.0;
  Matrix m = Matrix::Constant(rows, cols, rest);
  for (int r = 0; r < rows; ++r) m(r, hot[r]) = cols > 1 ? peak : 1.0;
  return m;
}

}  // namespace

std::uint64_t catalan(int k) {
  if (k < 0) return 0;
  std::uint64_t c = 1;
  for (int i = 0; i < k; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

std::vector<Shape> enumerate_shapes(int n) {
  if (n < 2 || n > 12) throw std::invalid_argument("enumeration needs 2 <= n <= 12");
  std::vector<Shape> out;
  shapes_of(1, n, out);
  return out;
}

std::vector<BinaryTree> enumerate_binary_trees(int n, const std::vector<std::string>& label_pool,
                                               std::uint64_t seed) {
  if (label_pool.empty()) throw std::invalid_argument("label pool is empty");
  const auto shapes = enumerate_shapes(n);
  std::mt19937_64 rng(seed);
  auto draw = [&](std::size_t options) { return static_cast<std::size_t>(rng() % options); };
  std::vector<BinaryTree> trees;
  trees.reserve(shapes.size());
  for (const auto& shape : shapes) {
    auto leaves = plain_leaves(n);
    for (auto& leaf : leaves) {
      const auto pick = draw(label_pool.size() + 1);
      leaf.unary = pick == label_pool.size() ? std::string(kNullLabel) : label_pool[pick];
    }
    SpanSet spans;
    for (const auto& [a, b] : shape) spans.push_back({a, b, label_pool[draw(label_pool.size())]});
    trees.push_back(build_binary_tree(std::move(leaves), std::move(spans)));
  }
  return trees;
}

BinaryTree reference_decode(const ScoreTables& tables, const std::vector<TaggedWord>& words,
                            const std::vector<std::string>& general_labels,
                            const std::vector<std::string>& unary_labels, bool log_space) {
  const int n = static_cast<int>(words.size());
  auto f = [&](double p) { return log_space ? std::log(p) : p; };
  auto gp = [&](int a, int b) { return f(tables.gp(a - 1, b - 1)); };
  auto sp = [&](int a) { return f(tables.sp(a - 1, a - 1)); };
  auto argmax = [](const Matrix& m, int position) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (m(position - 1, c) > m(position - 1, best)) best = c;
    return static_cast<int>(best);
  };

  std::vector<BinaryLeaf> leaves(n);
  for (int t = 1; t <= n; ++t) {
    leaves[t - 1].word = words[t - 1].word;
    leaves[t - 1].pos = words[t - 1].pos;
    leaves[t - 1].unary = unary_labels[argmax(tables.uc, t)];
  }
  SpanSet spans;
  std::function<void(int, int, int)> recurse = [&](int i, int j, int label_position) {
    spans.push_back({i, j, general_labels[argmax(tables.gc, label_position)]});
    if (j - i < 2) return;
    int best = -1;
    double best_score = 0;
    for (int k = i; k < j; ++k) {
      double s;
      if (k == i)
        s = sp(i) + gp(i + 1, j);
      else if (k == j - 1)
        s = gp(j - 1, i) + sp(j);
      else
        s = gp(k, i) + gp(k + 1, j);
      if (best < 0 || s > best_score) {
        best = k;
        best_score = s;
      }
    }
    if (best > i) recurse(i, best, best);
    if (best + 1 < j) recurse(best + 1, j, best + 1);
  };
  if (n >= 2) recurse(1, n, 1);
  return build_binary_tree(std::move(leaves), std::move(spans));
}

RoundtripReport roundtrip_report(int n_max, std::uint64_t seed, bool corrupt) {
  if (n_max > 10) throw std::invalid_argument("roundtrip_report supports n_max <= 10");
  RoundtripReport report;
  report.n_max = n_max;
  const std::vector<std::string> pool = {"A", "B", "C"};
  for (int n = 2; n <= n_max; ++n) {
    for (const auto& tree : enumerate_binary_trees(n, pool, seed + static_cast<std::uint64_t>(n))) {
      ++report.trees_checked;
      auto pointing = tree_to_pointing(tree);
      if (corrupt) {
        auto& label = pointing.entries[report.trees_checked % (n - 1)].label;
        label = label == "A" ? "B" : "A";
      }
      std::string failure;
      try {
        auto leaves = tree.leaves;
        const auto back = pointing_to_tree(pointing, std::move(leaves));
        if (!(back == tree)) failure = "tree differs after the round trip";
      } catch (const TreeError& e) {
        failure = e.what();
      }
      if (!failure.empty()) {
        if (!report.counterexample)
          report.counterexample = "n = " + std::to_string(n) + ": " + describe(tree) + ": " + failure;
        ++report.mismatches;
      }
    }
  }
  return report;
}

ScoreTables random_tables(int n, int general_labels, int unary_labels, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  auto rows = [&](int r, int c) {
    Matrix m(r, c);
    for (int a = 0; a < r; ++a) {
      for (int b = 0; b < c; ++b) m(a, b) = u(rng);
      m.row(a) /= m.row(a).sum();
    }
    return m;
  };
  return {rows(n, n), rows(n, n), rows(n, general_labels), rows(n, unary_labels)};
}

ScoreTables forcing_tables(const BinaryTree& tree, const std::vector<std::string>& general_labels,
                           const std::vector<std::string>& unary_labels, double peak) {
  const int n = tree.size();
  std::vector<int> targets(n), self(n), general(n, 0), unary(n);
  for (int t = 0; t < n; ++t) {
    self[t] = t;
    targets[t] = t;
    unary[t] = index_of(unary_labels, tree.leaves[t].unary);
  }
  for (const auto& e : tree_to_pointing(tree).entries) {
    targets[e.query - 1] = e.target - 1;
    general[e.query - 1] = index_of(general_labels, e.label);
  }
  return {peaked_rows(n, n, targets, peak), peaked_rows(n, n, self, peak),
          peaked_rows(n, static_cast<int>(general_labels.size()), general, peak),
          peaked_rows(n, static_cast<int>(unary_labels.size()), unary, peak)};
}

BinaryTree right_branching_tree(int n, const std::string& label) {
  SpanSet spans;
  for (int i = 1; i < n; ++i) spans.push_back({i, n, label});
  return build_binary_tree(plain_leaves(n), std::move(spans));
}

BinaryTree balanced_tree(int n, const std::string& label) {
  SpanSet spans;
  std::function<void(int, int)> split = [&](int a, int b) {
    if (a == b) return;
    spans.push_back({a, b, label});
    const int mid = a + (b - a + 1) / 2 - 1;
    split(a, mid);
    split(mid + 1, b);
  };
  split(1, n);
  return build_binary_tree(plain_leaves(n), std::move(spans));
}

std::vector<PropertyResult> run_verification(int level, std::uint64_t seed) {
  level = std::clamp(level, 2, 10);
  std::vector<PropertyResult> results;
  auto add = [&](std::string name, bool ok, std::string detail) {
    results.push_back({std::move(name), ok, std::move(detail)});
  };
  {
    bool ok = true;
    std::string detail;
    for (int n = 2; n <= level; ++n) {
      const auto count = enumerate_shapes(n).size();
      if (count != catalan(n - 1)) {
        ok = false;
        detail = "n = " + std::to_string(n) + ": " + std::to_string(count) + " shapes";
      }
    }
    if (ok) detail = "n = 2.." + std::to_string(level);
    add("shape count equals Catalan(n-1)", ok, detail);
  }
  {
    const auto r = roundtrip_report(level, seed);
    add("tree -> pointing -> tree identity", r.passed(),
        r.passed() ? std::to_string(r.trees_checked) + " trees"
                   : r.counterexample.value_or(""));
  }
  {
    const auto r = roundtrip_report(std::min(level, 6), seed, true);
    add("label corruption is detected", !r.passed(),
        std::to_string(r.mismatches) + " of " + std::to_string(r.trees_checked) + " flagged");
  }
  {
    const int m = std::min(level, 8);
    bool ok = true;
    std::int64_t checked = 0;
    for (int n = 2; n <= m && ok; ++n) {
      std::map<std::vector<std::pair<int, int>>, int> seen;
      for (const auto& shape : enumerate_shapes(n)) {
        SpanSet spans;
        for (const auto& [a, b] : shape) spans.push_back({a, b, "X"});
        const auto tree = build_binary_tree(plain_leaves(n), std::move(spans));
        std::vector<std::pair<int, int>> key;
        for (const auto& e : tree_to_pointing(tree).entries) key.emplace_back(e.query, e.target);
        if (!seen.emplace(key, 1).second) ok = false;
        ++checked;
      }
    }
    add("pointing is injective on shapes", ok, std::to_string(checked) + " shapes, n <= " + std::to_string(m));
  }
  {
    const auto tree = binarize(parse_bracketed(kTennisTree).front());
    const auto p = tree_to_pointing(tree);
    const std::vector<std::pair<int, int>> expected = {{1, 5}, {2, 5}, {3, 4}, {4, 2}, {5, 1}};
    bool ok = p.size() == 5;
    for (int t = 0; ok && t < 5; ++t)
      ok = p.entries[t].query == expected[t].first && p.entries[t].target == expected[t].second;
    add("running example pointing", ok, format_pointing(p));
  }
  {
    PointingSet bad;
    for (auto [q, t] : std::vector<std::pair<int, int>>{{1, 4}, {2, 3}, {3, 4}, {4, 1}})
      bad.entries.push_back({q, t, "X"});
    const auto d = validate_pointing(bad);
    add("crossing pointing rejected", d.issue == PointingIssue::kOverlap && d.token == 3, d.message);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length(1, 20);
  const std::vector<std::string> general = {std::string(kNullLabel), "A", "B", "C"};
  const std::vector<std::string> unary = {std::string(kNullLabel), "U"};
  {
    int valid = 0, agree = 0;
    const int instances = 500;
    for (int c = 0; c < instances; ++c) {
      const int n = length(rng);
      const auto tables = random_tables(n, 4, 2, rng);
      std::vector<TaggedWord> words(n, TaggedWord{"w", "T"});
      try {
        const auto a = decode(tables, words, general, unary);
        check_binary_tree(a);
        ++valid;
        if (a == reference_decode(tables, words, general, unary)) ++agree;
      } catch (const std::exception&) {
      }
    }
    add("decoder output is a valid binary tree", valid == instances,
        std::to_string(valid) + "/" + std::to_string(instances));
    add("decoder agrees with reference recursion", agree == instances,
        std::to_string(agree) + "/" + std::to_string(instances));
  }
  {
    bool ok = true;
    std::int64_t checked = 0;
    for (int n = 2; n <= std::min(level, 7) && ok; ++n) {
      for (const auto& tree : enumerate_binary_trees(n, {"A", "B", "C"}, seed)) {
        const auto tables = forcing_tables(tree, general, {std::string(kNullLabel), "A", "B", "C"});
        std::vector<TaggedWord> words;
        for (const auto& l : tree.leaves) words.push_back({l.word, l.pos});
        ++checked;
        if (!(decode(tables, words, general, {std::string(kNullLabel), "A", "B", "C"}) == tree)) {
          ok = false;
          break;
        }
      }
    }
    add("decoder recovers the tree from peaked tables", ok, std::to_string(checked) + " trees");
  }
  {
    const int n = 512;
    DecodeStats chain, balanced;
    for (auto [tree, stats] : {std::pair{right_branching_tree(n), &chain},
                               std::pair{balanced_tree(n), &balanced}}) {
      std::vector<TaggedWord> words;
      for (const auto& l : tree.leaves) words.push_back({l.word, l.pos});
      const std::vector<std::string> g = {std::string(kNullLabel), "X"};
      const std::vector<std::string> u = {std::string(kNullLabel)};
      decode(forcing_tables(tree, g, u), words, g, u, {}, stats);
    }
    const bool ok = chain.split_candidates == static_cast<std::int64_t>(n) * (n - 1) / 2 &&
                    balanced.split_candidates <= static_cast<std::int64_t>(n) * 18;
    add("split work at n = 512", ok,
        "chain " + std::to_string(chain.split_candidates) + ", balanced " +
            std::to_string(balanced.split_candidates));
  }
  return results;
}

}  // namespace ptrparse::verify
