#include "ptrparse/pointing.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "ptrparse/errors.hpp"

namespace ptrparse {

PointingSet tree_to_pointing(const BinaryTree& tree) {
  const int n = tree.size();
  PointingSet out;
  if (n < 2) return out;

  // parent of every internal node and every leaf
  std::vector<int> node_parent(tree.nodes.size(), -1);
  std::vector<int> leaf_parent(n, -1);
  for (int v = 0; v < static_cast<int>(tree.nodes.size()); ++v) {
    for (int child : {tree.nodes[v].left, tree.nodes[v].right}) {
      if (BinaryTree::is_leaf_ref(child))
        leaf_parent[BinaryTree::leaf_index(child)] = v;
      else
        node_parent[child] = v;
    }
  }

  out.entries.reserve(n);
  for (int i = 1; i <= n; ++i) {
    int target = i;
    std::string label = tree.leaves[i - 1].unary;
    int node = leaf_parent[i - 1];
    // climb while the current span still starts or ends at i
    while (node >= 0) {
      const auto& v = tree.nodes[node];
      if (v.first != i && v.last != i) break;
      target = v.first + v.last - i;
      label = v.label;
      node = node_parent[node];
    }
    out.entries.push_back({i, target, std::move(label)});
  }
  return out;
}

namespace {

std::string span_text(int a, int b) {
  return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

PointingDiagnostic fail(PointingIssue issue, std::string message, int q1 = 0, int q2 = 0,
                        int token = 0) {
  return {issue, q1, q2, token, std::move(message)};
}

struct IntervalNode {
  int first;
  int last;
  int query;
  std::vector<int> children;
};

}  // namespace

PointingDiagnostic validate_pointing(const PointingSet& pointing) {
  const int n = pointing.size();
  if (n == 0) return {};
  if (n == 1) return fail(PointingIssue::kSelfPointing, "a single token cannot point elsewhere", 1);

  for (int i = 0; i < n; ++i) {
    const auto& e = pointing.entries[i];
    if (e.query != i + 1)
      return fail(PointingIssue::kCoverage,
                  "entry " + std::to_string(i + 1) + " has query " + std::to_string(e.query),
                  e.query);
    if (e.target < 1 || e.target > n)
      return fail(PointingIssue::kOutOfRange,
                  "query " + std::to_string(e.query) + " points outside 1.." + std::to_string(n),
                  e.query);
    if (e.target == e.query)
      return fail(PointingIssue::kSelfPointing,
                  "query " + std::to_string(e.query) + " points at itself", e.query);
  }
  if (pointing.entries.back().target != 1)
    return fail(PointingIssue::kTrivialEntry, "entry n must point at 1", n);

  std::map<std::pair<int, int>, int> seen;
  int root_query = 0;
  for (int i = 0; i + 1 < n; ++i) {
    const auto& e = pointing.entries[i];
    const auto key = std::make_pair(e.span_first(), e.span_last());
    if (auto it = seen.find(key); it != seen.end())
      return fail(PointingIssue::kDuplicate,
                  "queries " + std::to_string(it->second) + " and " + std::to_string(e.query) +
                      " both induce span " + span_text(key.first, key.second),
                  it->second, e.query);
    seen.emplace(key, e.query);
    if (key.first == 1 && key.second == n) root_query = e.query;
  }
  if (root_query == 0) return fail(PointingIssue::kMissingRoot, "no entry induces (1,n)");
  if (pointing.entries[root_query - 1].label != pointing.entries.back().label)
    return fail(PointingIssue::kTrivialEntry,
                "root label of entry " + std::to_string(root_query) + " differs from entry n",
                root_query, n);

  // Insert spans widest first. Nested distinct spans never share a width;
  // equal widths can only be disjoint, so they are ordered by position.
  std::vector<IntervalNode> nodes;
  nodes.reserve(n - 1);
  for (const auto& [key, query] : seen) nodes.push_back({key.first, key.second, query, {}});
  std::sort(nodes.begin(), nodes.end(), [](const IntervalNode& a, const IntervalNode& b) {
    const int wa = a.last - a.first, wb = b.last - b.first;
    return wa != wb ? wa > wb : a.first < b.first;
  });
  for (int k = 1; k < static_cast<int>(nodes.size()); ++k) {
    const auto& cur = nodes[k];
    int parent = 0;
    for (bool descended = true; descended;) {
      descended = false;
      for (int c : nodes[parent].children) {
        const auto& other = nodes[c];
        if (other.last < cur.first || cur.last < other.first) continue;
        if (other.first <= cur.first && cur.last <= other.last) {
          parent = c;
          descended = true;
          break;
        }
        const int token = std::max(other.first, cur.first);
        return fail(PointingIssue::kOverlap,
                    "token " + std::to_string(token) + " cannot belong to both " +
                        span_text(other.first, other.last) + " and " +
                        span_text(cur.first, cur.last),
                    std::min(other.query, cur.query), std::max(other.query, cur.query), token);
      }
    }
    nodes[parent].children.push_back(k);
  }
  for (const auto& v : nodes) {
    int covered = 0;
    for (int c : v.children) covered += nodes[c].last - nodes[c].first + 1;
    const int arity = static_cast<int>(v.children.size()) + (v.last - v.first + 1 - covered);
    if (arity != 2)
      return fail(PointingIssue::kNotBinary,
                  "span " + span_text(v.first, v.last) + " has " + std::to_string(arity) +
                      " children",
                  v.query);
  }

  // Each entry must name the largest span at its query in the induced tree.
  SpanSet spans;
  for (int i = 0; i + 1 < n; ++i) {
    const auto& e = pointing.entries[i];
    spans.push_back({e.span_first(), e.span_last(), e.label});
  }
  const auto induced = build_binary_tree(std::vector<BinaryLeaf>(n), std::move(spans));
  const auto expected = tree_to_pointing(induced);
  for (int i = 0; i + 1 < n; ++i) {
    const auto& got = pointing.entries[i];
    const auto& want = expected.entries[i];
    if (got.target != want.target)
      return fail(PointingIssue::kNotMaximal,
                  "span " + span_text(got.span_first(), got.span_last()) +
                      " is not the largest span at token " + std::to_string(got.query) +
                      "; expected " + span_text(want.span_first(), want.span_last()),
                  got.query);
  }
  return {};
}

BinaryTree pointing_to_tree(const PointingSet& pointing, std::vector<BinaryLeaf> leaves) {
  const int n = static_cast<int>(leaves.size());
  if (pointing.size() != (n >= 2 ? n : 0))
    throw TreeError("pointing set has " + std::to_string(pointing.size()) + " entries for " +
                    std::to_string(n) + " leaves");
  const auto diag = validate_pointing(pointing);
  if (!diag.valid()) throw TreeError("invalid pointing set: " + diag.message);
  SpanSet spans;
  spans.reserve(n > 0 ? n - 1 : 0);
  for (int i = 0; i + 1 < n; ++i) {
    const auto& e = pointing.entries[i];
    spans.push_back({e.span_first(), e.span_last(), e.label});
  }
  return build_binary_tree(std::move(leaves), std::move(spans));
}

std::string format_pointing(const PointingSet& pointing) {
  std::string out;
  for (const auto& e : pointing.entries)
    out += std::to_string(e.query) + " -> " + std::to_string(e.target) + " " + e.label + "\n";
  return out;
}

PointingSet parse_pointing(std::string_view text) {
  PointingSet out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    Pointing p;
    std::string arrow;
    if (!(fields >> p.query >> arrow >> p.target) || arrow != "->")
      throw ParseError("expected 'i -> p label'", line_no, 1);
    fields >> p.label;
    out.entries.push_back(std::move(p));
  }
  return out;
}

}  // namespace ptrparse
