#include "ptrparse/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <sstream>

#include "ptrparse/errors.hpp"

namespace ptrparse {

EvalOptions EvalOptions::collins() {
  EvalOptions o;
  o.excluded_pos = {",", ":", "``", "''", "."};
  o.excluded_labels = {"TOP"};
  return o;
}

namespace {

// Returns the number of kept tokens under `t`; brackets are appended in
// preorder once their extent is known.
int collect(const SyntaxTree& t, const EvalOptions& options, int& next, SpanSet& out) {
  if (t.is_preterminal()) {
    if (options.excluded_pos.count(t.label)) return 0;
    ++next;
    return 1;
  }
  const int first = next + 1;
  const std::size_t slot = out.size();
  out.push_back({});
  int kept = 0;
  for (const auto& c : t.children) kept += collect(c, options, next, out);
  if (kept == 0 || options.excluded_labels.count(t.label)) {
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(slot));
  } else {
    out[slot] = {first, next, t.label};
  }
  return kept;
}

}  // namespace

SpanSet labeled_brackets(const SyntaxTree& tree, const EvalOptions& options) {
  SpanSet out;
  int next = 0;
  collect(tree, options, next, out);
  return out;
}

SentenceCounts eval_spans(const SyntaxTree& gold, const SyntaxTree& predicted,
                          const EvalOptions& options) {
  const auto n_gold = leaf_count(gold);
  const auto n_pred = leaf_count(predicted);
  if (n_gold != n_pred)
    throw DataError("token count mismatch: gold has " + std::to_string(n_gold) +
                    ", prediction has " + std::to_string(n_pred));
  auto g = labeled_brackets(gold, options);
  auto p = labeled_brackets(predicted, options);
  std::sort(g.begin(), g.end());
  std::sort(p.begin(), p.end());
  SentenceCounts c;
  c.length = static_cast<int>(n_gold);
  c.gold = static_cast<int>(g.size());
  c.predicted = static_cast<int>(p.size());
  // multiset intersection
  auto gi = g.begin();
  auto pi = p.begin();
  while (gi != g.end() && pi != p.end()) {
    if (*gi < *pi) {
      ++gi;
    } else if (*pi < *gi) {
      ++pi;
    } else {
      ++c.matched;
      ++gi;
      ++pi;
    }
  }
  return c;
}

EvalResult EvalResult::from_counts(const std::vector<SentenceCounts>& counts) {
  EvalResult r;
  for (const auto& c : counts) {
    r.matched += c.matched;
    r.gold_total += c.gold;
    r.pred_total += c.predicted;
    r.exact_match += c.exact() ? 1 : 0;
    ++r.sentences;
  }
  r.precision = r.pred_total > 0 ? static_cast<double>(r.matched) / r.pred_total : 0.0;
  r.recall = r.gold_total > 0 ? static_cast<double>(r.matched) / r.gold_total : 0.0;
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

EvalResult corpus_eval(const std::vector<SyntaxTree>& gold,
                       const std::vector<SyntaxTree>& predicted, const EvalOptions& options,
                       std::vector<SentenceCounts>* per_sentence) {
  if (gold.size() != predicted.size())
    throw DataError("corpus size mismatch: " + std::to_string(gold.size()) + " gold vs " +
                    std::to_string(predicted.size()) + " predicted trees");
  std::vector<SentenceCounts> counts;
  counts.reserve(gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) {
    try {
      counts.push_back(eval_spans(gold[i], predicted[i], options));
    } catch (const DataError& e) {
      throw DataError("sentence " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (per_sentence) *per_sentence = counts;
  return EvalResult::from_counts(counts);
}

EvalResult corpus_eval_files(const std::filesystem::path& gold, const std::filesystem::path& predicted,
                             const EvalOptions& options,
                             std::vector<SentenceCounts>* per_sentence) {
  return corpus_eval(read_treebank(gold), read_treebank(predicted), options, per_sentence);
}

std::string format_report(const EvalResult& r, const std::vector<SentenceCounts>* per_sentence) {
  std::ostringstream out;
  if (per_sentence) {
    out << "id\tlength\tmatched\tgold\tpred\n";
    for (std::size_t i = 0; i < per_sentence->size(); ++i) {
      const auto& c = (*per_sentence)[i];
      out << (i + 1) << '\t' << c.length << '\t' << c.matched << '\t' << c.gold << '\t'
          << c.predicted << '\n';
    }
  }
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "sentences\tmatched\tgold\tpred\tLP\tLR\tF1\texact\n";
  out << r.sentences << '\t' << r.matched << '\t' << r.gold_total << '\t' << r.pred_total << '\t'
      << r.precision << '\t' << r.recall << '\t' << r.f1 << '\t' << r.exact_match << '\n';
  return out.str();
}

RightBranchingBaseline RightBranchingBaseline::fit(const std::vector<BinaryTree>& corpus) {
  std::map<std::string, int> roots, spans;
  for (const auto& tree : corpus) {
    if (tree.nodes.empty()) continue;
    ++roots[tree.nodes.front().label];
    for (std::size_t i = 1; i < tree.nodes.size(); ++i)
      if (tree.nodes[i].label != kNullLabel) ++spans[tree.nodes[i].label];
  }
  auto most_frequent = [](const std::map<std::string, int>& counts, std::string fallback) {
    int best = 0;
    for (const auto& [label, count] : counts) {
      if (count > best) {
        best = count;
        fallback = label;
      }
    }
    return fallback;
  };
  return {most_frequent(roots, "S"), most_frequent(spans, "NP")};
}

SyntaxTree RightBranchingBaseline::parse(const std::vector<TaggedWord>& words) const {
  const int n = static_cast<int>(words.size());
  SpanSet spans;
  for (int i = 1; i < n; ++i) spans.push_back({i, n, i == 1 ? root_label : span_label});
  return debinarize(build_binary_tree(leaves_from_words(words), std::move(spans)));
}

BenchResult speed_benchmark(const std::vector<std::vector<TaggedWord>>& sentences,
                            const Model& model, const DecodeOptions& options) {
  BenchResult r;
  if (sentences.empty()) return r;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& words : sentences) {
    parse_sentence(words, model, options, &r.work);
    r.tokens += static_cast<std::int64_t>(words.size());
    ++r.sentences;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.sentences_per_second = r.seconds > 0 ? r.sentences / r.seconds : 0.0;
  return r;
}

std::string format_bench(const BenchResult& r) {
  std::ostringstream out;
  out << "sentences\ttokens\tseconds\tsents_per_sec\tspans_processed\tsplit_candidates\n";
  out << r.sentences << '\t' << r.tokens << '\t' << r.seconds << '\t' << r.sentences_per_second
      << '\t' << r.work.spans_processed << '\t' << r.work.split_candidates << '\n';
  return out.str();
}

}  // namespace ptrparse
