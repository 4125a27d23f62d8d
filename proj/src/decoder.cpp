#include "ptrparse/decoder.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "ptrparse/errors.hpp"

namespace ptrparse {

namespace {

double term(double probability, bool log_space) {
  return log_space ? std::log(probability) : probability;
}

}  // namespace

double split_score(const ScoreTables& t, int i, int k, int j, bool log_space) {
  const int n = t.size();
  if (i < 1 || j > n || k < i || k >= j)
    throw std::out_of_range("split (" + std::to_string(i) + "," + std::to_string(k) + "," +
                            std::to_string(j) + ") out of range for n = " + std::to_string(n));
  // gp(a, b) is stored at (a - 1, b - 1)
  if (k == i) return term(t.sp(i - 1, i - 1), log_space) + term(t.gp(i, j - 1), log_space);
  if (k == j - 1) return term(t.gp(j - 2, i - 1), log_space) + term(t.sp(j - 1, j - 1), log_space);
  return term(t.gp(k - 1, i - 1), log_space) + term(t.gp(k, j - 1), log_space);
}

int best_split(const ScoreTables& tables, int i, int j, const DecodeOptions& options) {
  if (j <= i) throw std::out_of_range("best_split needs j > i");
  int best = i;
  double best_score = split_score(tables, i, i, j, options.log_space);
  for (int k = i + 1; k < j; ++k) {
    const double s = split_score(tables, i, k, j, options.log_space);
    if (s > best_score) {
      best_score = s;
      best = k;
    }
  }
  return best;
}

int assign_label(const ScoreTables& tables, int position, LabelKind kind) {
  const Matrix& m = kind == LabelKind::kGeneral ? tables.gc : tables.uc;
  if (position < 1 || position > m.rows()) throw std::out_of_range("label position out of range");
  const auto row = m.row(position - 1);
  int best = 0;
  for (int l = 1; l < row.size(); ++l)
    if (row(l) > row(best)) best = l;
  return best;
}

BinaryTree decode(const ScoreTables& tables, const std::vector<TaggedWord>& words,
                  const std::vector<std::string>& general_labels,
                  const std::vector<std::string>& unary_labels, const DecodeOptions& options,
                  DecodeStats* stats) {
  const int n = tables.size();
  if (n < 1 || static_cast<int>(words.size()) != n)
    throw DataError("score tables do not match the sentence length");
  if (tables.gc.cols() != static_cast<Eigen::Index>(general_labels.size()) ||
      tables.uc.cols() != static_cast<Eigen::Index>(unary_labels.size()))
    throw DataError("label tables do not match the label inventories");

  std::vector<BinaryLeaf> leaves = leaves_from_words(words);
  for (int t = 1; t <= n; ++t) leaves[t - 1].unary = unary_labels[assign_label(tables, t, LabelKind::kUnary)];

  SpanSet spans;
  if (n >= 2) {
    auto general = [&](int position) {
      return general_labels[assign_label(tables, position, LabelKind::kGeneral)];
    };
    std::deque<std::pair<int, int>> queue{{1, n}};
    spans.push_back({1, n, general(1)});
    while (!queue.empty()) {
      const auto [i, j] = queue.front();
      queue.pop_front();
      if (stats) {
        ++stats->spans_processed;
        stats->split_candidates += j - i;
      }
      if (j <= i + 1) continue;
      const int k = best_split(tables, i, j, options);
      if (k == i) {
        queue.emplace_back(i + 1, j);
        spans.push_back({i + 1, j, general(i + 1)});
      } else if (k == j - 1) {
        queue.emplace_back(i, j - 1);
        spans.push_back({i, j - 1, general(j - 1)});
      } else {
        queue.emplace_back(i, k);
        queue.emplace_back(k + 1, j);
        spans.push_back({i, k, general(k)});
        spans.push_back({k + 1, j, general(k + 1)});
      }
    }
  }
  return build_binary_tree(std::move(leaves), std::move(spans));
}

SyntaxTree parse_sentence(const std::vector<TaggedWord>& words, const Model& model,
                          const DecodeOptions& options, DecodeStats* stats) {
  const auto tables = forward(words, model.params, model.vocab);
  const auto tree = decode(tables, words, model.vocab.general_labels(),
                           model.vocab.unary_labels(), options, stats);
  return debinarize(tree);
}

}  // namespace ptrparse
