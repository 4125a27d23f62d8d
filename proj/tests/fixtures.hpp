#pragma once

#include <string>
#include <vector>

#include "ptrparse/model.hpp"
#include "ptrparse/treebank.hpp"
#include "ptrparse/verification.hpp"

namespace fixtures {

inline const char* kSmallTreebank =
    "(S (NP (PRP She)) (VP (VBZ enjoys) (S (VP (VBG playing) (NP (NN tennis))))) (. .))\n"
    "(S (NP (DT the) (NN dog)) (VP (VBD barked)) (. .))\n"
    "(S (NP (PRP I)) (VP (VBD saw) (NP (DT a) (JJ big) (NN cat))))\n"
    "(FRAG (NP (NN help)) (. !))\n"
    "(NP (NN résumé))\n";

inline std::vector<ptrparse::SyntaxTree> small_trees() {
  return ptrparse::parse_bracketed(kSmallTreebank);
}

inline std::vector<ptrparse::BinaryTree> small_corpus() {
  std::vector<ptrparse::BinaryTree> out;
  for (const auto& t : small_trees()) out.push_back(ptrparse::binarize(t));
  return out;
}

inline ptrparse::ModelConfig tiny_config() {
  ptrparse::ModelConfig c;
  c.dim = 8;
  c.layers = 1;
  c.ffn_hidden = 6;
  c.pointing_hidden = 5;
  c.label_hidden = 4;
  c.char_dim = 4;
  c.char_hidden = 3;
  c.max_length = 12;
  return c;
}

inline std::vector<ptrparse::TaggedWord> words_of(const ptrparse::BinaryTree& tree) {
  std::vector<ptrparse::TaggedWord> out;
  for (const auto& l : tree.leaves) out.push_back({l.word, l.pos});
  return out;
}

}  // namespace fixtures
