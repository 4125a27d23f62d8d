#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ptrparse/checkpoint.hpp"
#include "ptrparse/decoder.hpp"
#include "ptrparse/errors.hpp"
#include "ptrparse/evaluation.hpp"
#include "ptrparse/pointing.hpp"
#include "ptrparse/training.hpp"
#include "ptrparse/treebank.hpp"
#include "ptrparse/verification.hpp"

namespace py = pybind11;
using namespace ptrparse;

namespace {

using Span = std::tuple<int, int, std::string>;
using Entry = std::tuple<int, int, std::string>;
using Word = std::pair<std::string, std::string>;

std::vector<TaggedWord> to_words(const std::vector<Word>& words) {
  std::vector<TaggedWord> out;
  out.reserve(words.size());
  for (const auto& [w, p] : words) out.push_back({w, p});
  return out;
}

std::vector<Word> from_words(const std::vector<TaggedWord>& words) {
  std::vector<Word> out;
  for (const auto& w : words) out.emplace_back(w.word, w.pos);
  return out;
}

std::vector<Span> from_spans(const SpanSet& spans) {
  std::vector<Span> out;
  for (const auto& s : spans) out.emplace_back(s.first, s.last, s.label);
  return out;
}

PointingSet to_pointing(const std::vector<Entry>& entries) {
  PointingSet p;
  for (const auto& [q, t, label] : entries) p.entries.push_back({q, t, label});
  return p;
}

std::vector<Entry> from_pointing(const PointingSet& p) {
  std::vector<Entry> out;
  for (const auto& e : p.entries) out.emplace_back(e.query, e.target, e.label);
  return out;
}

const char* issue_name(PointingIssue issue) {
  switch (issue) {
    case PointingIssue::kNone: return "none";
    case PointingIssue::kCoverage: return "coverage";
    case PointingIssue::kOutOfRange: return "out_of_range";
    case PointingIssue::kSelfPointing: return "self_pointing";
    case PointingIssue::kTrivialEntry: return "trivial_entry";
    case PointingIssue::kDuplicate: return "duplicate";
    case PointingIssue::kMissingRoot: return "missing_root";
    case PointingIssue::kOverlap: return "overlap";
    case PointingIssue::kNotBinary: return "not_binary";
    case PointingIssue::kNotMaximal: return "not_maximal";
  }
  return "unknown";
}

py::dict eval_dict(const EvalResult& r) {
  py::dict d;
  d["matched"] = r.matched;
  d["gold"] = r.gold_total;
  d["predicted"] = r.pred_total;
  d["exact_match"] = r.exact_match;
  d["sentences"] = r.sentences;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ptrparse, m) {
  m.doc() = "Pointing-based constituency parser";

  auto base = py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TreeError>(m, "TreeError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);
  (void)base;

  py::class_<SyntaxTree>(m, "Tree")
      .def_static(
          "from_string",
          [](const std::string& text) {
            auto trees = parse_bracketed(text);
            if (trees.size() != 1)
              throw DataError("expected exactly one tree, got " + std::to_string(trees.size()));
            return trees.front();
          },
          py::arg("text"))
      .def_readonly("label", &SyntaxTree::label)
      .def_readonly("word", &SyntaxTree::word)
      .def_readonly("children", &SyntaxTree::children)
      .def("is_preterminal", &SyntaxTree::is_preterminal)
      .def("tagged_words", [](const SyntaxTree& t) { return from_words(tagged_words(t)); })
      .def("__len__", [](const SyntaxTree& t) { return leaf_count(t); })
      .def("binarize", [](const SyntaxTree& t) { return binarize(t); })
      .def("__eq__", [](const SyntaxTree& a, const SyntaxTree& b) { return a == b; })
      .def("__str__", &write_bracketed)
      .def("__repr__", [](const SyntaxTree& t) { return "Tree(" + write_bracketed(t) + ")"; });

  py::class_<BinaryTree>(m, "BinaryTree")
      .def_static(
          "from_pointing",
          [](const std::vector<Entry>& entries, const std::vector<Word>& words) {
            return pointing_to_tree(to_pointing(entries), leaves_from_words(to_words(words)));
          },
          py::arg("entries"), py::arg("words"))
      .def("__len__", &BinaryTree::size)
      .def("spans", [](const BinaryTree& t) { return from_spans(spans_of(t)); })
      .def("unary_spans", [](const BinaryTree& t) { return from_spans(unary_spans_of(t)); })
      .def("leaves",
           [](const BinaryTree& t) {
             std::vector<std::tuple<std::string, std::string, std::string>> out;
             for (const auto& l : t.leaves) out.emplace_back(l.word, l.pos, l.unary);
             return out;
           })
      .def("pointing", [](const BinaryTree& t) { return from_pointing(tree_to_pointing(t)); })
      .def("debinarize", [](const BinaryTree& t) { return debinarize(t); })
      .def("__eq__", [](const BinaryTree& a, const BinaryTree& b) { return a == b; });

  m.def("parse_bracketed", [](const std::string& text) { return parse_bracketed(text); },
        py::arg("text"));
  m.def("read_treebank", [](const std::filesystem::path& p) { return read_treebank(p); },
        py::arg("path"));

  m.def(
      "validate_pointing",
      [](const std::vector<Entry>& entries) {
        const auto d = validate_pointing(to_pointing(entries));
        py::dict out;
        out["valid"] = d.valid();
        out["issue"] = issue_name(d.issue);
        out["token"] = d.token;
        out["queries"] = std::make_pair(d.first_query, d.second_query);
        out["message"] = d.message;
        return out;
      },
      py::arg("entries"));

  py::class_<ModelConfig>(m, "ModelConfig")
      .def(py::init<>())
      .def_readwrite("dim", &ModelConfig::dim)
      .def_readwrite("layers", &ModelConfig::layers)
      .def_readwrite("ffn_hidden", &ModelConfig::ffn_hidden)
      .def_readwrite("pointing_hidden", &ModelConfig::pointing_hidden)
      .def_readwrite("label_hidden", &ModelConfig::label_hidden)
      .def_readwrite("char_dim", &ModelConfig::char_dim)
      .def_readwrite("char_hidden", &ModelConfig::char_hidden)
      .def_readwrite("max_length", &ModelConfig::max_length);

  py::class_<Hyperparams>(m, "Hyperparams")
      .def(py::init<>())
      .def_readwrite("learning_rate", &Hyperparams::learning_rate)
      .def_readwrite("warmup_steps", &Hyperparams::warmup_steps)
      .def_readwrite("batch_size", &Hyperparams::batch_size)
      .def_readwrite("epochs", &Hyperparams::epochs)
      .def_readwrite("seed", &Hyperparams::seed)
      .def_readwrite("beta1", &Hyperparams::beta1)
      .def_readwrite("beta2", &Hyperparams::beta2)
      .def_readwrite("epsilon", &Hyperparams::epsilon)
      .def_readwrite("unk_min_count", &Hyperparams::unk_min_count)
      .def_readwrite("unk_probability", &Hyperparams::unk_probability)
      .def_readwrite("threads", &Hyperparams::threads)
      .def("validate", &Hyperparams::validate);

  py::class_<Model>(m, "Model")
      .def_static("load", &load_model, py::arg("path"))
      .def("save", [](const Model& model, const std::filesystem::path& p) { save_model(model, p); },
           py::arg("path"))
      .def_readonly("config", &Model::config)
      .def("parameter_count", [](const Model& model) { return model.params.parameter_count(); })
      .def("to_bytes", [](const Model& model) { return py::bytes(serialize_model(model)); })
      .def_static("from_bytes",
                  [](const py::bytes& b) { return deserialize_model(std::string(b)); })
      .def(
          "parse",
          [](const Model& model, const std::vector<Word>& words, bool log_space) {
            py::gil_scoped_release release;
            return parse_sentence(to_words(words), model, {log_space});
          },
          py::arg("words"), py::arg("log_space") = false)
      .def(
          "pointing_accuracy",
          [](const Model& model, const std::vector<SyntaxTree>& trees, bool include_self) {
            std::vector<BinaryTree> binary;
            for (const auto& t : trees) binary.push_back(binarize(t));
            return pointing_accuracy(model, binary, include_self);
          },
          py::arg("trees"), py::arg("include_self") = false);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("model", &TrainResult::model)
      .def_readonly("best_epoch", &TrainResult::best_epoch)
      .def_readonly("best_dev_f1", &TrainResult::best_dev_f1)
      .def_property_readonly("log", [](const TrainResult& r) {
        std::vector<std::tuple<int, double, double, double>> out;
        for (const auto& e : r.log) out.emplace_back(e.epoch, e.mean_loss, e.dev_f1, e.learning_rate);
        return out;
      });

  m.def(
      "train",
      [](const std::vector<SyntaxTree>& train_trees, const std::vector<SyntaxTree>& dev,
         const ModelConfig& config, const Hyperparams& hyper) {
        std::vector<BinaryTree> corpus;
        for (const auto& t : train_trees) corpus.push_back(binarize(t));
        py::gil_scoped_release release;
        return train(corpus, dev, config, hyper);
      },
      py::arg("train"), py::arg("dev"), py::arg("config") = ModelConfig{},
      py::arg("hyper") = Hyperparams{});

  m.def(
      "evaluate",
      [](const std::vector<SyntaxTree>& gold, const std::vector<SyntaxTree>& predicted,
         bool collins) {
        return eval_dict(corpus_eval(gold, predicted, collins ? EvalOptions::collins() : EvalOptions{}));
      },
      py::arg("gold"), py::arg("predicted"), py::arg("collins") = false);

  m.def(
      "verify",
      [](int level, std::uint64_t seed) {
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const auto& r : verify::run_verification(level, seed))
          out.emplace_back(r.name, r.passed, r.detail);
        return out;
      },
      py::arg("level") = 8, py::arg("seed") = 7);
}
