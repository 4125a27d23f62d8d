#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ptrparse/checkpoint.hpp"
#include "ptrparse/config.hpp"
#include "ptrparse/decoder.hpp"
#include "ptrparse/errors.hpp"
#include "ptrparse/evaluation.hpp"
#include "ptrparse/training.hpp"
#include "ptrparse/verification.hpp"

namespace {

using namespace ptrparse;

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kVerifyFailed = 3;

constexpr const char* kDefaultPunctuation = ", : `` '' .";

// Flag values collected as strings and applied on top of the config file.
struct Overrides {
  std::map<std::string, std::string> values;
  std::string config_path;

  void flag(CLI::App& app, const std::string& name, const std::string& key,
            const std::string& help) {
    app.add_option_function<std::string>(
        name, [this, key](const std::string& v) { values[key] = v; }, help);
  }

  RunConfig resolve() const {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    for (const auto& [k, v] : values) config.set(k, v);
    return config;
  }
};

std::vector<TaggedWord> split_tokens(const std::string& line, const std::string& delimiter,
                                     std::size_t line_no) {
  std::vector<TaggedWord> words;
  std::istringstream in(line);
  std::string item;
  while (in >> item) {
    const auto at = item.rfind(delimiter);
    if (at == std::string::npos || at == 0 || at + delimiter.size() == item.size())
      throw DataError("malformed token '" + item + "' at line " + std::to_string(line_no) +
                      " (expected word" + delimiter + "POS)");
    words.push_back({item.substr(0, at), item.substr(at + delimiter.size())});
  }
  return words;
}

// One sentence per line of "word_POS" items, or blank-line separated
// "word<TAB>POS" rows.
std::vector<std::vector<TaggedWord>> read_sentences(std::istream& in, const std::string& delimiter,
                                                    bool conll) {
  std::vector<std::vector<TaggedWord>> out;
  std::vector<TaggedWord> current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (conll) {
      std::istringstream row(line);
      std::string word, pos, extra;
      if (!(row >> word)) {
        if (!current.empty()) out.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (!(row >> pos) || (row >> extra))
        throw DataError("expected two columns at line " + std::to_string(line_no));
      current.push_back({word, pos});
    } else {
      auto words = split_tokens(line, delimiter, line_no);
      if (!words.empty()) out.push_back(std::move(words));
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::vector<BinaryTree> binarized(const std::vector<SyntaxTree>& trees) {
  std::vector<BinaryTree> out;
  out.reserve(trees.size());
  for (const auto& t : trees) out.push_back(binarize(t));
  return out;
}

void require(const std::filesystem::path& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing ") + what + " path");
  if (!std::filesystem::exists(path)) throw DataError(std::string(what) + " file not found: " + path.string());
}

int run_train(const RunConfig& config) {
  if (!config.seed_given) throw ConfigError("train needs --seed (or 'seed' in the config file)");
  require(config.train, "train");
  require(config.dev, "dev");
  if (config.model.empty()) throw ConfigError("missing model output path");
  const auto train = binarized(read_treebank(config.train));
  const auto dev = read_treebank(config.dev);
  const auto log_path = config.log.empty() ? std::filesystem::path(config.model.string() + ".log")
                                           : config.log;
  std::ofstream log(log_path);
  if (!log) throw DataError("cannot write " + log_path.string());
  log << "epoch\tmean_loss\tdev_f1\tlr\n";
  std::cerr << "training on " << train.size() << " trees, dev " << dev.size() << '\n';
  const auto result = ptrparse::train(train, dev, config.model_config, config.hyper,
                                      [&](const EpochRecord& r) {
                                        log << format_epoch(r) << '\n';
                                        log.flush();
                                        std::cerr << format_epoch(r) << '\n';
                                      });
  save_model(result.model, config.model);
  std::cerr << "best epoch " << result.best_epoch << ", dev F1 " << result.best_dev_f1 << '\n';
  return 0;
}

int run_parse(const RunConfig& config, const std::string& input, bool conll) {
  require(config.model, "model");
  const auto model = load_model(config.model);
  std::vector<std::vector<TaggedWord>> sentences;
  if (input.empty() || input == "-") {
    sentences = read_sentences(std::cin, config.delimiter, conll);
  } else {
    std::ifstream in(input);
    if (!in) throw DataError("cannot open input " + input);
    sentences = read_sentences(in, config.delimiter, conll);
  }
  DecodeOptions options{config.log_space_scores};
  for (const auto& words : sentences)
    std::cout << write_bracketed(parse_sentence(words, model, options)) << '\n';
  return 0;
}

int run_eval(const RunConfig& config, const std::string& gold, const std::string& predicted,
             bool per_sentence) {
  require(gold, "gold");
  require(predicted, "predicted");
  std::vector<SentenceCounts> counts;
  const auto result = corpus_eval_files(gold, predicted, config.eval_options(), &counts);
  std::cout << format_report(result, per_sentence ? &counts : nullptr);
  return 0;
}

int run_verify(int level, std::uint64_t seed) {
  const auto results = verify::run_verification(level, seed);
  bool all = true;
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    all = all && r.passed;
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name
              << std::string(width - r.name.size() + 2, ' ') << r.detail << '\n';
  }
  std::cout << (all ? "all properties hold\n" : "verification failed\n");
  return all ? 0 : kVerifyFailed;
}

int run_bench(const RunConfig& config, const std::string& corpus) {
  require(config.model, "model");
  const std::filesystem::path path = corpus.empty() ? config.test : std::filesystem::path(corpus);
  require(path, "test");
  const auto model = load_model(config.model);
  std::vector<std::vector<TaggedWord>> sentences;
  for (const auto& tree : read_treebank(path)) sentences.push_back(tagged_words(tree));
  std::cout << format_bench(speed_benchmark(sentences, model, {config.log_space_scores}));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pointing-based constituency parser"};
  app.require_subcommand(1);
  Overrides overrides;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", overrides.config_path, "flat key = value config file");
    overrides.flag(*sub, "--model", "model", "checkpoint path");
    overrides.flag(*sub, "--seed", "seed", "random seed");
    overrides.flag(*sub, "--delimiter", "delimiter", "word/POS delimiter in parse input");
    sub->add_flag_callback("--log-space-scores",
                           [&] { overrides.values["log_space_scores"] = "true"; },
                           "add log-probabilities in split scores");
  };

  auto* train = app.add_subcommand("train", "train a parser");
  common(train);
  overrides.flag(*train, "--train", "train", "bracketed training trees");
  overrides.flag(*train, "--dev", "dev", "bracketed development trees");
  overrides.flag(*train, "--layers", "layers", "self-attention layers");
  overrides.flag(*train, "--dim", "dim", "model dimension");
  overrides.flag(*train, "--batch", "batch", "sentences per update");
  overrides.flag(*train, "--epochs", "epochs", "training epochs");
  overrides.flag(*train, "--threads", "threads", "worker threads for gradients");
  overrides.flag(*train, "--log", "log", "epoch log path (default: <model>.log)");

  auto* parse = app.add_subcommand("parse", "parse POS-tagged sentences");
  common(parse);
  std::string input;
  bool conll = false;
  parse->add_option("input", input, "input file, '-' for stdin");
  parse->add_flag("--conll", conll, "two-column word/POS input");

  auto* eval = app.add_subcommand("eval", "labeled bracket scores");
  common(eval);
  std::string gold, predicted;
  bool per_sentence = false;
  eval->add_option("gold", gold, "gold trees")->required();
  eval->add_option("predicted", predicted, "predicted trees")->required();
  eval->add_flag("--per-sentence", per_sentence, "print a line per sentence");
  std::string punct;
  auto* punct_opt = eval->add_option("--punct-exclude", punct,
                                     "POS tags to delete before scoring (default set when empty)")
                        ->expected(0, 1);

  auto* verify_cmd = app.add_subcommand("verify", "check structural properties");
  int level = 8;
  std::uint64_t verify_seed = 7;
  verify_cmd->add_option("--level", level, "largest n for the exhaustive checks (2-10)")
      ->check(CLI::Range(2, 10));
  verify_cmd->add_option("--seed", verify_seed, "random seed");

  auto* bench = app.add_subcommand("bench", "parsing speed at batch size 1");
  common(bench);
  std::string corpus;
  bench->add_option("corpus", corpus, "bracketed trees to parse");
  overrides.flag(*bench, "--test", "test", "bracketed trees to parse");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (punct_opt->count() > 0) overrides.values["punct_exclude"] = punct.empty() ? kDefaultPunctuation : punct;
    if (*verify_cmd) return run_verify(level, verify_seed);
    const RunConfig config = overrides.resolve();
    try {
      config.hyper.validate();
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
    if (*train) return run_train(config);
    if (*parse) return run_parse(config, input, conll);
    if (*eval) return run_eval(config, gold, predicted, per_sentence);
    if (*bench) return run_bench(config, corpus);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
