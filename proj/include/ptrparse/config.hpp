#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ptrparse/evaluation.hpp"
#include "ptrparse/model.hpp"
#include "ptrparse/training.hpp"

namespace ptrparse {

// "key = value" lines; '#' starts a comment. Throws ConfigError with the line
// number on anything else.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

struct RunConfig {
  std::filesystem::path train, dev, test, model, log;
  ModelConfig model_config;
  Hyperparams hyper;
  bool seed_given = false;
  // Whitespace-separated POS tags deleted before scoring; empty means score
  // every token.
  std::vector<std::string> punct_exclude;
  bool log_space_scores = false;
  std::string delimiter = "_";

  // Throws ConfigError for unknown keys and unparsable values.
  void set(std::string_view key, std::string_view value);
  EvalOptions eval_options() const;
};

RunConfig load_config(const std::filesystem::path& path);

// Keys accepted by RunConfig::set.
const std::vector<std::string>& config_keys();

}  // namespace ptrparse
