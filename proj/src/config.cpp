#include "ptrparse/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ptrparse/errors.hpp"

namespace ptrparse {

namespace {

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

template <typename T>
T number(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
  return out;
}

bool boolean(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::string item;
  for (char c : value) {
    if (c == ' ' || c == '\t') {
      if (!item.empty()) out.push_back(std::move(item));
      item.clear();
    } else {
      item += c;
    }
  }
  if (!item.empty()) out.push_back(std::move(item));
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("expected 'key = value' at line " + std::to_string(line_no));
    auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key at line " + std::to_string(line_no));
    out.emplace_back(std::move(key), trim(line.substr(eq + 1)));
  }
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "train", "dev", "test", "model", "log", "seed", "layers", "dim", "ffn_hidden",
      "pointing_hidden", "label_hidden", "char_dim", "char_hidden", "max_length", "batch",
      "epochs", "learning_rate", "warmup", "beta1", "beta2", "epsilon", "unk_min_count",
      "unk_probability", "threads", "punct_exclude", "log_space_scores", "delimiter"};
  return keys;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  auto& m = model_config;
  auto& h = hyper;
  if (key == "train") train = std::string(value);
  else if (key == "dev") dev = std::string(value);
  else if (key == "test") test = std::string(value);
  else if (key == "model") model = std::string(value);
  else if (key == "log") log = std::string(value);
  else if (key == "seed") {
    h.seed = number<std::uint64_t>(key, value);
    seed_given = true;
  }
  else if (key == "layers") m.layers = number<int>(key, value);
  else if (key == "dim") m.dim = number<int>(key, value);
  else if (key == "ffn_hidden") m.ffn_hidden = number<int>(key, value);
  else if (key == "pointing_hidden") m.pointing_hidden = number<int>(key, value);
  else if (key == "label_hidden") m.label_hidden = number<int>(key, value);
  else if (key == "char_dim") m.char_dim = number<int>(key, value);
  else if (key == "char_hidden") m.char_hidden = number<int>(key, value);
  else if (key == "max_length") m.max_length = number<int>(key, value);
  else if (key == "batch") h.batch_size = number<int>(key, value);
  else if (key == "epochs") h.epochs = number<int>(key, value);
  else if (key == "learning_rate") h.learning_rate = number<double>(key, value);
  else if (key == "warmup") h.warmup_steps = number<int>(key, value);
  else if (key == "beta1") h.beta1 = number<double>(key, value);
  else if (key == "beta2") h.beta2 = number<double>(key, value);
  else if (key == "epsilon") h.epsilon = number<double>(key, value);
  else if (key == "unk_min_count") h.unk_min_count = number<int>(key, value);
  else if (key == "unk_probability") h.unk_probability = number<double>(key, value);
  else if (key == "threads") h.threads = number<int>(key, value);
  else if (key == "punct_exclude") punct_exclude = split_list(value);
  else if (key == "log_space_scores") log_space_scores = boolean(key, value);
  else if (key == "delimiter") {
    if (value.empty()) throw ConfigError("delimiter must not be empty");
    delimiter = std::string(value);
  }
  else throw ConfigError("unknown config key: " + std::string(key));
}

EvalOptions RunConfig::eval_options() const {
  EvalOptions o;
  if (!punct_exclude.empty()) {
    o.excluded_pos.insert(punct_exclude.begin(), punct_exclude.end());
    o.excluded_labels = {"TOP"};
  }
  return o;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  RunConfig config;
  for (const auto& [k, v] : parse_key_values(buffer.str())) config.set(k, v);
  return config;
}

}  // namespace ptrparse
