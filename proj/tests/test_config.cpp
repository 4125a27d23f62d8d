#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ptrparse/config.hpp"
#include "ptrparse/errors.hpp"

using namespace ptrparse;

TEST_CASE("key = value lines") {
  const auto kv = parse_key_values("# comment\ndim = 32\n\n  epochs=5 # trailing\n");
  REQUIRE(kv.size() == 2);
  CHECK(kv[0] == std::pair<std::string, std::string>{"dim", "32"});
  CHECK(kv[1] == std::pair<std::string, std::string>{"epochs", "5"});
  try {
    parse_key_values("dim = 3\nnonsense\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("setting values") {
  RunConfig c;
  c.set("dim", "32");
  c.set("learning_rate", "0.01");
  c.set("seed", "12");
  c.set("log_space_scores", "true");
  c.set("punct_exclude", ", : .");
  CHECK(c.model_config.dim == 32);
  CHECK(c.hyper.learning_rate == 0.01);
  CHECK(c.seed_given);
  CHECK(c.hyper.seed == 12);
  CHECK(c.log_space_scores);
  CHECK(c.punct_exclude == std::vector<std::string>{",", ":", "."});
  CHECK(c.eval_options().excluded_pos.count(":") == 1);
  CHECK(RunConfig{}.eval_options().excluded_pos.empty());
  CHECK_THROWS_AS(c.set("dim", "3x"), ConfigError);
  CHECK_THROWS_AS(c.set("colour", "red"), ConfigError);
  CHECK_THROWS_AS(c.set("log_space_scores", "maybe"), ConfigError);
  for (const auto& key : config_keys()) CHECK_NOTHROW(c.set(key, key == "log_space_scores" ? "false" : "1"));
}

TEST_CASE("config files") {
  const auto path = std::filesystem::temp_directory_path() / "ptrparse_config_test.cfg";
  {
    std::ofstream out(path);
    out << "train = a.txt\nlayers = 3\nbatch = 4\n";
  }
  const auto c = load_config(path);
  CHECK(c.train == "a.txt");
  CHECK(c.model_config.layers == 3);
  CHECK(c.hyper.batch_size == 4);
  CHECK_FALSE(c.seed_given);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path), ConfigError);
}
