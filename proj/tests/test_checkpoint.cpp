#include <doctest.h>

#include <filesystem>
#include <cstring>
#include <fstream>

#include "fixtures.hpp"
#include "ptrparse/checkpoint.hpp"
#include "ptrparse/errors.hpp"

using namespace ptrparse;

namespace {

Model tiny_model(std::uint64_t seed) {
  const auto corpus = fixtures::small_corpus();
  Model m{fixtures::tiny_config(), Vocabulary::build(corpus), {}};
  m.params = ModelParams::initialize(m.config, m.vocab, seed);
  return m;
}

bool same_params(const Model& a, const Model& b) {
  std::vector<const Matrix*> left;
  a.params.for_each([&](const std::string&, const Matrix& m) { left.push_back(&m); });
  bool same = true;
  std::size_t i = 0;
  b.params.for_each([&](const std::string&, const Matrix& m) { same = same && *left[i++] == m; });
  return same && i == left.size();
}

}  // namespace

TEST_CASE("serialization round trip is exact") {
  const auto m = tiny_model(3);
  const auto bytes = serialize_model(m);
  CHECK(bytes.substr(0, 8) == "PTRPARSE");
  const auto back = deserialize_model(bytes);
  CHECK(back.config == m.config);
  CHECK(back.vocab == m.vocab);
  CHECK(same_params(m, back));
  CHECK(serialize_model(back) == bytes);
}

TEST_CASE("tensor payload is little-endian doubles") {
  const auto m = tiny_model(3);
  const auto bytes = serialize_model(m);
  const std::size_t expected_payload = m.params.parameter_count() * 8;
  std::uint64_t header = 0;
  for (int b = 0; b < 8; ++b) header |= std::uint64_t(static_cast<unsigned char>(bytes[12 + b])) << (8 * b);
  CHECK(bytes.size() == 20 + header + expected_payload);
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b)
    bits |= std::uint64_t(static_cast<unsigned char>(bytes[20 + header + b])) << (8 * b);
  double first;
  std::memcpy(&first, &bits, 8);
  CHECK(first == m.params.word_embedding(0, 0));
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "ptrparse_checkpoint_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "m.bin";
  const auto m = tiny_model(5);
  save_model(m, path);
  CHECK(same_params(load_model(path), m));
  CHECK_THROWS_AS(load_model(dir / "missing.bin"), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("corrupt input") {
  const auto bytes = serialize_model(tiny_model(1));
  CHECK_THROWS_AS(deserialize_model("NOTAMODEL"), DataError);
  CHECK_THROWS_AS(deserialize_model(bytes.substr(0, bytes.size() - 3)), DataError);
  auto version = bytes;
  version[8] = 9;
  CHECK_THROWS_AS(deserialize_model(version), DataError);
  CHECK_THROWS_AS(deserialize_model(bytes + "x"), DataError);
}
