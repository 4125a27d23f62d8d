#include "ptrparse/checkpoint.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ptrparse/errors.hpp"

namespace ptrparse {

namespace {

constexpr char kMagic[8] = {'P', 'T', 'R', 'P', 'A', 'R', 'S', 'E'};

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::string& out, T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto raw = std::bit_cast<std::array<char, sizeof(T)>>(value);
    std::reverse(raw.begin(), raw.end());
    out.append(raw.data(), sizeof(T));
  } else {
    out.append(reinterpret_cast<const char*>(&value), sizeof(T));
  }
}

template <typename T>
T take(const std::string& in, std::size_t& at) {
  if (at + sizeof(T) > in.size()) throw DataError("checkpoint is truncated");
  std::array<char, sizeof(T)> raw;
  std::memcpy(raw.data(), in.data() + at, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  at += sizeof(T);
  return std::bit_cast<T>(raw);
}

nlohmann::json config_json(const ModelConfig& c) {
  return {{"dim", c.dim},
          {"layers", c.layers},
          {"ffn_hidden", c.ffn_hidden},
          {"pointing_hidden", c.pointing_hidden},
          {"label_hidden", c.label_hidden},
          {"char_dim", c.char_dim},
          {"char_hidden", c.char_hidden},
          {"max_length", c.max_length}};
}

ModelConfig config_from(const nlohmann::json& j) {
  ModelConfig c;
  c.dim = j.at("dim");
  c.layers = j.at("layers");
  c.ffn_hidden = j.at("ffn_hidden");
  c.pointing_hidden = j.at("pointing_hidden");
  c.label_hidden = j.at("label_hidden");
  c.char_dim = j.at("char_dim");
  c.char_hidden = j.at("char_hidden");
  c.max_length = j.at("max_length");
  return c;
}

}  // namespace

std::string serialize_model(const Model& model) {
  const auto& v = model.vocab;
  nlohmann::json header;
  header["config"] = config_json(model.config);
  header["vocabulary"] = {{"words", v.words()},
                          {"word_counts", v.word_counts()},
                          {"chars", v.chars()},
                          {"pos_tags", v.pos_tags()},
                          {"general_labels", v.general_labels()},
                          {"unary_labels", v.unary_labels()}};
  auto& directory = header["tensors"] = nlohmann::json::array();
  model.params.for_each([&](const std::string& name, const Matrix& m) {
    directory.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  });
  const std::string text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, text.size());
  out += text;
  model.params.for_each([&](const std::string&, const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
  });
  return out;
}

Model deserialize_model(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw DataError("not a ptrparse checkpoint");
  std::size_t at = sizeof(kMagic);
  const auto version = take<std::uint32_t>(bytes, at);
  if (version != kCheckpointVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  const auto length = take<std::uint64_t>(bytes, at);
  if (at + length > bytes.size()) throw DataError("checkpoint is truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(at, length));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint header: ") + e.what());
  }
  at += length;

  Model model;
  try {
    model.config = config_from(header.at("config"));
    const auto& v = header.at("vocabulary");
    model.vocab = Vocabulary::from_lists(v.at("words"), v.at("word_counts"), v.at("chars"),
                                         v.at("pos_tags"), v.at("general_labels"),
                                         v.at("unary_labels"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint header: ") + e.what());
  }
  model.params = ModelParams::zeros(model.config, model.vocab);
  const auto& directory = header.at("tensors");
  std::size_t index = 0;
  model.params.for_each([&](const std::string& name, Matrix& m) {
    if (index >= directory.size() || directory[index].at("name") != name ||
        directory[index].at("rows") != m.rows() || directory[index].at("cols") != m.cols())
      throw DataError("checkpoint tensor mismatch at " + name);
    ++index;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = take<double>(bytes, at);
  });
  if (index != directory.size() || at != bytes.size())
    throw DataError("checkpoint has trailing data");
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  const auto bytes = serialize_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_model(buffer.str());
}

}  // namespace ptrparse
