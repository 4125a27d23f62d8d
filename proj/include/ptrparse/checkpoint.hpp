#pragma once

#include <filesystem>
#include <string>

#include "ptrparse/model.hpp"

namespace ptrparse {

// Binary layout: "PTRPARSE", u32 version, u64 header length, JSON header
// (config, vocabulary, tensor directory), then every tensor as row-major
// little-endian f64 in directory order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string serialize_model(const Model& model);
Model deserialize_model(const std::string& bytes);

void save_model(const Model& model, const std::filesystem::path& path);
// Throws DataError on a missing file, bad magic, unknown version or shape
// mismatch.
Model load_model(const std::filesystem::path& path);

}  // namespace ptrparse
