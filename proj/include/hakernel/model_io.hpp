#pragma once

#include <filesystem>
#include <string>

#include "hakernel/estimators.hpp"

namespace hakernel {

inline constexpr int kModelFormatVersion = 1;

/// Text header (magic, version, dims, feature names, END) followed by
/// little-endian doubles and a trailing FNV-1a 64 checksum over all prior bytes.
std::string serialize_model(const FittedModel& model);
FittedModel deserialize_model(const std::string& bytes, const std::string& source = "<memory>");

void save_model(const FittedModel& model, const std::filesystem::path& path);
FittedModel load_model(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace hakernel
