#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace osgmm {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of a file's content, used to pin run inputs in output metadata.
std::string file_sha256(const std::filesystem::path& path);

/// Maps (seed, key) to a reproducible value in [0, 1) that does not depend on
/// the platform's std::hash.
double stable_unit_interval(std::uint64_t seed, std::string_view key);

}  // namespace osgmm
