#include "osgmm/hashing.hpp"

#include "osgmm/errors.hpp"

#include <openssl/sha.h>

#include <array>
#include <fstream>
#include <iterator>
#include <sstream>

namespace osgmm {

namespace {

std::array<unsigned char, SHA256_DIGEST_LENGTH> digest(std::string_view bytes) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> out{};
    SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), out.data());
    return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    static constexpr char kHex[] = "0123456789abcdef";
    const auto d = digest(bytes);
    std::string hex;
    hex.reserve(2 * d.size());
    for (const unsigned char byte : d) {
        hex.push_back(kHex[byte >> 4]);
        hex.push_back(kHex[byte & 0x0f]);
    }
    return hex;
}

std::string file_sha256(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(content);
}

double stable_unit_interval(std::uint64_t seed, std::string_view key) {
    const std::string message = std::to_string(seed) + ":" + std::string(key);
    const auto d = digest(message);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v = (v << 8) | d[static_cast<std::size_t>(i)];
    }
    return static_cast<double>(v >> 11) * 0x1.0p-53;
}

}  // namespace osgmm
