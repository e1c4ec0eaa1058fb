#pragma once

#include "osgmm/gmm.hpp"

#include <json.hpp>

#include <filesystem>

namespace osgmm {

inline constexpr int kGmmFormatVersion = 1;

/// Versioned JSON form of a GMM set. Doubles are written in shortest
/// round-trip form, so reading the document back reproduces every value
/// exactly. `extra_meta` entries are merged into "meta".
nlohmann::json to_json(const GmmSet& models, const nlohmann::json& extra_meta = nlohmann::json::object());
GmmSet gmm_set_from_json(const nlohmann::json& doc);

void write_gmm_set(const GmmSet& models, const std::filesystem::path& path,
                   const nlohmann::json& extra_meta = nlohmann::json::object());
GmmSet read_gmm_set(const std::filesystem::path& path);

}  // namespace osgmm
