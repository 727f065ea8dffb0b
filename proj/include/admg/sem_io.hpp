#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "admg/linsem.hpp"

namespace admg {

/// Header row of column names, then one row of decimal numbers per observation.
/// Values are written in shortest round-trip form, so reading back is exact.
std::string dataset_to_csv(const Dataset& data);
Dataset dataset_from_csv(std::string_view text);
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

/// {"names": [...], "delta": [[...], ...], "beta": [[...], ...]}, row-major.
nlohmann::json params_to_json(const SemParams& p);
SemParams params_from_json(const nlohmann::json& j);
SemParams load_params(const std::filesystem::path& path);
void save_params(const SemParams& p, const std::filesystem::path& path);

}  // namespace admg
