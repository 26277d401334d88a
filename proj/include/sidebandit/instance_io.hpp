#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "sidebandit/environment.hpp"

namespace sidebandit {

// Instance files: {"means": [...], "sigma": [[...], ...]} with the string "inf"
// for an unobservable pair. Loading validates the instance.

Instance instance_from_json(const nlohmann::json& j);
nlohmann::json instance_to_json(const Instance& instance);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& instance, const std::filesystem::path& path);

/// "inf" for kInf, the number otherwise.
nlohmann::json sigma_to_json(double sigma);

}  // namespace sidebandit
