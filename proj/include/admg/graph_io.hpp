#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "admg/graph.hpp"

namespace admg {

/// {"vertices": [...], "directed": [[from, to], ...], "bidirected": [[a, b], ...]}
nlohmann::json graph_to_json(const Admg& g);
Admg graph_from_json(const nlohmann::json& j);

/// One vertex name per line, then "A -> B" and "A <-> B" lines.
/// Lines starting with '#' are comments.
std::string graph_to_edge_list(const Admg& g);
Admg graph_from_edge_list(std::string_view text);

/// Dispatches on extension: ".json" uses the JSON format, anything else the edge list.
Admg load_graph(const std::filesystem::path& path);
void save_graph(const Admg& g, const std::filesystem::path& path);

}  // namespace admg
