#include "admg/graph_io.hpp"

#include <algorithm>
#include <optional>
#include <sstream>
#include <vector>

#include "admg/errors.hpp"
#include "admg/io_util.hpp"

namespace admg {

nlohmann::json graph_to_json(const Admg& g) {
    nlohmann::json j;
    j["vertices"] = g.names();
    auto directed = nlohmann::json::array();
    auto bidirected = nlohmann::json::array();
    const auto& names = g.names();
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.directed(i, k)) directed.push_back({names[i], names[k]});
            if (k > i && g.bidirected(i, k)) bidirected.push_back({names[i], names[k]});
        }
    }
    j["directed"] = std::move(directed);
    j["bidirected"] = std::move(bidirected);
    return j;
}

namespace {

std::vector<std::pair<std::string, std::string>> read_pairs(const nlohmann::json& j,
                                                            const char* field) {
    std::vector<std::pair<std::string, std::string>> pairs;
    if (!j.contains(field)) return pairs;
    const auto& arr = j.at(field);
    if (!arr.is_array()) throw FormatError(std::string("graph field '") + field + "' must be an array");
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
            throw FormatError(std::string("graph field '") + field +
                              "' must hold pairs of vertex names");
        }
        pairs.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return pairs;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

Admg graph_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("vertices") || !j.at("vertices").is_array()) {
        throw FormatError("graph JSON needs a 'vertices' array");
    }
    std::vector<std::string> names;
    for (const auto& v : j.at("vertices")) {
        if (!v.is_string()) throw FormatError("graph field 'vertices' must hold strings");
        names.push_back(v.get<std::string>());
    }
    try {
        return Admg::from_edges(std::move(names), read_pairs(j, "directed"),
                                read_pairs(j, "bidirected"));
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("graph JSON: ") + e.what());
    }
}

std::string graph_to_edge_list(const Admg& g) {
    std::ostringstream out;
    const auto& names = g.names();
    for (const auto& n : names) out << n << '\n';
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t k = 0; k < g.size(); ++k)
            if (g.directed(i, k)) out << names[i] << " -> " << names[k] << '\n';
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t k = i + 1; k < g.size(); ++k)
            if (g.bidirected(i, k)) out << names[i] << " <-> " << names[k] << '\n';
    return out.str();
}

Admg graph_from_edge_list(std::string_view text) {
    std::vector<std::string> names;
    std::vector<std::pair<std::string, std::string>> directed;
    std::vector<std::pair<std::string, std::string>> bidirected;
    auto declare = [&names](const std::string& n) {
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    };

    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto split = [&](std::string_view arrow) -> std::optional<std::pair<std::string, std::string>> {
            const auto pos = body.find(arrow);
            if (pos == std::string::npos) return std::nullopt;
            auto lhs = trim(std::string_view(body).substr(0, pos));
            auto rhs = trim(std::string_view(body).substr(pos + arrow.size()));
            if (lhs.empty() || rhs.empty()) {
                throw FormatError("edge list line " + std::to_string(lineno) + ": missing endpoint");
            }
            return std::make_pair(std::move(lhs), std::move(rhs));
        };
        if (auto e = split("<->")) {
            declare(e->first);
            declare(e->second);
            bidirected.push_back(*e);
        } else if (auto e2 = split("->")) {
            declare(e2->first);
            declare(e2->second);
            directed.push_back(*e2);
        } else if (body.find_first_of(" \t") == std::string::npos) {
            declare(body);
        } else {
            throw FormatError("edge list line " + std::to_string(lineno) + ": cannot parse '" +
                              body + "'");
        }
    }
    return Admg::from_edges(std::move(names), directed, bidirected);
}

Admg load_graph(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    if (path.extension() == ".json") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError(path.string() + ": " + e.what());
        }
        return graph_from_json(j);
    }
    return graph_from_edge_list(text);
}

void save_graph(const Admg& g, const std::filesystem::path& path) {
    if (path.extension() == ".json") {
        write_file_atomic(path, graph_to_json(g).dump(2) + "\n");
    } else {
        write_file_atomic(path, graph_to_edge_list(g));
    }
}

}  // namespace admg
