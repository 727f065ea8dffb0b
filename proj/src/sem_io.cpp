#include "admg/sem_io.hpp"

#include <sstream>
#include <vector>

#include "admg/errors.hpp"
#include "admg/io_util.hpp"

namespace admg {

std::string dataset_to_csv(const Dataset& data) {
    std::string out;
    const auto& names = data.names();
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (c > 0) out += ',';
        out += names[c];
    }
    out += '\n';
    const Matrix& x = data.data();
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            if (c > 0) out += ',';
            out += format_roundtrip(x(r, c));
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

std::string strip(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\"");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

Dataset dataset_from_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
        start = end + 1;
    }
    if (lines.empty()) throw FormatError("CSV is empty");

    std::vector<std::string> names;
    for (auto field : split_commas(lines.front())) {
        std::string name = strip(field);
        if (name.empty()) throw FormatError("CSV header has an empty column name");
        names.push_back(std::move(name));
    }
    const auto d = static_cast<Eigen::Index>(names.size());
    Matrix x(static_cast<Eigen::Index>(lines.size() - 1), d);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_commas(lines[r]);
        if (static_cast<Eigen::Index>(fields.size()) != d) {
            throw FormatError("CSV row " + std::to_string(r + 1) + " has " + std::to_string(fields.size()) +
                              " fields, expected " + std::to_string(d));
        }
        for (Eigen::Index c = 0; c < d; ++c) {
            try {
                x(static_cast<Eigen::Index>(r - 1), c) = parse_double(fields[static_cast<std::size_t>(c)]);
            } catch (const FormatError&) {
                throw FormatError("CSV row " + std::to_string(r + 1) + ", column '" +
                                  names[static_cast<std::size_t>(c)] + "': not a number: '" +
                                  strip(fields[static_cast<std::size_t>(c)]) + "'");
            }
        }
    }
    try {
        return Dataset(std::move(x), std::move(names));
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("CSV: ") + e.what());
    }
}

Dataset load_dataset(const std::filesystem::path& path) {
    try {
        return dataset_from_csv(read_text_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
    write_file_atomic(path, dataset_to_csv(data));
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_array()) {
        throw FormatError(std::string("parameter JSON needs a '") + field + "' array");
    }
    const auto& rows = j.at(field);
    const auto d = static_cast<Eigen::Index>(rows.size());
    Matrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
            throw FormatError(std::string("parameter field '") + field + "' must be a square matrix");
        }
        for (Eigen::Index c = 0; c < d; ++c) {
            const auto& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) throw FormatError(std::string("parameter field '") + field + "' must hold numbers");
            m(r, c) = v.get<double>();
        }
    }
    return m;
}

}  // namespace

nlohmann::json params_to_json(const SemParams& p) {
    nlohmann::json j;
    j["names"] = p.names;
    j["delta"] = matrix_to_json(p.delta);
    j["beta"] = matrix_to_json(p.beta);
    return j;
}

SemParams params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw FormatError("parameter JSON must be an object");
    SemParams p;
    p.delta = matrix_from_json(j, "delta");
    p.beta = matrix_from_json(j, "beta");
    if (j.contains("names")) {
        for (const auto& n : j.at("names")) {
            if (!n.is_string()) throw FormatError("parameter field 'names' must hold strings");
            p.names.push_back(n.get<std::string>());
        }
    } else {
        p.names = Admg::with_default_names(static_cast<std::size_t>(p.delta.rows())).names();
    }
    try {
        p.validate();
    } catch (const Error& e) {
        throw FormatError(std::string("parameter JSON: ") + e.what());
    }
    return p;
}

SemParams load_params(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return params_from_json(j);
}

void save_params(const SemParams& p, const std::filesystem::path& path) {
    write_file_atomic(path, params_to_json(p).dump(2) + "\n");
}

}  // namespace admg
