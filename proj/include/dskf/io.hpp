#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dskf/generation.hpp"
#include "dskf/partition.hpp"

namespace dskf {

/// Bad invocation (unknown flag, invalid combination). Exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input data. Exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

}  // namespace detail

/// Load a comma-separated dataset with a header row. Feature columns must be
/// numeric; the optional label column (matched by header name) becomes the
/// ground truth, with string labels mapped to dense ids in first-occurrence
/// order.
inline Dataset load_dataset(const std::string& path,
                            const std::optional<std::string>& label_column = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty dataset: " + path);
    std::vector<std::string> header = detail::split_csv_line(line);
    int label_idx = -1;
    if (label_column) {
        for (size_t j = 0; j < header.size(); ++j)
            if (header[j] == *label_column) label_idx = static_cast<int>(j);
        if (label_idx < 0)
            throw DataError("label column '" + *label_column + "' not found in " + path);
    }

    Dataset ds;
    ds.name = path;
    std::vector<int> gt_labels;
    std::map<std::string, int> label_ids;
    int row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError("row " + std::to_string(row_no) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        for (size_t j = 0; j < cells.size(); ++j) {
            if (static_cast<int>(j) == label_idx) {
                auto [it, fresh] = label_ids.emplace(cells[j], static_cast<int>(label_ids.size()));
                gt_labels.push_back(it->second);
                (void)fresh;
            } else {
                auto v = detail::parse_double(cells[j]);
                if (!v)
                    throw DataError("non-numeric feature cell '" + cells[j] + "' at row " +
                                    std::to_string(row_no));
                ds.features.push_back(*v);
            }
        }
        ++ds.n;
    }
    if (ds.n == 0) throw DataError("empty dataset: " + path);
    ds.d = static_cast<int>(header.size()) - (label_idx >= 0 ? 1 : 0);
    if (label_idx >= 0) ds.ground_truth = Partition(std::move(gt_labels));
    ds.validate();
    return ds;
}

/// Z-score each feature column (constant columns are left untouched).
inline void standardize(Dataset& ds) {
    for (int j = 0; j < ds.d; ++j) {
        double mean = 0.0;
        for (int i = 0; i < ds.n; ++i) mean += ds.features[static_cast<size_t>(i) * ds.d + j];
        mean /= ds.n;
        double var = 0.0;
        for (int i = 0; i < ds.n; ++i) {
            double dev = ds.features[static_cast<size_t>(i) * ds.d + j] - mean;
            var += dev * dev;
        }
        double sd = std::sqrt(var / ds.n);
        if (sd == 0.0) continue;
        for (int i = 0; i < ds.n; ++i) {
            double& x = ds.features[static_cast<size_t>(i) * ds.d + j];
            x = (x - mean) / sd;
        }
    }
}

/// One integer label per line.
inline Partition load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open label file: " + path);
    std::vector<int> labels;
    std::string line;
    int row_no = 0;
    while (std::getline(in, line)) {
        ++row_no;
        std::string t = detail::trim(line);
        if (t.empty()) continue;
        int v = 0;
        auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || p != t.data() + t.size() || v < 0)
            throw DataError("bad label '" + t + "' at line " + std::to_string(row_no) +
                            " in " + path);
        labels.push_back(v);
    }
    if (labels.empty()) throw DataError("empty label file: " + path);
    return Partition(std::move(labels));
}

inline void save_labels(const Partition& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write label file: " + path);
    for (int l : p.labels()) out << l << "\n";
}

inline nlohmann::json ensemble_to_json(const Ensemble& ens) {
    nlohmann::json j;
    j["n"] = ens.n();
    j["m"] = ens.size();
    j["aligned"] = ens.aligned;
    if (ens.reference_index) j["reference_index"] = *ens.reference_index;
    j["partitions"] = nlohmann::json::array();
    for (const auto& p : ens.partitions) j["partitions"].push_back(p.labels());
    return j;
}

inline Ensemble ensemble_from_json(const nlohmann::json& j) {
    Ensemble ens;
    for (const auto& labels : j.at("partitions"))
        ens.partitions.push_back(Partition(labels.get<std::vector<int>>()));
    ens.aligned = j.value("aligned", false);
    if (j.contains("reference_index")) ens.reference_index = j["reference_index"].get<int>();
    ens.validate();
    return ens;
}

inline void save_ensemble(const Ensemble& ens, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write ensemble file: " + path);
    out << ensemble_to_json(ens).dump(2) << "\n";
}

inline Ensemble load_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open ensemble file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        return ensemble_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad ensemble file " + path + ": " + e.what());
    }
}

}  // namespace dskf
