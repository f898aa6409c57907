#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hodge_transport/chains.hpp"
#include "hodge_transport/common.hpp"

namespace hodge_transport {

// ---------------------------------------------------------------------------
// Deterministic float formatting: shortest round-trip representation, so
// rerunning a configuration produces byte-identical files.
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
    if (v == kInfinity) return "inf";
    if (v == -kInfinity) return "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Point-cloud CSV: header `t,x,y`, one row per point, frames grouped by equal
// t values in time order.
// ---------------------------------------------------------------------------

inline void save_point_cloud_csv(const PointCloudSeries& series,
                                 const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_point_cloud_csv: cannot open " + path);
    out << "t,x,y\n";
    for (const auto& frame : series.frames) {
        for (const auto& p : frame.points) {
            out << format_double(frame.time) << ',' << format_double(p.x()) << ','
                << format_double(p.y()) << '\n';
        }
    }
}

inline PointCloudSeries load_point_cloud_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("load_point_cloud_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw InvalidInputError("load_point_cloud_csv: empty file");
    // Tolerate an optional header.
    auto parse_row = [](const std::string& row, double out[3]) {
        std::stringstream ss(row);
        std::string cell;
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(ss, cell, ',')) return false;
            try {
                out[c] = std::stod(cell);
            } catch (...) {
                return false;
            }
        }
        return true;
    };
    PointCloudSeries series;
    double row[3];
    if (parse_row(line, row)) {
        series.frames.push_back({row[0], {Eigen::Vector2d(row[1], row[2])}});
    } else if (line != "t,x,y") {
        throw InvalidInputError("load_point_cloud_csv: expected `t,x,y` header, got `" +
                                line + "`");
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (!parse_row(line, row))
            throw InvalidInputError("load_point_cloud_csv: bad row `" + line + "`");
        if (series.frames.empty() || series.frames.back().time != row[0]) {
            series.frames.push_back({row[0], {}});
        }
        series.frames.back().points.emplace_back(row[1], row[2]);
    }
    series.validate();
    return series;
}

// ---------------------------------------------------------------------------
// Flat key=value configuration files ('#' comments, blank lines ignored).
// ---------------------------------------------------------------------------

struct KeyValueConfig {
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
    double get_double(const std::string& key, double fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (...) {
            throw InvalidConfigError("config: key `" + key + "` is not a number: `" +
                                     it->second + "`");
        }
    }
    long get_int(const std::string& key, long fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        try {
            return std::stol(it->second);
        } catch (...) {
            throw InvalidConfigError("config: key `" + key + "` is not an integer: `" +
                                     it->second + "`");
        }
    }
};

inline KeyValueConfig parse_key_value(std::istream& in) {
    KeyValueConfig cfg;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) cfg.values[key] = val;
    }
    return cfg;
}

inline KeyValueConfig load_key_value(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfigError("config: cannot open " + path);
    return parse_key_value(in);
}

// ---------------------------------------------------------------------------
// Small CSV writer with deterministic formatting.
// ---------------------------------------------------------------------------

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw Error("CsvWriter: cannot open " + path);
        out_ << header << '\n';
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

inline std::string cell(double v) { return format_double(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(long v) { return std::to_string(v); }
inline std::string cell(std::uint64_t v) { return std::to_string(v); }

}  // namespace hodge_transport
