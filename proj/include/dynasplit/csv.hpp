#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dynasplit::csv {

/// Shortest round-trip decimal form of a double. Used for every numeric CSV
/// cell so identical runs produce byte-identical files.
inline std::string dtos(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("dtos: to_chars failed");
    return std::string(buf, ptr);
}

inline double stod_strict(std::string_view s) {
    double v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error("csv: bad number '" + std::string(s) + "'");
    return v;
}

inline std::int64_t stoi_strict(std::string_view s) {
    std::int64_t v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::runtime_error("csv: bad integer '" + std::string(s) + "'");
    return v;
}

/// Writer with a mandatory versioned schema tag; first line is
/// "# <tag>", second line the header row.
class Writer {
public:
    Writer(const std::string& path, std::string_view schema_tag,
           std::string_view header)
        : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("csv: cannot open " + path);
        out_ << "# " << schema_tag << "\n" << header << "\n";
    }

    void raw_row(const std::string& line) { out_ << line << "\n"; }

    template <typename... Ts>
    void row(const Ts&... fields) {
        bool first = true;
        ((out_ << (first ? "" : ","), first = false, put(fields)), ...);
        out_ << "\n";
    }

private:
    template <typename T>
    void put(const T& v) {
        if constexpr (std::is_same_v<T, double>) out_ << dtos(v);
        else out_ << v;
    }

    std::ofstream out_;
};

struct Table {
    std::string schema_tag;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::runtime_error("csv: missing column '" + std::string(name) + "'");
    }
};

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

/// Reads a whole CSV file; verifies the schema tag when `expect_tag` is given.
inline Table read(const std::string& path, std::string_view expect_tag = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    Table t;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        throw std::runtime_error("csv: missing schema tag in " + path);
    t.schema_tag = line.substr(2);
    if (!expect_tag.empty() && t.schema_tag != expect_tag)
        throw std::runtime_error("csv: schema tag '" + t.schema_tag +
                                 "' in " + path + ", expected '" +
                                 std::string(expect_tag) + "'");
    if (!std::getline(in, line))
        throw std::runtime_error("csv: missing header in " + path);
    t.header = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        t.rows.push_back(split_line(line));
        if (t.rows.back().size() != t.header.size())
            throw std::runtime_error("csv: ragged row in " + path);
    }
    return t;
}

}  // namespace dynasplit::csv
