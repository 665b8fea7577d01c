#ifndef PIVDML_REPORT_HPP
#define PIVDML_REPORT_HPP

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace pivdml {

inline constexpr const char* kVersion = "1.0.0";

// Numbers are always rendered with %.10g so that identical runs produce
// byte-identical output.
inline std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
}

// FNV-1a over a string, used to fingerprint the effective configuration.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string fnv1a_hex(const std::string& s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(s)));
    return std::string(buf);
}

// Key/value report: one "key=value" per line, insertion order preserved.
class KvWriter {
public:
    void add(const std::string& key, const std::string& value) {
        lines_.push_back(key + "=" + value);
    }
    void add(const std::string& key, double value) { add(key, fmt_num(value)); }
    void add(const std::string& key, int value) { add(key, std::to_string(value)); }
    void add(const std::string& key, long long value) { add(key, std::to_string(value)); }

    void write(std::ostream& os) const {
        for (const auto& l : lines_) os << l << "\n";
    }

private:
    std::vector<std::string> lines_;
};

// Plain aligned table with a header row.
class TableWriter {
public:
    explicit TableWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    void write(std::ostream& os) const {
        std::vector<std::size_t> width(header_.size(), 0);
        for (std::size_t j = 0; j < header_.size(); ++j) width[j] = header_[j].size();
        for (const auto& row : rows_) {
            for (std::size_t j = 0; j < row.size() && j < width.size(); ++j) {
                width[j] = std::max(width[j], row[j].size());
            }
        }
        auto emit = [&](const std::vector<std::string>& row) {
            for (std::size_t j = 0; j < row.size(); ++j) {
                os << row[j];
                if (j + 1 < row.size()) {
                    for (std::size_t k = row[j].size(); k < width[j] + 2; ++k) os << ' ';
                }
            }
            os << "\n";
        };
        emit(header_);
        for (const auto& row : rows_) emit(row);
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace pivdml

#endif
