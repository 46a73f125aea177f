#include "evac/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "evac/errors.hpp"

namespace evac {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<std::string> splitCsvLine(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        const auto field = trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        out.emplace_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

CsvTable parseCsv(std::string_view text, const std::vector<std::string>& expectedHeader, const std::string& source) {
    CsvTable table;
    int lineNo = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++lineNo;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto fields = splitCsvLine(line);
        if (table.header.empty()) {
            if (fields != expectedHeader) {
                std::string want;
                for (std::size_t i = 0; i < expectedHeader.size(); ++i) want += (i ? "," : "") + expectedHeader[i];
                throw InputError(source + ": header must be '" + want + "'");
            }
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != expectedHeader.size()) {
            throw InputError(source + ":" + std::to_string(lineNo) + ": expected " + std::to_string(expectedHeader.size()) +
                             " fields, got " + std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
        table.lineNumbers.push_back(lineNo);
    }
    if (table.header.empty()) throw InputError(source + ": missing header line");
    return table;
}

CsvTable readCsv(const std::filesystem::path& path, const std::vector<std::string>& expectedHeader) {
    return parseCsv(readTextFile(path), expectedHeader, path.string());
}

double parseDouble(std::string_view s, const std::string& where) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw InputError(where + ": invalid number '" + std::string(s) + "'");
    }
    return v;
}

long long parseInt(std::string_view s, const std::string& where) {
    long long v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) throw InputError(where + ": invalid integer '" + std::string(s) + "'");
    return v;
}

std::string formatExact(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

std::string formatNumber(double v, int significant) {
    if (v == 0.0) return "0";  // avoids "-0"
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant, v);
    return buf;
}

std::string readTextFile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeTextFile(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write file: " + path.string());
    out << text;
    if (!out) throw InputError("write failed: " + path.string());
}

}  // namespace evac
