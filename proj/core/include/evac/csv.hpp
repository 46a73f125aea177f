#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace evac {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> lineNumbers;  // 1-based source line of each row
};

// Reads a comma-separated file. Blank lines and lines starting with '#' are skipped.
// The first remaining line must equal `expectedHeader` (field by field, whitespace-trimmed).
CsvTable readCsv(const std::filesystem::path& path, const std::vector<std::string>& expectedHeader);
CsvTable parseCsv(std::string_view text, const std::vector<std::string>& expectedHeader, const std::string& source);

std::vector<std::string> splitCsvLine(std::string_view line);

double parseDouble(std::string_view s, const std::string& where);
long long parseInt(std::string_view s, const std::string& where);

// Shortest text that round-trips the double exactly.
std::string formatExact(double v);
// Fixed significant-digit formatting used in reports.
std::string formatNumber(double v, int significant = 12);

std::string readTextFile(const std::filesystem::path& path);
void writeTextFile(const std::filesystem::path& path, std::string_view text);

}  // namespace evac
