#include "dym/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dym {

std::string format_double(double v)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    return v;
}

std::vector<double> parse_double_list(std::string_view text, char sep)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(sep, start);
        const auto end = pos == std::string_view::npos ? text.size() : pos;
        out.push_back(parse_double(text.substr(start, end - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

const std::vector<double>& CsvTable::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return columns[i];
    throw std::invalid_argument("missing CSV column '" + name + "'");
}

bool CsvTable::has(const std::string& name) const
{
    for (const auto& h : header)
        if (h == name) return true;
    return false;
}

CsvTable parse_csv(std::istream& in)
{
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    t.columns.resize(t.header.size());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::size_t col = 0;
        for (std::string cell; std::getline(ls, cell, ','); ++col) {
            if (col >= t.header.size())
                throw std::invalid_argument("CSV line " + std::to_string(lineno) + " has too many cells");
            try {
                t.columns[col].push_back(parse_double(cell));
            } catch (const std::invalid_argument&) {
                throw std::invalid_argument("CSV line " + std::to_string(lineno) + ", column '" + t.header[col] +
                                            "': not a number: '" + cell + "'");
            }
        }
        if (line.back() == ',')
            throw std::invalid_argument("CSV line " + std::to_string(lineno) + " ends with an empty cell");
        if (col != t.header.size())
            throw std::invalid_argument("CSV line " + std::to_string(lineno) + " has " + std::to_string(col) +
                                        " cells, expected " + std::to_string(t.header.size()));
    }
    return t;
}

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    return parse_csv(in);
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header) : out_(out), width_(header.size())
{
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values)
{
    if (values.size() != width_) throw std::logic_error("CSV row width mismatch");
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += format_double(values[i]);
    }
    line += '\n';
    out_ << line;
}

}  // namespace dym
