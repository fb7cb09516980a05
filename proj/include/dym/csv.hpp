#ifndef DYM_CSV_HPP
#define DYM_CSV_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dym {

// 17 significant digits, locale independent.
std::string format_double(double v);
// Exact decimal parse; throws std::invalid_argument on junk.
double parse_double(std::string_view text);
std::vector<double> parse_double_list(std::string_view text, char sep);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    const std::vector<double>& column(const std::string& name) const;
    bool has(const std::string& name) const;
    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& in);

// Header row, then one LF-terminated row per sample.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::vector<std::string> header);
    void row(const std::vector<double>& values);

private:
    std::ostream& out_;
    std::size_t width_;
};

}  // namespace dym

#endif
