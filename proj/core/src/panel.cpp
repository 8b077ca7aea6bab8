#include "specs/panel.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace specs {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    std::string out = s.substr(a, b - a);
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"')
        out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char ch : line) {
        if (ch == '"') {
            quoted = !quoted;
            cell.push_back(ch);
        } else if (ch == ',' && !quoted) {
            cells.push_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(ch);
        }
    }
    cells.push_back(trim(cell));
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && !cell.empty();
}

bool date_like_header(const std::string& header) {
    std::string h = header;
    std::transform(h.begin(), h.end(), h.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return h == "date" || h == "time" || h == "period" || h == "month" ||
           h == "quarter" || h == "year" || h == "index" || h == "t";
}

}  // namespace

void TimeSeriesPanel::validate() const {
    if (values.rows() < 2 || values.cols() < 2)
        throw std::invalid_argument("panel needs at least 2 periods and 2 series");
    if (target_index < 0 || target_index >= values.cols())
        throw std::invalid_argument("target index out of range");
    if (!labels.empty() && static_cast<Index>(labels.size()) != values.cols())
        throw std::invalid_argument("label count does not match series count");
    if (!values.allFinite())
        throw std::invalid_argument("panel contains non-finite values");
}

TimeSeriesPanel TimeSeriesPanel::window(Index first, Index count) const {
    if (first < 0 || count < 0 || first + count > values.rows())
        throw std::invalid_argument("window out of range");
    TimeSeriesPanel out;
    out.values = values.middleRows(first, count);
    out.target_index = target_index;
    out.labels = labels;
    return out;
}

TimeSeriesPanel parse_panel_csv(const std::string& text, const std::string& target) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2) throw std::invalid_argument("CSV needs at least two columns");

    std::vector<std::vector<double>> rows;
    std::vector<std::string> first_data_row;
    std::size_t line_no = 1;
    bool has_date_col = date_like_header(header[0]);
    bool date_checked = has_date_col;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            std::ostringstream msg;
            msg << "row " << line_no << " has " << cells.size() << " cells, expected "
                << header.size();
            throw std::invalid_argument(msg.str());
        }
        if (!date_checked) {
            // A first column that does not parse as a number is a date column.
            double probe;
            has_date_col = !parse_double(cells[0], probe);
            date_checked = true;
        }
        const std::size_t start = has_date_col ? 1 : 0;
        std::vector<double> row;
        row.reserve(cells.size() - start);
        for (std::size_t c = start; c < cells.size(); ++c) {
            double value;
            if (!parse_double(cells[c], value)) {
                std::ostringstream msg;
                msg << "cannot parse cell at row " << line_no << ", column '" << header[c]
                    << "' (value '" << cells[c] << "')";
                throw std::invalid_argument(msg.str());
            }
            row.push_back(value);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::invalid_argument("CSV has a header but no data rows");

    const std::size_t start = has_date_col ? 1 : 0;
    const std::size_t n_series = header.size() - start;
    if (n_series < 2) throw std::invalid_argument("CSV needs at least two series columns");

    TimeSeriesPanel panel;
    panel.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(n_series));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < n_series; ++c)
            panel.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    panel.labels.assign(header.begin() + static_cast<long>(start), header.end());

    if (!target.empty()) {
        int index = -1;
        bool numeric = !target.empty() &&
                       std::all_of(target.begin(), target.end(),
                                   [](unsigned char c) { return std::isdigit(c); });
        if (numeric) {
            index = std::stoi(target);
        } else {
            for (std::size_t c = 0; c < panel.labels.size(); ++c)
                if (panel.labels[c] == target) index = static_cast<int>(c);
            if (index < 0)
                throw std::invalid_argument("target series '" + target + "' not found");
        }
        if (index < 0 || index >= static_cast<int>(n_series))
            throw std::invalid_argument("target index out of range");
        panel.target_index = index;
    }

    panel.validate();
    return panel;
}

TimeSeriesPanel read_panel_csv(const std::string& path, const std::string& target) {
    std::ifstream file(path);
    if (!file) throw std::invalid_argument("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_panel_csv(buffer.str(), target);
}

}  // namespace specs
