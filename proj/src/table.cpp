#include "cmag/table.hpp"

#include "cmag/strfmt.hpp"
#include <fstream>
#include <sstream>

namespace cmag {

Table::Column& Table::add(const std::string& name, const std::string& unit) {
    columns.push_back({name, unit, {}});
    return columns.back();
}

void Table::append_row(const std::vector<double>& row) {
    if (row.size() != columns.size())
        throw config_error("table: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i)
        columns[i].values.push_back(row[i]);
}

std::size_t Table::rows() const {
    return columns.empty() ? 0 : columns.front().values.size();
}

void Table::write(std::ostream& out) const {
    out << "#";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out << ' ' << columns[i].name;
        if (!columns[i].unit.empty())
            out << '(' << columns[i].unit << ')';
        if (i + 1 < columns.size())
            out << ',';
    }
    out << '\n';
    const std::size_t n = rows();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c)
                out << '\t';
            out << strfmt("%.12g", columns[c].values[r]);
        }
        out << '\n';
    }
}

void Table::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out)
        throw config_error("cannot open output file '" + path + "'");
    write(out);
}

Table Table::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open data file '" + path + "'");

    Table table;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where =
            path + ":" + std::to_string(lineno) + ": ";
        if (!line.empty() && line.front() == '#') {
            if (have_header)
                continue; // later comments are ignored
            // header: # name(unit), name(unit), ...
            std::string body = line.substr(1);
            std::stringstream fields(body);
            std::string field;
            while (std::getline(fields, field, ',')) {
                auto first = field.find_first_not_of(" \t");
                auto last = field.find_last_not_of(" \t\r");
                if (first == std::string::npos)
                    continue;
                field = field.substr(first, last - first + 1);
                const auto open = field.find('(');
                if (open != std::string::npos) {
                    const auto close = field.find(')', open);
                    if (close == std::string::npos)
                        throw config_error(where + "unterminated unit");
                    table.add(field.substr(0, open),
                              field.substr(open + 1, close - open - 1));
                } else {
                    table.add(field);
                }
            }
            if (!table.columns.empty())
                have_header = true;
            continue;
        }
        std::istringstream row(line);
        std::vector<double> values;
        double v;
        while (row >> v)
            values.push_back(v);
        if (values.empty())
            continue;
        if (!have_header)
            throw config_error(where + "data before header line");
        if (values.size() != table.columns.size())
            throw config_error(where + "expected " +
                               std::to_string(table.columns.size()) +
                               " columns, got " +
                               std::to_string(values.size()));
        table.append_row(values);
    }
    if (!have_header)
        throw config_error(path + ": missing '# name(unit), ...' header");
    return table;
}

const Table::Column* Table::find(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name)
            return &c;
    return nullptr;
}

} // namespace cmag
