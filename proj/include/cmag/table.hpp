#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cmag/config.hpp"

namespace cmag {

/// Rectangular columnar text: one `# name(unit), name(unit), ...` header
/// line, '#' comments, whitespace-delimited numeric rows. Deterministic
/// locale-independent formatting.
struct Table {
    struct Column {
        std::string name;
        std::string unit; // empty = dimensionless
        std::vector<double> values;
    };
    std::vector<Column> columns;

    Column& add(const std::string& name, const std::string& unit = "");
    void append_row(const std::vector<double>& row);
    std::size_t rows() const;

    void write(std::ostream& out) const;
    void save(const std::string& path) const;

    /// Throws config_error with a line number on malformed input.
    static Table load(const std::string& path);

    const Column* find(const std::string& name) const;
};

} // namespace cmag
