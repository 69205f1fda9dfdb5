#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "condreg/types.hpp"

namespace condreg {

// Parse failure with 1-based line and column of the offending field.
class CsvError : public std::runtime_error {
public:
    CsvError(std::size_t line, std::size_t column, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + what),
          line(line), column(column) {}

    std::size_t line;
    std::size_t column;
};

// Dataset CSV: header "x0,..,x{n-1},y0,..,y{d-1},z"; x fields are exactly
// "0"/"1"; y and z use shortest round-trip decimal form.
void write_dataset_csv(const Dataset& dataset, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

std::string dataset_to_csv(const Dataset& dataset);
Dataset dataset_from_csv(const std::string& text);

// Labeled examples (x, b) use the header "x0,..,x{n-1},b".
void write_labeled_csv(const std::vector<LabeledExample>& rows, std::size_t n,
                       const std::string& path);
std::vector<LabeledExample> read_labeled_csv(const std::string& path, std::size_t& n_out);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

} // namespace condreg
