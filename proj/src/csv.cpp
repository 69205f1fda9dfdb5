#include "condreg/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace condreg {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t end = line.find(',', start);
        if (end == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, end - start));
        start = end + 1;
    }
    return fields;
}

double parse_double_field(const std::string& f, std::size_t line, std::size_t col) {
    double v;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || ptr != f.data() + f.size())
        throw CsvError(line, col, "expected a number, got '" + f + "'");
    if (!std::isfinite(v)) throw CsvError(line, col, "non-finite value");
    return v;
}

bool parse_bit_field(const std::string& f, std::size_t line, std::size_t col) {
    if (f == "0") return false;
    if (f == "1") return true;
    throw CsvError(line, col, "expected 0 or 1, got '" + f + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Pulls non-empty lines one at a time; tolerates a trailing newline.
struct LineReader {
    const std::string& text;
    std::size_t pos = 0;
    std::size_t line_no = 0;

    bool next(std::string& out) {
        while (pos < text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string::npos) end = text.size();
            out = text.substr(pos, end - pos);
            if (!out.empty() && out.back() == '\r') out.pop_back();
            pos = end + 1;
            ++line_no;
            if (!out.empty()) return true;
        }
        return false;
    }
};

} // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("double format failure");
    return std::string(buf, ptr);
}

std::string dataset_to_csv(const Dataset& dataset) {
    const std::size_t n = dataset.attr_count(), d = dataset.feature_count();
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += "x" + std::to_string(i) + ",";
    for (std::size_t i = 0; i < d; ++i) out += "y" + std::to_string(i) + ",";
    out += "z\n";
    for (std::size_t j = 0; j < dataset.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) out += dataset.x_at(j, i) ? "1," : "0,";
        for (std::size_t i = 0; i < d; ++i) {
            out += format_double(dataset.y_at(j, i));
            out += ',';
        }
        out += format_double(dataset.z()[j]);
        out += '\n';
    }
    return out;
}

Dataset dataset_from_csv(const std::string& text) {
    LineReader reader{text};
    std::string line;
    if (!reader.next(line)) throw CsvError(1, 1, "missing header");
    auto header = split_line(line);
    std::size_t n = 0, d = 0;
    std::size_t idx = 0;
    while (idx < header.size() && header[idx] == "x" + std::to_string(idx)) ++idx;
    n = idx;
    while (idx < header.size() && header[idx] == "y" + std::to_string(idx - n)) ++idx;
    d = idx - n;
    if (idx + 1 != header.size() || header[idx] != "z")
        throw CsvError(1, idx + 1, "header must be x0..x{n-1},y0..y{d-1},z");

    Dataset ds(n, d);
    while (reader.next(line)) {
        auto fields = split_line(line);
        if (fields.size() != n + d + 1)
            throw CsvError(reader.line_no, fields.size(),
                           "expected " + std::to_string(n + d + 1) + " fields, got " +
                               std::to_string(fields.size()));
        Example e;
        e.x = BitVec(n);
        for (std::size_t i = 0; i < n; ++i)
            if (parse_bit_field(fields[i], reader.line_no, i + 1)) e.x.set(i);
        e.y.resize(d);
        for (std::size_t i = 0; i < d; ++i)
            e.y[i] = parse_double_field(fields[n + i], reader.line_no, n + i + 1);
        e.z = parse_double_field(fields[n + d], reader.line_no, n + d + 1);
        ds.add(e);
    }
    return ds;
}

void write_dataset_csv(const Dataset& dataset, const std::string& path) {
    write_file(path, dataset_to_csv(dataset));
}

Dataset read_dataset_csv(const std::string& path) {
    return dataset_from_csv(read_file(path));
}

void write_labeled_csv(const std::vector<LabeledExample>& rows, std::size_t n,
                       const std::string& path) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) out += "x" + std::to_string(i) + ",";
    out += "b\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < n; ++i) out += r.x.test(i) ? "1," : "0,";
        out += r.b ? "1\n" : "0\n";
    }
    write_file(path, out);
}

std::vector<LabeledExample> read_labeled_csv(const std::string& path, std::size_t& n_out) {
    std::string text = read_file(path);
    LineReader reader{text};
    std::string line;
    if (!reader.next(line)) throw CsvError(1, 1, "missing header");
    auto header = split_line(line);
    std::size_t idx = 0;
    while (idx < header.size() && header[idx] == "x" + std::to_string(idx)) ++idx;
    std::size_t n = idx;
    if (idx + 1 != header.size() || header[idx] != "b")
        throw CsvError(1, idx + 1, "header must be x0..x{n-1},b");

    std::vector<LabeledExample> rows;
    while (reader.next(line)) {
        auto fields = split_line(line);
        if (fields.size() != n + 1)
            throw CsvError(reader.line_no, fields.size(), "wrong field count");
        LabeledExample le;
        le.x = BitVec(n);
        for (std::size_t i = 0; i < n; ++i)
            if (parse_bit_field(fields[i], reader.line_no, i + 1)) le.x.set(i);
        le.b = parse_bit_field(fields[n], reader.line_no, n + 1);
        rows.push_back(std::move(le));
    }
    n_out = n;
    return rows;
}

} // namespace condreg
