#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "spot/errors.hpp"
#include "spot/strutil.hpp"

namespace spot {

/// Minimal CSV reader: header row required, fields split on commas (no quoting;
/// none of the pipeline schemas need it). Lines are 1-based in error messages.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return static_cast<int>(i);
        }
        raise(Errc::bad_input, "missing CSV column '" + name + "'");
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Errc::io_error, "cannot open " + path);
    CsvTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (line_no == 1) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            raise(Errc::bad_input, path + ": line " + std::to_string(line_no) + " has " +
                                       std::to_string(fields.size()) + " fields, expected " +
                                       std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    require(!table.header.empty(), Errc::bad_input, path + ": missing header row");
    return table;
}

inline double csv_double(const std::string& path, std::size_t row_idx, const std::string& field) {
    try {
        std::size_t pos = 0;
        double v = std::stod(field, &pos);
        require(pos == field.size(), Errc::bad_input, "trailing characters");
        return v;
    } catch (...) {
        raise(Errc::bad_input, path + ": line " + std::to_string(row_idx + 2) +
                                   ": bad numeric field '" + field + "'");
    }
}

inline long long csv_int(const std::string& path, std::size_t row_idx, const std::string& field) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(field, &pos);
        require(pos == field.size(), Errc::bad_input, "trailing characters");
        return v;
    } catch (...) {
        raise(Errc::bad_input, path + ": line " + std::to_string(row_idx + 2) +
                                   ": bad integer field '" + field + "'");
    }
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary), path_(path) {
        require(out_.good(), Errc::io_error, "cannot open " + path + " for writing");
    }

    void row(const std::vector<std::string>& fields) { out_ << join(fields, ",") << "\n"; }

    void close() {
        out_.close();
        require(out_.good(), Errc::io_error, "write failed: " + path_);
    }

private:
    std::ofstream out_;
    std::string path_;
};

} // namespace spot
