#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rdob/errors.hpp"

namespace rdob::cli {

// Fixed "%.12g" formatting keeps repeated runs byte-identical.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw std::invalid_argument("cannot open for writing: " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) out_ << ',';
            out_ << header[i];
        }
        out_ << "\r\n";
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_number(values[i]);
        }
        out_ << "\r\n";
    }

    void row(const std::string& key, double value) {
        out_ << key << ',' << format_number(value) << "\r\n";
    }

private:
    std::ofstream out_;
};

}  // namespace rdob::cli
