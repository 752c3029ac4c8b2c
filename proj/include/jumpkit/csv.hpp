#ifndef JUMPKIT_CSV_HPP
#define JUMPKIT_CSV_HPP

// CSV output with a one-line header and 17-significant-digit floats, so that
// doubles round-trip losslessly and identical runs are byte-identical.

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "jumpkit/errors.hpp"

namespace jumpkit {

inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& header) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open " + path + " for writing");
        out_ << header << '\n';
    }

    CsvWriter& field(double x) { return raw(format_double(x)); }
    CsvWriter& field(long long x) { return raw(std::to_string(x)); }
    CsvWriter& field(int x) { return raw(std::to_string(x)); }
    CsvWriter& field(const std::string& s) { return raw(s); }

    void end_row() {
        out_ << '\n';
        row_open_ = false;
        if (!out_) throw IoError("write failure on " + path_);
    }

  private:
    CsvWriter& raw(const std::string& s) {
        if (row_open_) out_ << ',';
        out_ << s;
        row_open_ = true;
        return *this;
    }

    std::string path_;
    std::ofstream out_;
    bool row_open_ = false;
};

}  // namespace jumpkit

#endif
