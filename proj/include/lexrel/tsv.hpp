#pragma once

// Small text/file helpers shared by the persistence code: tab splitting,
// fixed-precision number formatting, and atomic whole-file writes.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lexrel/errors.hpp"

namespace lexrel {

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

// 6 digits after the decimal point; the precision every persisted real uses.
inline std::string format_fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    return buf;
}

// 17 significant digits, enough to round-trip any IEEE double.
inline std::string format_sig17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

inline double parse_double(const std::string& text, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw format_error(context + ": trailing characters in number '" + text + "'");
        return v;
    } catch (const format_error&) {
        throw;
    } catch (const std::exception&) {
        throw format_error(context + ": expected a number, got '" + text + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& text, const std::string& context) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size()) throw format_error(context + ": trailing characters in count '" + text + "'");
        return v;
    } catch (const format_error&) {
        throw;
    } catch (const std::exception&) {
        throw format_error(context + ": expected a non-negative integer, got '" + text + "'");
    }
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open for reading: " + path);
    return in;
}

// Write-temp-then-rename so a crashed run never leaves a half-written file.
inline void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open for writing: " + tmp);
        out << content;
        out.flush();
        if (!out) throw io_error("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw io_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

inline std::string read_file(const std::string& path) {
    std::ifstream in = open_input(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace lexrel
