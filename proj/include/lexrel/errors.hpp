#pragma once

#include <stdexcept>
#include <string>

namespace lexrel {

// Unreadable/unwritable files, failed renames, and similar OS-level trouble.
class io_error : public std::runtime_error {
 public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data: bad corpus tokens, wrong column counts, unknown
// relation tags, model schema mismatches. Messages carry file/line context.
class format_error : public std::runtime_error {
 public:
    explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lexrel
