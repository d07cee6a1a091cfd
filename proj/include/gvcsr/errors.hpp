#pragma once

#include <stdexcept>
#include <string>

namespace gvcsr {

// File access / malformed user input (CLI exit 2).
struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Violated format contracts: bad magic, truncated streams, checksum or
// dictionary-hash mismatches (CLI exit 3).
struct integrity_error : std::runtime_error {
    explicit integrity_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gvcsr
