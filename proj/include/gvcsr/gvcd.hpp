#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gvcsr/dict_learn.hpp"

namespace gvcsr {

// Dictionary file format, bit-exact:
//   "GVCD" | version u16 LE | n u32 LE | m u32 LE |
//   n*m atom entries as f64 LE, column-major | CRC32 of the entry payload.
// The payload CRC doubles as the dictionary hash referenced by bitstream
// headers, so the hash covers exactly the atom values.
std::vector<std::uint8_t> serialize_dictionary(const Dictionary& d);
Dictionary parse_dictionary(const std::vector<std::uint8_t>& bytes);

void write_dictionary(const std::string& path, const Dictionary& d);
Dictionary read_dictionary(const std::string& path);

std::uint32_t dictionary_hash(const Dictionary& d);

}  // namespace gvcsr
