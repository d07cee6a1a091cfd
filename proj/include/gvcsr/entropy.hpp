#pragma once

#include <cstdint>

#include "gvcsr/bitio.hpp"

namespace gvcsr {

// Order-0 Exp-Golomb. Unsigned value v is coded as (v+1) in binary preceded
// by (bit-width minus one) zeros: 0 -> "1", 1 -> "010", 2 -> "011", ...
// Signed values go through the zigzag map 0,-1,1,-2,2 -> 0,1,2,3,4 first.
void eg_encode_unsigned(BitWriter& bw, std::uint64_t v);
std::uint64_t eg_decode_unsigned(BitReader& br);

void eg_encode_signed(BitWriter& bw, std::int64_t v);
std::int64_t eg_decode_signed(BitReader& br);

// Analytic codeword lengths, used as test oracles.
unsigned eg_length_unsigned(std::uint64_t v);
unsigned eg_length_signed(std::int64_t v);

inline std::uint64_t zigzag(std::int64_t n) {
    return (static_cast<std::uint64_t>(n) << 1) ^ static_cast<std::uint64_t>(n >> 63);
}
inline std::int64_t unzigzag(std::uint64_t u) {
    return static_cast<std::int64_t>(u >> 1) ^ -static_cast<std::int64_t>(u & 1);
}

}  // namespace gvcsr
