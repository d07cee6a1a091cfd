#include "gvcsr/entropy.hpp"

#include <bit>

namespace gvcsr {

void eg_encode_unsigned(BitWriter& bw, std::uint64_t v) {
    // v+1 can wrap only at v = 2^64-1, which no caller produces.
    std::uint64_t w = v + 1;
    auto width = static_cast<unsigned>(std::bit_width(w));
    for (unsigned i = 1; i < width; ++i) bw.put_bit(false);
    bw.put_bits(w, width);
}

std::uint64_t eg_decode_unsigned(BitReader& br) {
    unsigned zeros = 0;
    while (!br.get_bit()) {
        if (++zeros > 63) throw integrity_error("exp-golomb prefix too long");
    }
    std::uint64_t w = 1;
    for (unsigned i = 0; i < zeros; ++i) w = (w << 1) | (br.get_bit() ? 1 : 0);
    return w - 1;
}

void eg_encode_signed(BitWriter& bw, std::int64_t v) { eg_encode_unsigned(bw, zigzag(v)); }

std::int64_t eg_decode_signed(BitReader& br) { return unzigzag(eg_decode_unsigned(br)); }

unsigned eg_length_unsigned(std::uint64_t v) {
    return 2u * static_cast<unsigned>(std::bit_width(v + 1)) - 1u;
}

unsigned eg_length_signed(std::int64_t v) { return eg_length_unsigned(zigzag(v)); }

}  // namespace gvcsr
