#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gvcsr/errors.hpp"

namespace gvcsr {

// MSB-first bit sink. Streams are self-delimiting; byte alignment happens
// only at stream boundaries via align().
class BitWriter {
public:
    void put_bit(bool b) {
        acc_ = static_cast<std::uint8_t>((acc_ << 1) | (b ? 1 : 0));
        if (++fill_ == 8) {
            bytes_.push_back(acc_);
            acc_ = 0;
            fill_ = 0;
        }
        ++bits_;
    }

    // Writes the low `n` bits of v, most significant first. n <= 64.
    void put_bits(std::uint64_t v, unsigned n) {
        for (unsigned i = n; i-- > 0;) put_bit((v >> i) & 1);
    }

    void align() {
        while (fill_ != 0) put_bit(false);
    }

    std::size_t bit_count() const { return bits_; }

    // Flushes the partial byte (zero-padded). align() first for exact bytes.
    std::vector<std::uint8_t> take() {
        align();
        std::vector<std::uint8_t> out = std::move(bytes_);
        bytes_.clear();
        bits_ = 0;
        return out;
    }

private:
    std::vector<std::uint8_t> bytes_;
    std::uint8_t acc_ = 0;
    unsigned fill_ = 0;
    std::size_t bits_ = 0;
};

class BitReader {
public:
    BitReader(const std::uint8_t* data, std::size_t bit_count)
        : data_(data), bit_count_(bit_count) {}

    bool get_bit() {
        if (pos_ >= bit_count_) throw integrity_error("bit stream truncated");
        std::size_t byte = pos_ >> 3;
        unsigned off = 7u - static_cast<unsigned>(pos_ & 7);
        ++pos_;
        return (data_[byte] >> off) & 1;
    }

    std::uint64_t get_bits(unsigned n) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < n; ++i) v = (v << 1) | (get_bit() ? 1 : 0);
        return v;
    }

    std::size_t bits_left() const { return bit_count_ - pos_; }

private:
    const std::uint8_t* data_;
    std::size_t bit_count_;
    std::size_t pos_ = 0;
};

}  // namespace gvcsr
