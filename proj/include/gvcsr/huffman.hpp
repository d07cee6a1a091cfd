#pragma once

#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "gvcsr/bitio.hpp"

namespace gvcsr {

// One-shot canonical Huffman code built from empirical symbol counts. This is
// a measurement utility for the variance-vs-bits experiment; it is not part
// of any bitstream format (both sides of a measurement share the counts).
class Huffman {
public:
    // Deterministic for a given count multiset: ties in the tree build break
    // on symbol order, and code assignment is canonical by (length, symbol).
    // A single-symbol alphabet gets a 1-bit code. Rejects empty counts.
    static Huffman from_counts(const std::map<std::int64_t, std::uint64_t>& counts);

    unsigned length(std::int64_t symbol) const;
    void encode(BitWriter& bw, std::int64_t symbol) const;
    std::int64_t decode(BitReader& br) const;

    const std::vector<std::pair<std::int64_t, unsigned>>& code_lengths() const { return lengths_; }

private:
    std::vector<std::pair<std::int64_t, unsigned>> lengths_;     // (symbol, length), canonical order
    std::unordered_map<std::int64_t, std::pair<std::uint64_t, unsigned>> codes_;  // symbol -> (code, len)
    std::vector<std::uint64_t> first_code_;   // per length, canonical decode tables
    std::vector<std::size_t> first_index_;
    unsigned max_len_ = 0;
};

}  // namespace gvcsr
