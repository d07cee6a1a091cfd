#include <doctest.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gvcsr/entropy.hpp"
#include "gvcsr/huffman.hpp"
#include "gvcsr/rng.hpp"

using namespace gvcsr;

namespace {

std::string bits_of(const std::vector<std::uint8_t>& bytes, std::size_t nbits) {
    std::string s;
    for (std::size_t i = 0; i < nbits; ++i)
        s += ((bytes[i >> 3] >> (7 - (i & 7))) & 1) ? '1' : '0';
    return s;
}

}  // namespace

TEST_CASE("bit writer and reader agree, MSB first") {
    BitWriter bw;
    bw.put_bits(0b1011, 4);
    bw.put_bit(true);
    bw.put_bits(0x1234, 16);
    std::size_t n = bw.bit_count();
    CHECK(n == 21);
    auto bytes = bw.take();
    CHECK(bytes.size() == 3);  // padded to the byte boundary

    BitReader br(bytes.data(), n);
    CHECK(br.get_bits(4) == 0b1011);
    CHECK(br.get_bit());
    CHECK(br.get_bits(16) == 0x1234);
    CHECK(br.bits_left() == 0);
    CHECK_THROWS_AS(br.get_bit(), integrity_error);
}

TEST_CASE("align pads to the next byte with zeros") {
    BitWriter bw;
    bw.put_bits(0b101, 3);
    bw.align();
    CHECK(bw.bit_count() == 8);
    auto bytes = bw.take();
    CHECK(bytes.size() == 1);
    CHECK(bytes[0] == 0b10100000);
}

TEST_CASE("exp-golomb codewords match the published table") {
    // order-0: 0 -> 1, 1 -> 010, 2 -> 011, 3 -> 00100, 4 -> 00101, ...
    const char* want[] = {"1", "010", "011", "00100", "00101", "00110", "00111", "0001000"};
    for (std::uint64_t v = 0; v < 8; ++v) {
        BitWriter bw;
        eg_encode_unsigned(bw, v);
        std::size_t n = bw.bit_count();
        CHECK(bits_of(bw.take(), n) == want[v]);
        CHECK(n == eg_length_unsigned(v));
    }
}

TEST_CASE("exp-golomb round-trips and lengths match the oracle") {
    Rng rng(61);
    BitWriter bw;
    std::vector<std::uint64_t> values;
    std::size_t expected_bits = 0;
    for (std::uint64_t v = 0; v < 500; ++v) values.push_back(v);
    for (int i = 0; i < 500; ++i) values.push_back(rng.bounded(1ull << 40));
    for (std::uint64_t v : values) {
        eg_encode_unsigned(bw, v);
        expected_bits += eg_length_unsigned(v);
    }
    CHECK(bw.bit_count() == expected_bits);
    std::size_t n = bw.bit_count();
    auto bytes = bw.take();
    BitReader br(bytes.data(), n);
    for (std::uint64_t v : values) CHECK(eg_decode_unsigned(br) == v);
    CHECK(br.bits_left() == 0);
}

TEST_CASE("signed exp-golomb zigzags") {
    CHECK(zigzag(0) == 0);
    CHECK(zigzag(-1) == 1);
    CHECK(zigzag(1) == 2);
    CHECK(zigzag(-2) == 3);
    CHECK(zigzag(2) == 4);
    for (std::int64_t v : {0ll, 1ll, -1ll, 7ll, -7ll, 123456789ll, -987654321ll})
        CHECK(unzigzag(zigzag(v)) == v);

    BitWriter bw;
    std::vector<std::int64_t> values = {0, -1, 1, 5, -5, 1000, -1000, 1ll << 30, -(1ll << 30)};
    for (std::int64_t v : values) {
        std::size_t before = bw.bit_count();
        eg_encode_signed(bw, v);
        CHECK(bw.bit_count() - before == eg_length_signed(v));
    }
    std::size_t n = bw.bit_count();
    auto bytes = bw.take();
    BitReader br(bytes.data(), n);
    for (std::int64_t v : values) CHECK(eg_decode_signed(br) == v);
}

TEST_CASE("exp-golomb decode rejects absurd prefixes") {
    std::vector<std::uint8_t> zeros(16, 0);
    BitReader br(zeros.data(), 128);
    CHECK_THROWS_AS(eg_decode_unsigned(br), integrity_error);
}

TEST_CASE("huffman lengths match a hand-built tree") {
    // counts 5,2,1,1: classic lengths 1,2,3,3
    std::map<std::int64_t, std::uint64_t> counts{{10, 5}, {20, 2}, {30, 1}, {40, 1}};
    Huffman h = Huffman::from_counts(counts);
    CHECK(h.length(10) == 1);
    CHECK(h.length(20) == 2);
    CHECK(h.length(30) == 3);
    CHECK(h.length(40) == 3);
}

TEST_CASE("huffman single-symbol alphabet still emits a bit") {
    std::map<std::int64_t, std::uint64_t> counts{{7, 100}};
    Huffman h = Huffman::from_counts(counts);
    CHECK(h.length(7) == 1);
    BitWriter bw;
    h.encode(bw, 7);
    h.encode(bw, 7);
    std::size_t n = bw.bit_count();
    CHECK(n == 2);
    auto bytes = bw.take();
    BitReader br(bytes.data(), n);
    CHECK(h.decode(br) == 7);
    CHECK(h.decode(br) == 7);
}

TEST_CASE("huffman codes round-trip and satisfy Kraft with equality") {
    Rng rng(62);
    for (int trial = 0; trial < 10; ++trial) {
        std::map<std::int64_t, std::uint64_t> counts;
        int nsym = 2 + static_cast<int>(rng.bounded(40));
        for (int sym = 0; sym < nsym; ++sym)
            counts[sym - nsym / 2] = 1 + rng.bounded(10000);
        Huffman h = Huffman::from_counts(counts);

        // a full binary tree meets the Kraft inequality exactly
        unsigned max_len = 0;
        for (const auto& [sym, len] : h.code_lengths()) max_len = std::max(max_len, len);
        REQUIRE(max_len <= 60);
        std::uint64_t kraft = 0;
        for (const auto& [sym, len] : h.code_lengths()) kraft += 1ull << (max_len - len);
        CHECK(kraft == (1ull << max_len));

        // encode a random message, decode it back
        std::vector<std::int64_t> message;
        std::vector<std::int64_t> alphabet;
        for (const auto& [sym, cnt] : counts) alphabet.push_back(sym);
        for (int i = 0; i < 200; ++i)
            message.push_back(alphabet[static_cast<std::size_t>(rng.bounded(alphabet.size()))]);
        BitWriter bw;
        for (std::int64_t sym : message) h.encode(bw, sym);
        std::size_t n = bw.bit_count();
        auto bytes = bw.take();
        BitReader br(bytes.data(), n);
        for (std::int64_t sym : message) CHECK(h.decode(br) == sym);
        CHECK(br.bits_left() == 0);
    }
}

TEST_CASE("huffman construction is deterministic and rejects empty input") {
    std::map<std::int64_t, std::uint64_t> counts{{1, 3}, {2, 3}, {3, 3}, {4, 3}};  // all tied
    Huffman a = Huffman::from_counts(counts);
    Huffman b = Huffman::from_counts(counts);
    CHECK(a.code_lengths() == b.code_lengths());
    for (const auto& [sym, len] : a.code_lengths()) CHECK(len == 2);  // balanced tree

    CHECK_THROWS(Huffman::from_counts(std::map<std::int64_t, std::uint64_t>{}));
}
