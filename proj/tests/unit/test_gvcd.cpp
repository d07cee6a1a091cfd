#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <zlib.h>

#include "gvcsr/errors.hpp"
#include "gvcsr/gvcd.hpp"
#include "gvcsr/rng.hpp"

using namespace gvcsr;

namespace {

Dictionary sample_dictionary() {
    Rng rng(81);
    Dictionary d;
    d.atoms.resize(5, 7);
    for (Eigen::Index j = 0; j < 7; ++j)
        for (Eigen::Index i = 0; i < 5; ++i) d.atoms(i, j) = rng.next_gaussian();
    return d;
}

}  // namespace

TEST_CASE("dictionary serialization is bit-exact") {
    Dictionary d = sample_dictionary();
    d.atoms(2, 3) = -0.0;  // signed zero must survive
    auto bytes = serialize_dictionary(d);
    Dictionary back = parse_dictionary(bytes);
    REQUIRE(back.n() == 5);
    REQUIRE(back.m() == 7);
    for (Eigen::Index j = 0; j < 7; ++j)
        for (Eigen::Index i = 0; i < 5; ++i) {
            CHECK(back.atoms(i, j) == d.atoms(i, j));
            CHECK(std::signbit(back.atoms(i, j)) == std::signbit(d.atoms(i, j)));
        }

    // layout: magic 4 | version 2 | n 4 | m 4 | payload | crc 4
    CHECK(bytes.size() == 14 + 5 * 7 * 8 + 4);
    CHECK(bytes[0] == 'G');
    CHECK(bytes[1] == 'V');
    CHECK(bytes[2] == 'C');
    CHECK(bytes[3] == 'D');
}

TEST_CASE("dictionary hash is the payload checksum") {
    Dictionary d = sample_dictionary();
    auto bytes = serialize_dictionary(d);
    uLong crc = crc32(0L, bytes.data() + 14, static_cast<uInt>(5 * 7 * 8));
    CHECK(dictionary_hash(d) == static_cast<std::uint32_t>(crc));

    Dictionary d2 = d;
    d2.atoms(0, 0) += 1e-15;
    CHECK(dictionary_hash(d2) != dictionary_hash(d));
}

TEST_CASE("dictionary parse rejects corruption") {
    Dictionary d = sample_dictionary();
    auto bytes = serialize_dictionary(d);

    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(parse_dictionary(bad), integrity_error);

    bad = bytes;
    bad[4] = 0xff;  // version
    CHECK_THROWS_AS(parse_dictionary(bad), integrity_error);

    bad = bytes;
    bad[20] ^= 0x01;  // payload bit flip breaks the checksum
    CHECK_THROWS_AS(parse_dictionary(bad), integrity_error);

    bad = bytes;
    bad.pop_back();
    CHECK_THROWS_AS(parse_dictionary(bad), integrity_error);

    bad = bytes;
    bad.push_back(0);
    CHECK_THROWS_AS(parse_dictionary(bad), integrity_error);
}

TEST_CASE("dictionary file io maps access failures to io_error") {
    Dictionary d = sample_dictionary();
    std::string path = "/tmp/gvcsr_test_dict.gvcd";
    write_dictionary(path, d);
    Dictionary back = read_dictionary(path);
    CHECK(back.atoms == d.atoms);
    std::remove(path.c_str());

    CHECK_THROWS_AS(read_dictionary("/tmp/gvcsr_no_such_dict.gvcd"), io_error);
    CHECK_THROWS_AS(write_dictionary("/no_such_dir/d.gvcd", d), io_error);
}
