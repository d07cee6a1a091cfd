#include "gvcsr/gvcd.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>

#include "gvcsr/errors.hpp"

namespace gvcsr {

namespace {

constexpr std::uint16_t kVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint32_t payload_crc(const Eigen::MatrixXd& atoms) {
    std::vector<std::uint8_t> payload;
    payload.reserve(static_cast<std::size_t>(atoms.size()) * 8);
    for (Eigen::Index c = 0; c < atoms.cols(); ++c)
        for (Eigen::Index r = 0; r < atoms.rows(); ++r) put_f64(payload, atoms(r, c));
    return static_cast<std::uint32_t>(
        crc32(0, payload.data(), static_cast<uInt>(payload.size())));
}

struct Cursor {
    const std::uint8_t* p;
    std::size_t left;
    void need(std::size_t n) const {
        if (left < n) throw integrity_error("GVCD: truncated");
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        p += 2;
        left -= 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
        p += 4;
        left -= 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
        p += 8;
        left -= 8;
        return std::bit_cast<double>(bits);
    }
};

}  // namespace

std::vector<std::uint8_t> serialize_dictionary(const Dictionary& d) {
    std::vector<std::uint8_t> out{'G', 'V', 'C', 'D'};
    put_u16(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(d.n()));
    put_u32(out, static_cast<std::uint32_t>(d.m()));
    for (Eigen::Index c = 0; c < d.atoms.cols(); ++c)
        for (Eigen::Index r = 0; r < d.atoms.rows(); ++r) put_f64(out, d.atoms(r, c));
    put_u32(out, payload_crc(d.atoms));
    return out;
}

Dictionary parse_dictionary(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "GVCD", 4) != 0)
        throw integrity_error("GVCD: bad magic");
    Cursor cur{bytes.data() + 4, bytes.size() - 4};
    std::uint16_t version = cur.u16();
    if (version != kVersion) throw integrity_error("GVCD: unsupported version");
    std::uint32_t n = cur.u32(), m = cur.u32();
    if (n == 0 || m == 0) throw integrity_error("GVCD: empty dictionary");
    if (cur.left != static_cast<std::size_t>(n) * m * 8 + 4)
        throw integrity_error("GVCD: size mismatch");

    Dictionary d;
    d.atoms.resize(n, m);
    for (std::uint32_t c = 0; c < m; ++c)
        for (std::uint32_t r = 0; r < n; ++r) d.atoms(r, c) = cur.f64();
    std::uint32_t stored = cur.u32();
    if (stored != payload_crc(d.atoms)) throw integrity_error("GVCD: checksum mismatch");
    return d;
}

void write_dictionary(const std::string& path, const Dictionary& d) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(path + ": cannot open for writing");
    auto bytes = serialize_dictionary(d);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error(path + ": write failed");
}

Dictionary read_dictionary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(path + ": cannot open");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_dictionary(bytes);
}

std::uint32_t dictionary_hash(const Dictionary& d) { return payload_crc(d.atoms); }

}  // namespace gvcsr
