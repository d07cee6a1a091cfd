#include "gvcsr/codec.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <map>

#include "gvcsr/entropy.hpp"
#include "gvcsr/gvcd.hpp"
#include "gvcsr/huffman.hpp"
#include "gvcsr/rate_model.hpp"
#include "gvcsr/rng.hpp"

namespace gvcsr {

std::vector<std::int64_t> quantize(const Eigen::VectorXd& coeffs, const QuantizerConfig& q) {
    if (q.step <= 0.0) throw std::invalid_argument("quantize: step must be > 0");
    std::vector<std::int64_t> levels(static_cast<std::size_t>(coeffs.size()));
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
        levels[static_cast<std::size_t>(i)] = std::llround(coeffs(i) / q.step);
    return levels;
}

Eigen::VectorXd dequantize(const std::vector<std::int64_t>& levels, const QuantizerConfig& q) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(levels.size()));
    for (std::size_t i = 0; i < levels.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = static_cast<double>(levels[i]) * q.step;
    return out;
}

std::vector<RlePair> runlength_encode(const std::vector<std::int64_t>& levels) {
    std::vector<RlePair> pairs;
    auto m = static_cast<std::uint32_t>(levels.size());
    std::uint32_t run = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] == 0) {
            ++run;
        } else {
            pairs.push_back({run, levels[i]});
            run = 0;
        }
    }
    pairs.push_back({m, 0});  // end of block
    return pairs;
}

std::vector<std::int64_t> runlength_decode(const std::vector<RlePair>& pairs, std::size_t m) {
    std::vector<std::int64_t> levels(m, 0);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const RlePair& p = pairs[i];
        if (p.run == m) {
            if (i + 1 != pairs.size()) throw integrity_error("run-length: data after end-of-block");
            return levels;
        }
        if (pos + p.run + 1 > m) throw integrity_error("run-length: run overflows block");
        if (p.level == 0) throw integrity_error("run-length: zero level");
        pos += p.run;
        levels[pos++] = p.level;
    }
    throw integrity_error("run-length: missing end-of-block");
}

void write_coef_block(BitWriter& bw, const std::vector<RlePair>& pairs, std::size_t m) {
    for (const RlePair& p : pairs) {
        eg_encode_unsigned(bw, p.run);
        if (p.run != m) eg_encode_signed(bw, p.level);
    }
}

std::vector<std::int64_t> read_coef_block(BitReader& br, std::size_t m) {
    std::vector<RlePair> pairs;
    while (true) {
        RlePair p;
        std::uint64_t run = eg_decode_unsigned(br);
        if (run > m) throw integrity_error("coefficient block: run exceeds block size");
        p.run = static_cast<std::uint32_t>(run);
        if (run != m) p.level = eg_decode_signed(br);
        pairs.push_back(p);
        if (run == m) break;
    }
    return runlength_decode(pairs, m);
}

namespace {

std::int64_t dc_predictor(const std::vector<std::int64_t>& dcs, int rows, int cols, int pr, int pc) {
    if (pr == 0 && pc == 0) return 128;
    std::int64_t sum = 0;
    int n = 0;
    auto add = [&](int r, int c) {
        if (r >= 0 && r < rows && c >= 0 && c < cols && (r < pr || (r == pr && c < pc))) {
            sum += dcs[static_cast<std::size_t>(r) * cols + c];
            ++n;
        }
    };
    add(pr, pc - 1);      // left
    add(pr - 1, pc);      // top
    add(pr - 1, pc - 1);  // top-left
    add(pr - 1, pc + 1);  // top-right
    return std::llround(static_cast<double>(sum) / n);
}

}  // namespace

std::vector<std::int64_t> dc_dpcm_encode(const Eigen::VectorXd& dc, int rows, int cols) {
    std::vector<std::int64_t> rounded(static_cast<std::size_t>(rows) * cols);
    for (std::size_t i = 0; i < rounded.size(); ++i)
        rounded[i] = std::llround(dc(static_cast<Eigen::Index>(i)));
    std::vector<std::int64_t> residuals(rounded.size());
    for (int pr = 0; pr < rows; ++pr)
        for (int pc = 0; pc < cols; ++pc) {
            std::size_t p = static_cast<std::size_t>(pr) * cols + pc;
            residuals[p] = rounded[p] - dc_predictor(rounded, rows, cols, pr, pc);
        }
    return residuals;
}

std::vector<std::int64_t> dc_dpcm_decode(const std::vector<std::int64_t>& residuals, int rows, int cols) {
    std::vector<std::int64_t> dcs(static_cast<std::size_t>(rows) * cols);
    for (int pr = 0; pr < rows; ++pr)
        for (int pc = 0; pc < cols; ++pc) {
            std::size_t p = static_cast<std::size_t>(pr) * cols + pc;
            dcs[p] = residuals[p] + dc_predictor(dcs, rows, cols, pr, pc);
        }
    return dcs;
}

namespace {

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

struct Cursor {
    const std::uint8_t* p;
    std::size_t left;
    void need(std::size_t n) const {
        if (left < n) throw integrity_error("GVCB: truncated");
    }
    std::uint16_t u16() {
        need(2);
        auto v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
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
    std::vector<std::uint8_t> bytes(std::size_t n) {
        need(n);
        std::vector<std::uint8_t> out(p, p + n);
        p += n;
        left -= n;
        return out;
    }
};

constexpr std::uint16_t kGvcbVersion = 1;

}  // namespace

std::vector<std::uint8_t> Bitstream::serialize() const {
    std::vector<std::uint8_t> out{'G', 'V', 'C', 'B'};
    put_u16(out, kGvcbVersion);
    put_u32(out, header.width);
    put_u32(out, header.height);
    put_u16(out, header.patch_size);
    put_u32(out, header.dict_hash);
    put_f64(out, header.quant_step);
    put_u32(out, header.m);
    put_u32(out, dc_bits);
    put_u32(out, coef_bits);
    out.insert(out.end(), dc_bytes.begin(), dc_bytes.end());
    out.insert(out.end(), coef_bytes.begin(), coef_bytes.end());
    return out;
}

Bitstream Bitstream::parse(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "GVCB", 4) != 0)
        throw integrity_error("GVCB: bad magic");
    Cursor cur{bytes.data() + 4, bytes.size() - 4};
    if (cur.u16() != kGvcbVersion) throw integrity_error("GVCB: unsupported version");
    Bitstream bs;
    bs.header.width = cur.u32();
    bs.header.height = cur.u32();
    bs.header.patch_size = cur.u16();
    bs.header.dict_hash = cur.u32();
    bs.header.quant_step = cur.f64();
    bs.header.m = cur.u32();
    bs.dc_bits = cur.u32();
    bs.coef_bits = cur.u32();
    if (bs.header.width == 0 || bs.header.height == 0 || bs.header.patch_size == 0 ||
        bs.header.m == 0 || !(bs.header.quant_step > 0.0))
        throw integrity_error("GVCB: bad header");
    bs.dc_bytes = cur.bytes((bs.dc_bits + 7) / 8);
    bs.coef_bytes = cur.bytes((bs.coef_bits + 7) / 8);
    if (cur.left != 0) throw integrity_error("GVCB: trailing bytes");
    return bs;
}

std::size_t Bitstream::total_bits() const {
    return 8 * (4 + 2 + 4 + 4 + 2 + 4 + 8 + 4 + 4 + 4 + dc_bytes.size() + coef_bytes.size());
}

EncodeResult encode_image(const GrayImage& img, const Dictionary& d, const CoderChoice& coder,
                          const QuantizerConfig& q) {
    int ps = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d.n()))));
    if (static_cast<Eigen::Index>(ps) * ps != d.n())
        throw std::invalid_argument("encode_image: dictionary atom size is not a square patch");
    PatchGrid grid = to_patches(img, ps);

    Eigen::MatrixXd a;
    switch (coder.kind) {
        case CoderChoice::Kind::Gvcsr:
            a = sparse_code(grid.residuals, d.atoms, coder.gvcsr).a;
            break;
        case CoderChoice::Kind::OmpL:
            a = omp_batch(grid.residuals, d, PursuitStop::sparsity_limit(coder.omp_l)).a;
            break;
        case CoderChoice::Kind::OmpE:
            a = omp_batch(grid.residuals, d, PursuitStop::energy(coder.omp_e)).a;
            break;
    }

    auto m = static_cast<std::size_t>(d.m());
    int patches = grid.rows * grid.cols;

    BitWriter coef_bw;
    Eigen::MatrixXd deq(d.m(), patches);
    std::size_t nonzero_levels = 0;
    for (int p = 0; p < patches; ++p) {
        std::vector<std::int64_t> levels = quantize(a.col(p), q);
        for (std::int64_t lv : levels)
            if (lv != 0) ++nonzero_levels;
        write_coef_block(coef_bw, runlength_encode(levels), m);
        deq.col(p) = dequantize(levels, q);
    }

    BitWriter dc_bw;
    std::vector<std::int64_t> dc_res = dc_dpcm_encode(grid.dc, grid.rows, grid.cols);
    for (std::int64_t r : dc_res) eg_encode_signed(dc_bw, r);

    EncodeResult out;
    out.bitstream.header.width = static_cast<std::uint32_t>(img.width);
    out.bitstream.header.height = static_cast<std::uint32_t>(img.height);
    out.bitstream.header.patch_size = static_cast<std::uint16_t>(grid.patch_size);
    out.bitstream.header.dict_hash = dictionary_hash(d);
    out.bitstream.header.quant_step = q.step;
    out.bitstream.header.m = static_cast<std::uint32_t>(m);
    out.bitstream.dc_bits = static_cast<std::uint32_t>(dc_bw.bit_count());
    out.bitstream.dc_bytes = dc_bw.take();
    out.bitstream.coef_bits = static_cast<std::uint32_t>(coef_bw.bit_count());
    out.bitstream.coef_bytes = coef_bw.take();

    // Reference reconstruction uses exactly what the decoder will see: the
    // dequantized coefficients and the DPCM-rounded DCs.
    std::vector<std::int64_t> dec_dc = dc_dpcm_decode(dc_res, grid.rows, grid.cols);
    PatchGrid rgrid;
    rgrid.patch_size = grid.patch_size;
    rgrid.rows = grid.rows;
    rgrid.cols = grid.cols;
    rgrid.width = grid.width;
    rgrid.height = grid.height;
    rgrid.dc.resize(patches);
    for (int p = 0; p < patches; ++p) rgrid.dc(p) = static_cast<double>(dec_dc[static_cast<std::size_t>(p)]);
    rgrid.residuals = d.atoms * deq;
    out.reconstruction = from_patches(rgrid);
    out.mean_l0 = static_cast<double>(nonzero_levels) / patches;
    return out;
}

GrayImage decode_image(const Bitstream& bs, const Dictionary& d) {
    if (bs.header.dict_hash != dictionary_hash(d))
        throw integrity_error("GVCB: dictionary hash mismatch");
    int ps = bs.header.patch_size;
    if (static_cast<Eigen::Index>(ps) * ps != d.n() || static_cast<Eigen::Index>(bs.header.m) != d.m())
        throw integrity_error("GVCB: dictionary shape mismatch");

    int cols = (static_cast<int>(bs.header.width) + ps - 1) / ps;
    int rows = (static_cast<int>(bs.header.height) + ps - 1) / ps;
    int patches = rows * cols;

    BitReader dc_br(bs.dc_bytes.data(), bs.dc_bits);
    std::vector<std::int64_t> dc_res(static_cast<std::size_t>(patches));
    for (auto& r : dc_res) r = eg_decode_signed(dc_br);
    std::vector<std::int64_t> dcs = dc_dpcm_decode(dc_res, rows, cols);

    QuantizerConfig q{bs.header.quant_step};
    BitReader coef_br(bs.coef_bytes.data(), bs.coef_bits);
    Eigen::MatrixXd deq(d.m(), patches);
    for (int p = 0; p < patches; ++p)
        deq.col(p) = dequantize(read_coef_block(coef_br, static_cast<std::size_t>(bs.header.m)), q);

    PatchGrid grid;
    grid.patch_size = ps;
    grid.rows = rows;
    grid.cols = cols;
    grid.width = static_cast<int>(bs.header.width);
    grid.height = static_cast<int>(bs.header.height);
    grid.dc.resize(patches);
    for (int p = 0; p < patches; ++p) grid.dc(p) = static_cast<double>(dcs[static_cast<std::size_t>(p)]);
    grid.residuals = d.atoms * deq;
    return from_patches(grid);
}

double bpp(const Bitstream& bs, const GrayImage& img) {
    return static_cast<double>(bs.total_bits()) /
           (static_cast<double>(img.width) * static_cast<double>(img.height));
}

std::vector<Fig1Row> fig1_experiment(std::uint64_t seed, std::size_t samples_per_point) {
    std::vector<Fig1Row> rows;
    Rng rng(seed);
    QuantizerConfig q{1.0};
    for (int point = 0; point < 10; ++point) {
        double variance = std::pow(2.0, point);  // 1 .. 512
        double b = std::sqrt(variance / 2.0);
        std::map<std::int64_t, std::uint64_t> counts;
        for (std::size_t i = 0; i < samples_per_point; ++i)
            counts[std::llround(rng.next_laplacian(b) / q.step)]++;
        Huffman code = Huffman::from_counts(counts);
        std::size_t bits = 0;
        for (const auto& [sym, cnt] : counts) bits += cnt * code.length(sym);
        rows.push_back({variance, static_cast<double>(bits) / static_cast<double>(samples_per_point),
                        gaussian_entropy_bound(variance)});
    }
    return rows;
}

}  // namespace gvcsr
