#pragma once

#include <cstdint>
#include <vector>

#include "gvcsr/admm.hpp"
#include "gvcsr/bitio.hpp"
#include "gvcsr/dict_learn.hpp"
#include "gvcsr/image.hpp"
#include "gvcsr/pursuit.hpp"

namespace gvcsr {

struct QuantizerConfig {
    double step = 8.0;  // uniform mid-tread, no dead zone
};

// level = round(c/step), half away from zero; zero levels leave the support.
std::vector<std::int64_t> quantize(const Eigen::VectorXd& coeffs, const QuantizerConfig& q);
Eigen::VectorXd dequantize(const std::vector<std::int64_t>& levels, const QuantizerConfig& q);

// (zero-run, nonzero-level) pairs; the list always ends with the end-of-block
// marker run = M (level unused). Decode validates runs against M.
struct RlePair {
    std::uint32_t run = 0;
    std::int64_t level = 0;
};
std::vector<RlePair> runlength_encode(const std::vector<std::int64_t>& levels);
std::vector<std::int64_t> runlength_decode(const std::vector<RlePair>& pairs, std::size_t m);

// Bit layer for one coefficient vector: unsigned Exp-Golomb runs (EOB is the
// run value M), signed Exp-Golomb levels. Self-delimiting.
void write_coef_block(BitWriter& bw, const std::vector<RlePair>& pairs, std::size_t m);
std::vector<std::int64_t> read_coef_block(BitReader& br, std::size_t m);

// DC path: per-patch means rounded to integers, DPCM-coded in raster order.
// The predictor is the rounded mean of the available causal neighbors among
// {left, top, top-left, top-right}; the first patch predicts from 128.
std::vector<std::int64_t> dc_dpcm_encode(const Eigen::VectorXd& dc, int rows, int cols);
std::vector<std::int64_t> dc_dpcm_decode(const std::vector<std::int64_t>& residuals, int rows, int cols);

struct BitstreamHeader {
    std::uint32_t width = 0, height = 0;
    std::uint16_t patch_size = 8;
    std::uint32_t dict_hash = 0;
    double quant_step = 0.0;
    std::uint32_t m = 0;  // coefficient count per patch
};

// Serialized layout: "GVCB" | version u16 | width u32 | height u32 |
// patch_size u16 | dict_hash u32 | quant_step f64 | m u32 |
// dc_bits u32 | coef_bits u32 | dc bytes | coef bytes (all LE; each bit
// stream is byte-aligned only at its end).
struct Bitstream {
    BitstreamHeader header;
    std::vector<std::uint8_t> dc_bytes;
    std::uint32_t dc_bits = 0;
    std::vector<std::uint8_t> coef_bytes;
    std::uint32_t coef_bits = 0;

    std::vector<std::uint8_t> serialize() const;
    static Bitstream parse(const std::vector<std::uint8_t>& bytes);
    std::size_t total_bits() const;
};

struct CoderChoice {
    enum class Kind { Gvcsr, OmpL, OmpE };
    Kind kind = Kind::Gvcsr;
    SparseCodingParams gvcsr;
    std::size_t omp_l = 4;
    double omp_e = 1.0;

    static CoderChoice gvcsr_coder(const SparseCodingParams& p) {
        CoderChoice c;
        c.kind = Kind::Gvcsr;
        c.gvcsr = p;
        return c;
    }
    static CoderChoice omp_l_coder(std::size_t l) {
        CoderChoice c;
        c.kind = Kind::OmpL;
        c.omp_l = l;
        return c;
    }
    static CoderChoice omp_e_coder(double eps) {
        CoderChoice c;
        c.kind = Kind::OmpE;
        c.omp_e = eps;
        return c;
    }
};

struct EncodeResult {
    Bitstream bitstream;
    GrayImage reconstruction;  // exactly what decode_image will produce
    double mean_l0 = 0.0;      // mean per-patch nonzero quantized levels
};

// Full pipeline: patches -> sparse coding of the mean-removed residuals over
// the dictionary -> scalar quantization -> run-length + Exp-Golomb bits, with
// the DC path DPCM-coded alongside. All patches of the image are coded in one
// joint solve (the coefficient stack spans the whole image).
EncodeResult encode_image(const GrayImage& img, const Dictionary& d, const CoderChoice& coder,
                          const QuantizerConfig& q);

// Rejects a dictionary whose hash differs from the stream header.
GrayImage decode_image(const Bitstream& bs, const Dictionary& d);

double bpp(const Bitstream& bs, const GrayImage& img);

// Variance-vs-coding-bits experiment: seeded zero-mean Laplacian samples over
// a 10-point variance grid, unit-step quantization, one-shot canonical
// Huffman measurement, against the Gaussian entropy bound.
struct Fig1Row {
    double variance = 0.0;
    double bits_per_sample = 0.0;
    double gaussian_bound = 0.0;
};
std::vector<Fig1Row> fig1_experiment(std::uint64_t seed, std::size_t samples_per_point = 65536);

}  // namespace gvcsr
