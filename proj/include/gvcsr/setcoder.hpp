#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gvcsr/codec.hpp"

namespace gvcsr {

// Pairwise image distance: mean squared error between 64x64 box-downsampled
// versions. Symmetric; 0 for identical images.
double similarity(const GrayImage& a, const GrayImage& b);

// Prim's algorithm rooted at the image with the smallest total distance to
// all others (ties to lowest index); edge-weight ties also break to the
// lowest candidate index. parent[root] = -1.
struct MstResult {
    int root = 0;
    std::vector<int> parent;
};
MstResult build_mst(const Eigen::MatrixXd& distances);

// Hook for aligning a reference to its dependents before dictionary
// training. Identity for now; kept as an explicit stage so a geometric
// alignment can slot in without touching the pipeline.
GrayImage reference_transform(const GrayImage& img);

// Parameters that must be identical on both sides; they ride in the archive
// header so the decoder can retrain bit-identical dictionaries.
struct SetParams {
    QuantizerConfig quant{8.0};
    CoderChoice coder;                  // coefficient coder for every image
    int patch_size = 8;
    double retrain_gamma = 14.0;        // atoms per patch dimension for child dictionaries
    std::size_t retrain_outer_iters = 2;
    double kappa = 4.0;
    SparseCodingParams retrain_sparse;  // inner solver for retraining
};

struct SetImageStats {
    double bpp = 0.0;
    double psnr = 0.0;  // vs the original, encoder side only
};

struct SetEncodeResult {
    std::vector<std::uint8_t> archive;
    MstResult mst;
    std::vector<std::uint32_t> dict_hashes;    // per image
    std::vector<SetImageStats> stats;
    std::vector<GrayImage> reconstructions;    // encoder-side references
};

struct SetDecodeResult {
    std::vector<GrayImage> images;
    std::vector<std::string> names;
    std::vector<int> parent;
    int root = 0;
    std::vector<std::uint32_t> dict_hashes;    // recomputed during decode
};

// Archive: "GVCS" | version | pipeline parameters | manifest (id, parent,
// offset, length, dictionary hash, name) | concatenated per-image GVCB
// streams. The root is coded with the supplied global dictionary; every
// other image is coded with a dictionary learned from its DECODED parent
// (seeded by a digest of the decoded pixels), so the decoder reproduces each
// dictionary exactly and no dictionary bits are transmitted.
SetEncodeResult encode_set(const std::vector<GrayImage>& images,
                           const std::vector<std::string>& names,
                           const Dictionary& global_dict, const SetParams& params);

SetDecodeResult decode_set(const std::vector<std::uint8_t>& archive, const Dictionary& global_dict);

// Seed rule shared by both sides: FNV-1a over dimensions and decoded pixels.
std::uint64_t retrain_seed(const GrayImage& decoded_parent);

}  // namespace gvcsr
