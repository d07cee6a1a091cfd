#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace gvcsr {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * width + c]; }
    std::uint8_t& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * width + c]; }
};

// 8-bit binary PGM (P5), the canonical interchange format.
GrayImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayImage& img);

// Non-overlapping patch decomposition. Patches are taken in raster order;
// right/bottom partial patches are edge-replicated to full size while the
// true image dimensions stay in `width`/`height`. Each patch is flattened
// column-major into a residual vector after removing its mean (the DC).
struct PatchGrid {
    int patch_size = 8;
    int rows = 0, cols = 0;          // grid dimensions in patches
    int width = 0, height = 0;       // true image dimensions
    Eigen::VectorXd dc;              // per-patch mean, raster order
    Eigen::MatrixXd residuals;       // patch_size^2 x (rows*cols)
};

PatchGrid to_patches(const GrayImage& img, int patch_size);

// Inverse: per-patch residual + DC, rounded half-away-from-zero, clamped to
// [0, 255], cropped to true dimensions.
GrayImage from_patches(const PatchGrid& grid);

// 10*log10(255^2 / MSE); +infinity for identical images.
double psnr(const GrayImage& a, const GrayImage& b);

}  // namespace gvcsr
