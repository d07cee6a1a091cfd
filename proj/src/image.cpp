#include "gvcsr/image.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "gvcsr/errors.hpp"

namespace gvcsr {

namespace {

// Next integer token, skipping whitespace and '#' comments.
int next_pnm_int(std::istream& in, const std::string& path) {
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
        } else if (!std::isspace(c)) {
            break;
        }
    }
    if (c == EOF) throw io_error(path + ": truncated PGM header");
    long v = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        if (v > std::numeric_limits<int>::max()) throw io_error(path + ": PGM header value overflow");
        any = true;
        c = in.get();
    }
    if (!any) throw io_error(path + ": malformed PGM header");
    if (c != EOF) in.unget();
    return static_cast<int>(v);
}

}  // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(path + ": cannot open");
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') throw io_error(path + ": not a binary (P5) PGM");
    int w = next_pnm_int(in, path);
    int h = next_pnm_int(in, path);
    int maxval = next_pnm_int(in, path);
    if (w <= 0 || h <= 0) throw io_error(path + ": bad dimensions");
    if (maxval != 255) throw io_error(path + ": only 8-bit PGM supported");
    in.get();  // single whitespace separating header from raster

    GrayImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
        throw io_error(path + ": truncated pixel data");
    return img;
}

void write_pgm(const std::string& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error(path + ": cannot open for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw io_error(path + ": write failed");
}

PatchGrid to_patches(const GrayImage& img, int patch_size) {
    if (patch_size < 1) throw std::invalid_argument("to_patches: patch_size must be >= 1");
    if (img.width <= 0 || img.height <= 0 || img.pixels.empty())
        throw std::invalid_argument("to_patches: empty image");

    PatchGrid g;
    g.patch_size = patch_size;
    g.width = img.width;
    g.height = img.height;
    g.cols = (img.width + patch_size - 1) / patch_size;
    g.rows = (img.height + patch_size - 1) / patch_size;
    int n = patch_size * patch_size;
    int count = g.rows * g.cols;
    g.dc.resize(count);
    g.residuals.resize(n, count);

    for (int pr = 0; pr < g.rows; ++pr) {
        for (int pc = 0; pc < g.cols; ++pc) {
            int p = pr * g.cols + pc;
            double sum = 0.0;
            for (int c = 0; c < patch_size; ++c) {
                for (int r = 0; r < patch_size; ++r) {
                    int sr = std::min(pr * patch_size + r, img.height - 1);  // edge replication
                    int sc = std::min(pc * patch_size + c, img.width - 1);
                    double v = img.at(sr, sc);
                    g.residuals(c * patch_size + r, p) = v;
                    sum += v;
                }
            }
            g.dc(p) = sum / n;
            g.residuals.col(p).array() -= g.dc(p);
        }
    }
    return g;
}

GrayImage from_patches(const PatchGrid& grid) {
    GrayImage img;
    img.width = grid.width;
    img.height = grid.height;
    img.pixels.assign(static_cast<std::size_t>(grid.width) * grid.height, 0);
    int ps = grid.patch_size;
    for (int pr = 0; pr < grid.rows; ++pr) {
        for (int pc = 0; pc < grid.cols; ++pc) {
            int p = pr * grid.cols + pc;
            for (int c = 0; c < ps; ++c) {
                int sc = pc * ps + c;
                if (sc >= grid.width) break;
                for (int r = 0; r < ps; ++r) {
                    int sr = pr * ps + r;
                    if (sr >= grid.height) break;
                    double v = grid.residuals(c * ps + r, p) + grid.dc(p);
                    long long q = std::llround(v);
                    img.at(sr, sc) = static_cast<std::uint8_t>(q < 0 ? 0 : (q > 255 ? 255 : q));
                }
            }
        }
    }
    return img;
}

double psnr(const GrayImage& a, const GrayImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("psnr: dimension mismatch");
    double se = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        se += d * d;
    }
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    double mse = se / static_cast<double>(a.pixels.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace gvcsr
