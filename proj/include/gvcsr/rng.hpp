#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace gvcsr {

// Deterministic random source. std::mt19937_64 has a bit-exact,
// standard-specified output sequence; every mapping from raw 64-bit words to
// a distribution is hand-rolled below so that streams of values (not just raw
// words) are identical across compilers and standard libraries. Never use
// std::uniform_*_distribution or std::normal_distribution here: their
// algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1): top 53 bits scaled, the usual 2^-53 trick.
    double next_double() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Uniform integer in [0, n), Lemire's multiply-shift with rejection.
    std::uint64_t bounded(std::uint64_t n) {
        if (n == 0) return 0;
        while (true) {
            std::uint64_t x = gen_();
            __uint128_t m = static_cast<__uint128_t>(x) * n;
            auto lo = static_cast<std::uint64_t>(m);
            if (lo >= n || lo >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
        }
    }

    // Standard normal via Box-Muller; the spare value is cached so draws come
    // in a fixed order regardless of call pattern.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double(), u2 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Zero-mean Laplacian with scale b (variance 2b^2), by inverse CDF.
    double next_laplacian(double b) {
        double u = next_double() - 0.5;
        double a = std::fabs(2.0 * u);
        if (a >= 1.0) a = 0x1.fffffffffffffp-1;  // guard log(0) at u = +/-0.5
        double mag = -b * std::log1p(-a);
        return u < 0.0 ? -mag : mag;
    }

    // First m entries of a seeded uniform permutation of {0..n-1}
    // (partial Fisher-Yates).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t m) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        if (m > n) m = n;
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t j = i + static_cast<std::size_t>(bounded(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(m);
        return idx;
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// FNV-1a, used to derive retraining seeds from decoded pixel data.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace gvcsr
