#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

namespace gvcsr {

// K x K centering operator Z: diagonal K-1, off-diagonal -1. Its quadratic
// form tr(A Z A^T) is K times the summed squared deviation of each row of A
// from its row mean, and serves as the coding-rate proxy throughout.
Eigen::MatrixXd centering_matrix(std::size_t k);

// Analytic SVD of the centering operator. Z has exactly two singular values,
// 0 (multiplicity 1, all-ones direction) and K (multiplicity K-1). The basis
// is stored implicitly -- column 0 is 1/sqrt(K), column c >= 1 has rows
// 0..c-1 equal to scale_c, row c equal to -c * scale_c, zeros below, with
// scale_c = 1/sqrt(c(c+1)) -- so construction costs O(K) time and memory and
// never runs a dense eigensolve. Dense materialization is provided for
// small-K verification only.
class ZSvd {
public:
    explicit ZSvd(std::size_t k);

    std::size_t k() const { return k_; }

    // Order is fixed: 0 first, then K repeated K-1 times.
    const std::vector<double>& singular_values() const { return sv_; }

    // Entry (row, col) of the orthonormal basis V_Z. O(1).
    double basis_entry(std::size_t row, std::size_t col) const;

    // Full K x K basis; O(K^2), intended for tests and small K.
    Eigen::MatrixXd basis_dense() const;

private:
    std::size_t k_;
    std::vector<double> sv_;
    std::vector<double> scale_;  // scale_[c] for columns c >= 1; scale_[0] = 1/sqrt(K)
};

ZSvd fast_z_svd(std::size_t k);

// tr(A Z A^T) via the identity K*||A||_F^2 - ||A*1||^2; never materializes Z.
double coefficient_variance(const Eigen::MatrixXd& a);

// Differential-entropy bound of a Gaussian with the given variance, in bits:
// log2(sqrt(2*pi*e*v)). Returns -infinity for v = 0 so that rate terms of
// all-zero rows fold harmlessly into sums.
double gaussian_entropy_bound(double variance);

// Laplacian differential entropy at equal variance, in bits; always below the
// Gaussian bound by the constant log2(sqrt(pi/e)).
double laplacian_entropy(double variance);

struct RateEstimate {
    double variance = 0.0;
    double gaussian_bound_bits = 0.0;
    double laplacian_bits = 0.0;
};

RateEstimate rate_estimate(const Eigen::MatrixXd& a);

}  // namespace gvcsr
