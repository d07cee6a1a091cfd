#include "gvcsr/rate_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gvcsr {

Eigen::MatrixXd centering_matrix(std::size_t k) {
    if (k == 0) throw std::invalid_argument("centering_matrix: k must be >= 1");
    auto n = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd z = Eigen::MatrixXd::Constant(n, n, -1.0);
    z.diagonal().setConstant(static_cast<double>(k) - 1.0);
    return z;
}

ZSvd::ZSvd(std::size_t k) : k_(k) {
    if (k < 2) throw std::invalid_argument("fast_z_svd: k must be >= 2");
    sv_.assign(k, static_cast<double>(k));
    sv_[0] = 0.0;
    scale_.resize(k);
    scale_[0] = 1.0 / std::sqrt(static_cast<double>(k));
    for (std::size_t c = 1; c < k; ++c)
        scale_[c] = 1.0 / std::sqrt(static_cast<double>(c) * static_cast<double>(c + 1));
}

double ZSvd::basis_entry(std::size_t row, std::size_t col) const {
    if (col == 0) return scale_[0];
    if (row < col) return scale_[col];
    if (row == col) return -static_cast<double>(col) * scale_[col];
    return 0.0;
}

Eigen::MatrixXd ZSvd::basis_dense() const {
    auto n = static_cast<Eigen::Index>(k_);
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index r = 0; r < n; ++r) v(r, 0) = scale_[0];
    for (Eigen::Index c = 1; c < n; ++c) {
        for (Eigen::Index r = 0; r < c; ++r) v(r, c) = scale_[c];
        v(c, c) = -static_cast<double>(c) * scale_[c];
    }
    return v;
}

ZSvd fast_z_svd(std::size_t k) { return ZSvd(k); }

double coefficient_variance(const Eigen::MatrixXd& a) {
    if (a.cols() < 1) throw std::invalid_argument("coefficient_variance: K must be >= 1");
    double k = static_cast<double>(a.cols());
    double frob2 = a.squaredNorm();
    double rowsum2 = a.rowwise().sum().squaredNorm();
    double v = k * frob2 - rowsum2;
    return v < 0.0 ? 0.0 : v;  // clip tiny negative round-off
}

double gaussian_entropy_bound(double variance) {
    if (variance < 0.0) throw std::invalid_argument("gaussian_entropy_bound: variance < 0");
    if (variance == 0.0) return -std::numeric_limits<double>::infinity();
    constexpr double two_pi_e = 17.079468445347132958648453131821;
    return 0.5 * std::log2(two_pi_e * variance);
}

double laplacian_entropy(double variance) {
    if (variance <= 0.0) throw std::invalid_argument("laplacian_entropy: variance <= 0");
    constexpr double log2_sqrt_pi_over_e = 0.10440054429167770766;  // log2(sqrt(pi/e))
    return gaussian_entropy_bound(variance) - log2_sqrt_pi_over_e;
}

RateEstimate rate_estimate(const Eigen::MatrixXd& a) {
    RateEstimate r;
    r.variance = coefficient_variance(a);
    r.gaussian_bound_bits = gaussian_entropy_bound(r.variance);
    r.laplacian_bits = r.variance > 0.0 ? laplacian_entropy(r.variance)
                                        : -std::numeric_limits<double>::infinity();
    return r;
}

}  // namespace gvcsr
