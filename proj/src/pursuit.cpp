#include "gvcsr/pursuit.hpp"

#include <Eigen/QR>
#include <cmath>
#include <stdexcept>

#include "gvcsr/parallel.hpp"

namespace gvcsr {

OmpResult omp(const Eigen::VectorXd& s_col, const Dictionary& d, const PursuitStop& stop) {
    Eigen::Index n = d.n(), m = d.m();
    if (m == 0) throw std::invalid_argument("omp: empty dictionary");
    if (s_col.size() != n) throw std::invalid_argument("omp: signal length mismatch");
    if (stop.mode == PursuitStop::Mode::ErrorEnergy && stop.error_energy <= 0.0)
        throw std::invalid_argument("omp: error energy target must be > 0");

    OmpResult out;
    out.coeffs = Eigen::VectorXd::Zero(m);

    Eigen::VectorXd residual = s_col;
    std::vector<Eigen::Index> active;
    std::vector<bool> in_active(static_cast<std::size_t>(m), false);
    const double zero_tol = 1e-12 * std::max(1.0, s_col.norm());

    std::size_t limit = stop.mode == PursuitStop::Mode::SparsityLimit
                            ? std::min<std::size_t>(stop.sparsity, static_cast<std::size_t>(m))
                            : static_cast<std::size_t>(m);

    Eigen::VectorXd solution;
    while (active.size() < limit) {
        if (residual.norm() <= zero_tol) break;
        if (stop.mode == PursuitStop::Mode::ErrorEnergy &&
            residual.squaredNorm() < stop.error_energy)
            break;

        // Most-correlated unused atom; strict > keeps the lowest index on ties.
        Eigen::VectorXd corr = d.atoms.transpose() * residual;
        Eigen::Index pick = -1;
        double best = -1.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (in_active[static_cast<std::size_t>(j)]) continue;
            double v = std::fabs(corr(j));
            if (v > best) {
                best = v;
                pick = j;
            }
        }
        if (pick < 0) break;
        active.push_back(pick);
        in_active[static_cast<std::size_t>(pick)] = true;

        Eigen::MatrixXd sub(n, static_cast<Eigen::Index>(active.size()));
        for (std::size_t i = 0; i < active.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = d.atoms.col(active[i]);
        solution = sub.householderQr().solve(s_col);
        residual = s_col - sub * solution;
        out.iterations++;
    }

    for (std::size_t i = 0; i < active.size(); ++i) out.coeffs(active[i]) = solution(static_cast<Eigen::Index>(i));
    if (stop.mode == PursuitStop::Mode::ErrorEnergy)
        out.target_missed = residual.squaredNorm() >= stop.error_energy && residual.norm() > zero_tol;
    return out;
}

OmpBatchResult omp_batch(const Eigen::MatrixXd& s, const Dictionary& d, const PursuitStop& stop) {
    OmpBatchResult out;
    out.a = Eigen::MatrixXd::Zero(d.m(), s.cols());
    out.target_missed.assign(static_cast<std::size_t>(s.cols()), false);
    parallel_for(static_cast<std::size_t>(s.cols()), [&](std::size_t c) {
        auto col = static_cast<Eigen::Index>(c);
        OmpResult r = omp(s.col(col), d, stop);
        out.a.col(col) = r.coeffs;
        out.target_missed[c] = r.target_missed;
    });
    return out;
}

}  // namespace gvcsr
