#include "gvcsr/admm.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "gvcsr/rate_model.hpp"

namespace gvcsr {

DictionaryFactors DictionaryFactors::from(const Eigen::MatrixXd& d) {
    DictionaryFactors f;
    f.d = d;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeThinU | Eigen::ComputeFullV);
    f.u = svd.matrixU();
    f.vd = svd.matrixV();
    f.sigma = svd.singularValues();
    f.sigma_sq = Eigen::VectorXd::Zero(d.cols());
    f.sigma_sq.head(f.sigma.size()) = f.sigma.array().square();
    return f;
}

Eigen::MatrixXd DictionaryFactors::pinv_apply(const Eigen::MatrixXd& s) const {
    double smax = sigma.size() ? sigma(0) : 0.0;
    double tol = 1e-12 * smax;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma(i) > tol) inv(i) = 1.0 / sigma(i);
    return vd.leftCols(sigma.size()) * (inv.asDiagonal() * (u.transpose() * s));
}

Eigen::MatrixXd hard_threshold(const Eigen::MatrixXd& x, double eps) {
    if (eps < 0.0) throw std::invalid_argument("hard_threshold: eps must be >= 0");
    return (x.array().abs() > eps).select(x, 0.0);
}

Eigen::MatrixXd update_a(const AdmmState& st, const SparseCodingParams& p) {
    Eigen::MatrixXd v = 0.5 * (st.j + st.g - (st.r0 + st.r1) / st.mu);
    return hard_threshold(v, std::sqrt(p.alpha / st.mu));
}

Eigen::MatrixXd update_j(const AdmmState& st, const DictionaryFactors& f, const Eigen::MatrixXd& s) {
    Eigen::MatrixXd rhs = f.d.transpose() * s + st.mu * st.a + st.r0;
    Eigen::VectorXd inv = (f.sigma_sq.array() + st.mu).inverse();
    return f.vd * (inv.asDiagonal() * (f.vd.transpose() * rhs));
}

Eigen::MatrixXd update_g(const AdmmState& st, const SparseCodingParams& p) {
    // (mu*A + R1) V_Z (beta*Sigma_Z + mu I)^-1 V_Z^T collapses onto the two
    // eigenchannels of the centering operator: 1/(beta*K + mu) off the
    // all-ones direction, 1/mu along it.
    double k = static_cast<double>(st.a.cols());
    Eigen::MatrixXd w = st.mu * st.a + st.r1;
    double c1 = 1.0 / (p.beta * k + st.mu);
    double c2 = 1.0 / st.mu - c1;
    Eigen::VectorXd row_mean = w.rowwise().sum() / k;
    return c1 * w + (c2 * row_mean) * Eigen::RowVectorXd::Ones(w.cols());
}

void update_multipliers(AdmmState& st) {
    st.r0 += st.mu * (st.a - st.j);
    st.r1 += st.mu * (st.a - st.g);
}

double update_penalty(double mu, const SparseCodingParams& p) {
    return std::min(p.rho * mu, p.mu_max);
}

std::size_t l0_norm(const Eigen::MatrixXd& a) {
    return static_cast<std::size_t>((a.array() != 0.0).count());
}

ObjectiveSample objective_terms(const Eigen::MatrixXd& s, const Eigen::MatrixXd& d,
                                const Eigen::MatrixXd& a, double alpha, double beta) {
    ObjectiveSample o;
    o.fidelity = 0.5 * (s - d * a).squaredNorm();
    o.l0 = static_cast<double>(l0_norm(a));
    o.variance = coefficient_variance(a);
    o.objective = o.fidelity + alpha * o.l0 + 0.5 * beta * o.variance;
    return o;
}

double objective_value(const Eigen::MatrixXd& s, const Eigen::MatrixXd& d,
                       const Eigen::MatrixXd& a, double alpha, double beta) {
    return objective_terms(s, d, a, alpha, beta).objective;
}

SparseCodeResult sparse_code_from(const Eigen::MatrixXd& s, const DictionaryFactors& f,
                                  const SparseCodingParams& p, double mu_start) {
    if (f.d.rows() != s.rows()) throw std::invalid_argument("sparse_code: dictionary/signal shape mismatch");

    AdmmState st;
    st.a = f.pinv_apply(s);
    st.j = st.a;
    st.g = st.a;
    st.r0 = Eigen::MatrixXd::Zero(st.a.rows(), st.a.cols());
    st.r1 = st.r0;
    st.mu = mu_start;

    Eigen::MatrixXd dts = f.d.transpose() * s;  // fixed across iterations
    SparseCodeResult out;
    SolveReport& rep = out.report;
    if (p.record_trajectory) rep.trajectory.push_back(objective_terms(s, f.d, st.a, p.alpha, p.beta));

    for (std::size_t it = 1; it <= p.max_iters; ++it) {
        Eigen::MatrixXd a_prev = st.a;
        st.a = update_a(st, p);
        {
            // inline update_j against the cached D^T S
            Eigen::MatrixXd rhs = dts + st.mu * st.a + st.r0;
            Eigen::VectorXd inv = (f.sigma_sq.array() + st.mu).inverse();
            st.j = f.vd * (inv.asDiagonal() * (f.vd.transpose() * rhs));
        }
        st.g = update_g(st, p);
        update_multipliers(st);
        st.mu = update_penalty(st.mu, p);
        st.iter = it;

        double na = st.a.norm();
        double scale = na > 0.0 ? na : 1.0;  // absolute residuals when A = 0
        rep.final_residuals = {(st.a - st.j).norm() / scale,
                               (st.a - st.g).norm() / scale,
                               (st.a - a_prev).norm() / scale};
        if (p.record_trajectory) rep.trajectory.push_back(objective_terms(s, f.d, st.a, p.alpha, p.beta));

        rep.iterations = it;
        if (rep.final_residuals[0] <= p.eps && rep.final_residuals[1] <= p.eps &&
            rep.final_residuals[2] <= p.eps) {
            rep.converged = true;
            break;
        }
    }
    rep.final_mu = st.mu;
    out.a = std::move(st.a);
    return out;
}

SparseCodeResult sparse_code(const Eigen::MatrixXd& s, const Eigen::MatrixXd& d,
                             const SparseCodingParams& p) {
    DictionaryFactors f = DictionaryFactors::from(d);
    return sparse_code_from(s, f, p, p.mu0);
}

}  // namespace gvcsr
