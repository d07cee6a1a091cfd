#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <vector>

namespace gvcsr {

struct SparseCodingParams {
    double alpha = 1.0;    // l0 weight
    double beta = 0.0;     // variance-rate weight
    double mu0 = 1e-2;     // initial penalty
    double mu_max = 1e8;
    double rho = 1.2;      // penalty growth
    double eps = 1e-5;     // convergence tolerance on the three relative residuals
    std::size_t max_iters = 2000;
    bool record_trajectory = false;  // per-iteration objective terms (costs a full N*M*K product each)
};

// Full solver state; never shared across concurrent solves.
struct AdmmState {
    Eigen::MatrixXd a, j, g;    // primal and the two auxiliaries
    Eigen::MatrixXd r0, r1;     // multipliers for the a=j and a=g constraints
    double mu = 0.0;
    std::size_t iter = 0;
};

// SVD factors of the dictionary, computed once per solve. sigma_sq is
// zero-padded to M when N < M so the regularized inverse below is a plain
// elementwise divide.
struct DictionaryFactors {
    Eigen::MatrixXd d;
    Eigen::MatrixXd u;               // thin left factor (N x r)
    Eigen::MatrixXd vd;              // full right factor (M x M)
    Eigen::VectorXd sigma;           // singular values (r = min(N, M))
    Eigen::VectorXd sigma_sq;        // squared, zero-padded to M

    static DictionaryFactors from(const Eigen::MatrixXd& d);

    // Moore-Penrose pseudoinverse applied to s; singular values below
    // 1e-12 * sigma_max are treated as zero.
    Eigen::MatrixXd pinv_apply(const Eigen::MatrixXd& s) const;
};

struct ObjectiveSample {
    double fidelity = 0.0;   // 0.5 * ||S - D*A||_F^2
    double l0 = 0.0;         // ||A||_0
    double variance = 0.0;   // tr(A Z A^T)
    double objective = 0.0;  // fidelity + alpha*l0 + (beta/2)*variance
};

struct SolveReport {
    std::size_t iterations = 0;
    bool converged = false;
    std::array<double, 3> final_residuals{0.0, 0.0, 0.0};  // |A-J|, |A-G|, |A-Aprev|, each over |A|
    double final_mu = 0.0;
    std::vector<ObjectiveSample> trajectory;  // filled only when record_trajectory
};

struct SparseCodeResult {
    Eigen::MatrixXd a;
    SolveReport report;
};

// Elementwise: keep x when |x| > eps, else 0; the tie |x| = eps maps to 0.
Eigen::MatrixXd hard_threshold(const Eigen::MatrixXd& x, double eps);

// One step of each ADMM block, exposed for testing and reuse.
Eigen::MatrixXd update_a(const AdmmState& st, const SparseCodingParams& p);
Eigen::MatrixXd update_j(const AdmmState& st, const DictionaryFactors& f, const Eigen::MatrixXd& s);
Eigen::MatrixXd update_g(const AdmmState& st, const SparseCodingParams& p);
void update_multipliers(AdmmState& st);
double update_penalty(double mu, const SparseCodingParams& p);

std::size_t l0_norm(const Eigen::MatrixXd& a);
ObjectiveSample objective_terms(const Eigen::MatrixXd& s, const Eigen::MatrixXd& d,
                                const Eigen::MatrixXd& a, double alpha, double beta);
double objective_value(const Eigen::MatrixXd& s, const Eigen::MatrixXd& d,
                       const Eigen::MatrixXd& a, double alpha, double beta);

// Variance-constrained sparse coding: initializes A = J = G = pinv(D)*S and
// R = 0, then iterates the block updates until the three relative residuals
// drop below eps or max_iters is hit (reported, not fatal). When ||A||_F = 0
// the residual test falls back to absolute norms.
SparseCodeResult sparse_code(const Eigen::MatrixXd& s, const Eigen::MatrixXd& d,
                             const SparseCodingParams& p);

// As above but starting from an explicit penalty (used by the dictionary
// learner's reschedule between outer rounds).
SparseCodeResult sparse_code_from(const Eigen::MatrixXd& s, const DictionaryFactors& f,
                                  const SparseCodingParams& p, double mu_start);

}  // namespace gvcsr
