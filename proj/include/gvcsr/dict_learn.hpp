#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "gvcsr/admm.hpp"

namespace gvcsr {

// N x M atom matrix with every column of norm <= 1 (exactly 1 after an atom
// update pass). Completeness gamma = M/N.
struct Dictionary {
    Eigen::MatrixXd atoms;

    Eigen::Index n() const { return atoms.rows(); }
    Eigen::Index m() const { return atoms.cols(); }
    double completeness() const { return static_cast<double>(m()) / static_cast<double>(n()); }
};

struct LearnParams {
    SparseCodingParams sparse;
    std::size_t outer_iters = 20;  // dictionary update rounds
    double kappa = 4.0;            // penalty reschedule guide
    std::uint64_t seed = 0;
};

struct LearnRoundInfo {
    ObjectiveSample terms;          // at the converged code of this round
    std::size_t solver_iterations = 0;
    bool converged = false;
    double mu_final = 0.0;          // penalty at solver stop
    double mu_bound = 0.0;          // sqrt(2) * lambda_max(D^T D) for this round's dictionary
    bool mu_exceeds_bound = false;
};

struct LearnResult {
    Dictionary dictionary;
    Eigen::MatrixXd a;
    std::vector<LearnRoundInfo> rounds;
};

// Seeds the dictionary with m distinct training columns chosen uniformly at
// random, each normalized; zero columns (and any shortfall when K < m) are
// replaced by seeded random unit vectors.
Dictionary init_dictionary(const Eigen::MatrixXd& s, Eigen::Index m, std::uint64_t seed);

// One K-SVD-style pass in ascending atom order: for each atom with nonempty
// support, rank-1-fit the residual restricted to that support, replacing the
// atom and its coefficient row (sign fixed so the atom's largest-magnitude
// entry is positive). Atoms with empty support take the unit-normalized
// worst-reconstructed sample column (distinct per pass, ties to lowest
// index). `a` is refreshed in place; the new dictionary is returned.
Dictionary update_dictionary(const Eigen::MatrixXd& s, Eigen::MatrixXd& a, const Dictionary& d);

// kappa*alpha / min|nonzero of a|, clamped to mu_max; mu_max when a == 0.
double penalty_reschedule(const Eigen::MatrixXd& a, double alpha, double kappa, double mu_max);

// sqrt(2) * lambda_max(D^T D); convergence of the inner solver is guaranteed
// for penalties beyond this, and the learner reports each round's standing.
double penalty_bound(const Dictionary& d);

// Alternates variance-constrained sparse coding with atom updates: coding
// runs to convergence, the dictionary is updated, the solver state is re-
// seeded from pinv(D)*S with multipliers cleared, and the penalty restarts
// from the reschedule value. outer_iters = 0 returns the initial dictionary
// with its converged code. Deterministic for fixed (s, m, params).
LearnResult learn(const Eigen::MatrixXd& s, Eigen::Index m, const LearnParams& params);

}  // namespace gvcsr
