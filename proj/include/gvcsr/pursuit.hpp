#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "gvcsr/dict_learn.hpp"

namespace gvcsr {

// Stop rule for orthogonal matching pursuit: either a hard cap on the number
// of selected atoms or a target residual energy ||s - Da||_2^2.
struct PursuitStop {
    enum class Mode { SparsityLimit, ErrorEnergy };
    Mode mode = Mode::SparsityLimit;
    std::size_t sparsity = 1;
    double error_energy = 0.0;

    static PursuitStop sparsity_limit(std::size_t l) {
        PursuitStop s;
        s.mode = Mode::SparsityLimit;
        s.sparsity = l;
        return s;
    }
    static PursuitStop energy(double eps) {
        PursuitStop s;
        s.mode = Mode::ErrorEnergy;
        s.error_energy = eps;
        return s;
    }
};

struct OmpResult {
    Eigen::VectorXd coeffs;          // length M, exact zeros off the active set
    bool target_missed = false;      // ErrorEnergy not reached even with M atoms
    std::size_t iterations = 0;
};

struct OmpBatchResult {
    Eigen::MatrixXd a;               // M x K
    std::vector<bool> target_missed; // per column
};

// Greedy pursuit: select the atom most correlated with the residual (ties to
// the lowest index, no re-selection), re-solve least squares on the active
// set, repeat until the stop rule fires or the residual is numerically zero.
OmpResult omp(const Eigen::VectorXd& s_col, const Dictionary& d, const PursuitStop& stop);

// Column-independent batch application; parallelized over columns.
OmpBatchResult omp_batch(const Eigen::MatrixXd& s, const Dictionary& d, const PursuitStop& stop);

}  // namespace gvcsr
