#include "gvcsr/dict_learn.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gvcsr/rng.hpp"

namespace gvcsr {

namespace {

Eigen::VectorXd random_unit_vector(Rng& rng, Eigen::Index n) {
    Eigen::VectorXd v(n);
    while (true) {
        for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.next_gaussian();
        double norm = v.norm();
        if (norm > 0.0) return v / norm;
    }
}

}  // namespace

Dictionary init_dictionary(const Eigen::MatrixXd& s, Eigen::Index m, std::uint64_t seed) {
    if (m <= 0) throw std::invalid_argument("init_dictionary: m must be >= 1");
    if (s.size() == 0 || s.norm() == 0.0) throw std::invalid_argument("init_dictionary: training set is all zero");

    Rng rng(seed);
    Eigen::Index k = s.cols();
    auto picks = rng.sample_without_replacement(static_cast<std::size_t>(k),
                                                static_cast<std::size_t>(std::min(m, k)));
    Dictionary d;
    d.atoms.resize(s.rows(), m);
    Eigen::Index j = 0;
    for (std::size_t pick : picks) {
        Eigen::VectorXd col = s.col(static_cast<Eigen::Index>(pick));
        double norm = col.norm();
        d.atoms.col(j++) = norm > 0.0 ? Eigen::VectorXd(col / norm) : random_unit_vector(rng, s.rows());
    }
    for (; j < m; ++j) d.atoms.col(j) = random_unit_vector(rng, s.rows());
    return d;
}

Dictionary update_dictionary(const Eigen::MatrixXd& s, Eigen::MatrixXd& a, const Dictionary& d) {
    if (s.cols() != a.cols() || d.atoms.cols() != a.rows() || d.atoms.rows() != s.rows())
        throw std::invalid_argument("update_dictionary: shape mismatch");

    Dictionary out = d;
    Eigen::MatrixXd& atoms = out.atoms;
    Eigen::Index m = atoms.cols(), k = s.cols();

    // Running residual; atom j's restricted subproblem adds its own rank-1
    // contribution back before the refit and removes the refit afterwards.
    Eigen::MatrixXd e = s - atoms * a;
    std::vector<bool> sample_used(static_cast<std::size_t>(k), false);

    for (Eigen::Index j = 0; j < m; ++j) {
        std::vector<Eigen::Index> support;
        for (Eigen::Index c = 0; c < k; ++c)
            if (a(j, c) != 0.0) support.push_back(c);

        if (support.empty()) {
            // Dead atom: adopt the sample the current dictionary reconstructs
            // worst, preferring samples not already consumed this pass.
            Eigen::Index best = -1;
            double best_err = -1.0;
            for (int pass = 0; pass < 2 && best < 0; ++pass) {
                for (Eigen::Index c = 0; c < k; ++c) {
                    if (pass == 0 && sample_used[static_cast<std::size_t>(c)]) continue;
                    if (s.col(c).norm() == 0.0) continue;
                    double err = e.col(c).norm();
                    if (err > best_err) {
                        best_err = err;
                        best = c;
                    }
                }
            }
            if (best >= 0) {
                sample_used[static_cast<std::size_t>(best)] = true;
                atoms.col(j) = s.col(best) / s.col(best).norm();
            }
            continue;  // row j stays zero; e is unchanged
        }

        auto p = static_cast<Eigen::Index>(support.size());
        Eigen::MatrixXd ej(s.rows(), p);
        Eigen::VectorXd row(p);
        for (Eigen::Index i = 0; i < p; ++i) {
            ej.col(i) = e.col(support[i]) + atoms.col(j) * a(j, support[i]);
            row(i) = a(j, support[i]);
        }

        Eigen::BDCSVD<Eigen::MatrixXd> svd(ej, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Eigen::VectorXd u = svd.matrixU().col(0);
        Eigen::VectorXd v = svd.matrixV().col(0);
        double sigma = svd.singularValues()(0);

        // Sign convention: the atom's largest-magnitude entry (lowest index on
        // ties) is made positive.
        Eigen::Index imax = 0;
        for (Eigen::Index i = 1; i < u.size(); ++i)
            if (std::fabs(u(i)) > std::fabs(u(imax))) imax = i;
        if (u(imax) < 0.0) {
            u = -u;
            v = -v;
        }

        atoms.col(j) = u;
        for (Eigen::Index i = 0; i < p; ++i) {
            a(j, support[i]) = sigma * v(i);
            e.col(support[i]) = ej.col(i) - u * (sigma * v(i));
        }
    }
    return out;
}

double penalty_reschedule(const Eigen::MatrixXd& a, double alpha, double kappa, double mu_max) {
    double min_nz = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < a.cols(); ++c)
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            double v = std::fabs(a(r, c));
            if (v != 0.0 && v < min_nz) min_nz = v;
        }
    if (!std::isfinite(min_nz)) return mu_max;
    return std::min(kappa * alpha / min_nz, mu_max);
}

double penalty_bound(const Dictionary& d) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(d.atoms);
    double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    return std::sqrt(2.0) * smax * smax;
}

LearnResult learn(const Eigen::MatrixXd& s, Eigen::Index m, const LearnParams& params) {
    LearnResult res;
    res.dictionary = init_dictionary(s, m, params.seed);
    double mu_start = params.sparse.mu0;

    for (std::size_t round = 0;; ++round) {
        DictionaryFactors f = DictionaryFactors::from(res.dictionary.atoms);
        SparseCodeResult sc = sparse_code_from(s, f, params.sparse, mu_start);
        res.a = std::move(sc.a);

        LearnRoundInfo info;
        info.terms = objective_terms(s, res.dictionary.atoms, res.a, params.sparse.alpha, params.sparse.beta);
        info.solver_iterations = sc.report.iterations;
        info.converged = sc.report.converged;
        info.mu_final = sc.report.final_mu;
        info.mu_bound = penalty_bound(res.dictionary);
        info.mu_exceeds_bound = info.mu_final > info.mu_bound;
        res.rounds.push_back(info);

        if (round == params.outer_iters) break;
        res.dictionary = update_dictionary(s, res.a, res.dictionary);
        mu_start = penalty_reschedule(res.a, params.sparse.alpha, params.kappa, params.sparse.mu_max);
    }
    return res;
}

}  // namespace gvcsr
