#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gvcsr/admm.hpp"
#include "gvcsr/rate_model.hpp"
#include "gvcsr/rng.hpp"

using namespace gvcsr;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.next_gaussian();
    return m;
}

AdmmState random_state(Rng& rng, Eigen::Index m, Eigen::Index k, double mu) {
    AdmmState st;
    st.a = random_matrix(rng, m, k);
    st.j = random_matrix(rng, m, k);
    st.g = random_matrix(rng, m, k);
    st.r0 = random_matrix(rng, m, k);
    st.r1 = random_matrix(rng, m, k);
    st.mu = mu;
    return st;
}

}  // namespace

TEST_CASE("hard_threshold zeroes at and below the threshold") {
    Eigen::MatrixXd x(1, 4);
    x << 0.5, -0.5, 0.500001, -2.0;
    Eigen::MatrixXd t = hard_threshold(x, 0.5);
    CHECK(t(0, 0) == 0.0);  // tie goes to zero
    CHECK(t(0, 1) == 0.0);
    CHECK(t(0, 2) == 0.500001);
    CHECK(t(0, 3) == -2.0);
    CHECK_THROWS_AS(hard_threshold(x, -1.0), std::invalid_argument);
}

TEST_CASE("update_g matches the dense resolvent") {
    Rng rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.bounded(8));
        Eigen::Index k = 2 + static_cast<Eigen::Index>(rng.bounded(15));
        double mu = std::exp(rng.uniform(-3.0, 3.0));
        double beta = (trial % 4 == 0) ? 0.0 : std::exp(rng.uniform(-3.0, 2.0));
        AdmmState st = random_state(rng, m, k, mu);
        SparseCodingParams p;
        p.beta = beta;

        Eigen::MatrixXd w = mu * st.a + st.r1;
        Eigen::MatrixXd z = centering_matrix(static_cast<std::size_t>(k));
        Eigen::MatrixXd dense =
            w * (beta * z + mu * Eigen::MatrixXd::Identity(k, k)).inverse();
        CHECK((update_g(st, p) - dense).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("update_j matches the dense regularized least squares") {
    Rng rng(22);
    for (int trial = 0; trial < 60; ++trial) {
        Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.bounded(8));
        Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.bounded(8));
        Eigen::Index k = 2 + static_cast<Eigen::Index>(rng.bounded(15));
        double mu = std::exp(rng.uniform(-3.0, 3.0));
        Eigen::MatrixXd d = random_matrix(rng, n, m);
        Eigen::MatrixXd s = random_matrix(rng, n, k);
        AdmmState st = random_state(rng, m, k, mu);
        DictionaryFactors f = DictionaryFactors::from(d);

        Eigen::MatrixXd dense =
            (d.transpose() * d + mu * Eigen::MatrixXd::Identity(m, m))
                .inverse() *
            (d.transpose() * s + mu * st.a + st.r0);
        CHECK((update_j(st, f, s) - dense).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("penalty update grows by rho and saturates") {
    SparseCodingParams p;
    p.rho = 1.2;
    p.mu_max = 10.0;
    CHECK(update_penalty(1.0, p) == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(update_penalty(9.99, p) == 10.0);
    CHECK(update_penalty(10.0, p) == 10.0);
    p.rho = 1.0;
    CHECK(update_penalty(3.0, p) == 3.0);
}

TEST_CASE("objective decomposes into its three terms") {
    Rng rng(23);
    Eigen::MatrixXd d = random_matrix(rng, 4, 6);
    Eigen::MatrixXd s = random_matrix(rng, 4, 5);
    Eigen::MatrixXd a = hard_threshold(random_matrix(rng, 6, 5), 0.8);

    ObjectiveSample o = objective_terms(s, d, a, 0.7, 1.3);
    CHECK(o.fidelity == doctest::Approx(0.5 * (s - d * a).squaredNorm()).epsilon(1e-14));
    CHECK(o.l0 == static_cast<double>(l0_norm(a)));
    CHECK(o.variance == coefficient_variance(a));
    CHECK(o.objective == doctest::Approx(o.fidelity + 0.7 * o.l0 + 0.65 * o.variance).epsilon(1e-14));

    CHECK(objective_value(s, d, Eigen::MatrixXd::Zero(6, 5), 2.0, 3.0) ==
          doctest::Approx(0.5 * s.squaredNorm()).epsilon(1e-14));
    CHECK(objective_value(s, d, a, 0.0, 0.0) ==
          doctest::Approx(0.5 * (s - d * a).squaredNorm()).epsilon(1e-14));
}

TEST_CASE("pinv_apply matches a rank-revealing pseudoinverse") {
    Rng rng(24);
    // full rank, overcomplete, and rank-deficient cases
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.bounded(5));
        Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.bounded(8));
        Eigen::MatrixXd d = random_matrix(rng, n, m);
        if (trial % 3 == 2 && m >= 2) d.col(m - 1) = d.col(0);  // force rank deficiency
        Eigen::MatrixXd s = random_matrix(rng, n, 4);

        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(d);
        Eigen::MatrixXd want = cod.pseudoInverse() * s;
        Eigen::MatrixXd got = DictionaryFactors::from(d).pinv_apply(s);
        CHECK((want - got).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("zero signal codes to zero immediately") {
    Rng rng(25);
    Eigen::MatrixXd d = random_matrix(rng, 4, 8);
    SparseCodingParams p;
    SparseCodeResult res = sparse_code(Eigen::MatrixXd::Zero(4, 3), d, p);
    CHECK(res.a.cwiseAbs().maxCoeff() == 0.0);
    CHECK(res.report.converged);
    CHECK(res.report.iterations == 1);
}

TEST_CASE("identity dictionary recovers the hard-threshold rule") {
    // keep s_i iff s_i^2 > 2*alpha; run the solver to high accuracy
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd s(2, 1);
    s << 1.2, 0.3;
    SparseCodingParams p;
    p.alpha = 0.5;
    p.beta = 0.0;
    p.eps = 1e-10;
    // the dual updates contract at ~1/(2 mu) per sweep, so a tight penalty
    // cap keeps the tail of the solve fast without moving the fixed point
    p.mu_max = 100.0;
    p.max_iters = 20000;
    SparseCodeResult res = sparse_code(s, d, p);
    REQUIRE(res.report.converged);
    CHECK(std::fabs(res.a(0, 0) - 1.2) <= 1e-6);
    CHECK(res.a(1, 0) == 0.0);
}

TEST_CASE("variance term trades fidelity for lower coefficient spread") {
    Rng rng(26);
    Eigen::MatrixXd d = random_matrix(rng, 6, 12);
    d.colwise().normalize();
    Eigen::MatrixXd s = random_matrix(rng, 6, 10);

    SparseCodingParams p0;
    p0.alpha = 0.05;
    p0.beta = 0.0;
    SparseCodingParams p1 = p0;
    p1.beta = 2.0;

    SparseCodeResult r0 = sparse_code(s, d, p0);
    SparseCodeResult r1 = sparse_code(s, d, p1);
    REQUIRE(r0.report.converged);
    REQUIRE(r1.report.converged);

    double v0 = coefficient_variance(r0.a), v1 = coefficient_variance(r1.a);
    double f0 = 0.5 * (s - d * r0.a).squaredNorm(), f1 = 0.5 * (s - d * r1.a).squaredNorm();
    CHECK(v1 <= v0 + 1e-9);
    CHECK(f1 >= f0 - 1e-9);
}

TEST_CASE("trajectory records init plus one sample per iteration") {
    Rng rng(27);
    Eigen::MatrixXd d = random_matrix(rng, 5, 10);
    d.colwise().normalize();
    Eigen::MatrixXd s = random_matrix(rng, 5, 6);
    SparseCodingParams p;
    p.alpha = 0.2;
    p.record_trajectory = true;
    SparseCodeResult res = sparse_code(s, d, p);
    REQUIRE(res.report.converged);
    REQUIRE(res.report.trajectory.size() == res.report.iterations + 1);
    // first sample is the dense pseudoinverse seed, last is the returned code
    DictionaryFactors f = DictionaryFactors::from(d);
    ObjectiveSample init = objective_terms(s, d, f.pinv_apply(s), p.alpha, p.beta);
    CHECK(res.report.trajectory.front().objective == doctest::Approx(init.objective).epsilon(1e-12));
    CHECK(res.report.trajectory.back().l0 == static_cast<double>(l0_norm(res.a)));
    CHECK(res.report.trajectory.back().objective <= res.report.trajectory.front().objective);
}

TEST_CASE("shape mismatches are rejected") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(3, 3);
    Eigen::MatrixXd s = Eigen::MatrixXd::Ones(4, 2);
    CHECK_THROWS_AS(sparse_code(s, d, SparseCodingParams{}), std::invalid_argument);
}
