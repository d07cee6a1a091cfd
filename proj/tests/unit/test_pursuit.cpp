#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gvcsr/pursuit.hpp"
#include "gvcsr/rng.hpp"

using namespace gvcsr;

namespace {

Dictionary random_unit_dictionary(Rng& rng, Eigen::Index n, Eigen::Index m) {
    Dictionary d;
    d.atoms.resize(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) d.atoms(i, j) = rng.next_gaussian();
        d.atoms.col(j).normalize();
    }
    return d;
}

}  // namespace

TEST_CASE("omp stops once the residual is exhausted") {
    Dictionary d;
    d.atoms = Eigen::MatrixXd::Zero(3, 3);
    d.atoms(0, 0) = 1.0;
    d.atoms(1, 1) = 1.0;
    d.atoms(2, 2) = 1.0;
    Eigen::Vector3d s(2.0, 0.0, 0.0);
    OmpResult r = omp(s, d, PursuitStop::sparsity_limit(3));
    CHECK(r.iterations == 1);  // exact after one atom; no pointless extra picks
    CHECK(r.coeffs(0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(r.coeffs(1) == 0.0);
    CHECK(r.coeffs(2) == 0.0);
}

TEST_CASE("correlation ties resolve to the lowest atom index") {
    Dictionary d;
    d.atoms.resize(2, 2);
    d.atoms.col(0) = Eigen::Vector2d(1.0, 0.0);
    d.atoms.col(1) = Eigen::Vector2d(1.0, 0.0);  // exact duplicate
    Eigen::Vector2d s(1.0, 0.5);
    OmpResult r = omp(s, d, PursuitStop::sparsity_limit(1));
    CHECK(r.coeffs(0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.coeffs(1) == 0.0);
}

TEST_CASE("omp recovers an exact sparse combination") {
    // orthonormal dictionary: recovery is exact and unambiguous
    Rng rng(41);
    Eigen::MatrixXd raw(8, 8);
    for (Eigen::Index j = 0; j < 8; ++j)
        for (Eigen::Index i = 0; i < 8; ++i) raw(i, j) = rng.next_gaussian();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    Dictionary d;
    d.atoms = qr.householderQ() * Eigen::MatrixXd::Identity(8, 8);

    Eigen::VectorXd s = 2.0 * d.atoms.col(3) - 1.5 * d.atoms.col(6);
    OmpResult r = omp(s, d, PursuitStop::sparsity_limit(2));
    CHECK(r.coeffs(3) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(r.coeffs(6) == doctest::Approx(-1.5).epsilon(1e-10));
    double off = 0.0;
    for (Eigen::Index i = 0; i < 8; ++i)
        if (i != 3 && i != 6) off += std::fabs(r.coeffs(i));
    CHECK(off == 0.0);
}

TEST_CASE("error-energy stop honors its target and reports misses") {
    Rng rng(42);
    Dictionary d = random_unit_dictionary(rng, 6, 12);
    Eigen::VectorXd s(6);
    for (Eigen::Index i = 0; i < 6; ++i) s(i) = rng.next_gaussian();

    OmpResult r = omp(s, d, PursuitStop::energy(0.25));
    double res_sq = (s - d.atoms * r.coeffs).squaredNorm();
    CHECK((res_sq < 0.25 || r.target_missed));
    CHECK_FALSE(r.target_missed);  // 12 atoms in R^6 span the space

    // a dictionary that cannot reach the target must say so
    Dictionary one;
    one.atoms = Eigen::MatrixXd::Zero(2, 1);
    one.atoms(0, 0) = 1.0;
    Eigen::Vector2d hard(0.0, 3.0);
    OmpResult miss = omp(hard, one, PursuitStop::energy(1e-6));
    CHECK(miss.target_missed);

    CHECK_THROWS_AS(omp(s, d, PursuitStop::energy(0.0)), std::invalid_argument);
}

TEST_CASE("batch omp matches the per-column solver") {
    Rng rng(43);
    Dictionary d = random_unit_dictionary(rng, 5, 10);
    Eigen::MatrixXd s(5, 7);
    for (Eigen::Index c = 0; c < 7; ++c)
        for (Eigen::Index i = 0; i < 5; ++i) s(i, c) = rng.next_gaussian();

    PursuitStop stop = PursuitStop::sparsity_limit(3);
    OmpBatchResult batch = omp_batch(s, d, stop);
    for (Eigen::Index c = 0; c < 7; ++c) {
        OmpResult one = omp(s.col(c), d, stop);
        CHECK((batch.a.col(c) - one.coeffs).cwiseAbs().maxCoeff() == 0.0);
        CHECK(batch.target_missed[static_cast<std::size_t>(c)] == one.target_missed);
    }
}

TEST_CASE("pursuit rejects malformed inputs") {
    Rng rng(44);
    Dictionary d = random_unit_dictionary(rng, 4, 6);
    Eigen::VectorXd wrong(5);
    wrong.setOnes();
    CHECK_THROWS_AS(omp(wrong, d, PursuitStop::sparsity_limit(1)), std::invalid_argument);
    Dictionary empty;
    empty.atoms.resize(4, 0);
    Eigen::VectorXd s(4);
    s.setOnes();
    CHECK_THROWS_AS(omp(s, empty, PursuitStop::sparsity_limit(1)), std::invalid_argument);
}
