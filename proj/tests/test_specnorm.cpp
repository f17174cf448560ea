#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "kref/rng.hpp"
#include "kref/specnorm.hpp"

using namespace kref;

namespace {

SparseSym random_symmetric(Rng& rng, int dim, double density) {
    SparseSym m;
    m.dim = dim;
    for (int r = 0; r < dim; ++r)
        for (int c = r; c < dim; ++c)
            if (rng.real() < density) m.add(r, c, 2.0 * rng.real() - 1.0);
    return m;
}

double dense_specnorm(const SparseSym& m) {
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m.dim, m.dim);
    for (const auto& e : m.entries) {
        dense(e.row, e.col) += e.value;
        if (e.row != e.col) dense(e.col, e.row) += e.value;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
    return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(m.dim - 1)));
}

}  // namespace

TEST_CASE("certified_specnorm: zero matrix") {
    SparseSym m;
    m.dim = 5;
    const auto res = certified_specnorm(m, 1e-6);
    CHECK(res.sigma == 0.0);
    CHECK(res.method == "zero");
}

TEST_CASE("certified_specnorm: 2x2 swap matrix") {
    SparseSym m;
    m.dim = 2;
    m.add(0, 1, 1.0);
    const double tau = 1e-6;
    const auto res = certified_specnorm(m, tau);
    CHECK(res.sigma >= 1.0);
    CHECK(res.sigma <= 1.0 + 3 * tau);
}

TEST_CASE("certified_specnorm: vs dense eigensolver oracle, 50 random 30x30") {
    Rng rng(5);
    const double tau = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = random_symmetric(rng, 30, 0.3);
        const double lambda = dense_specnorm(m);
        const auto res = certified_specnorm(m, tau);
        CHECK(res.sigma >= lambda * (1.0 - 1e-12));
        if (lambda > 0) CHECK(res.sigma <= (1.0 + 2 * tau) * lambda);
    }
}

TEST_CASE("certified_specnorm: fallback above the dense cap stays sound") {
    Rng rng(9);
    const auto m = random_symmetric(rng, 40, 0.2);
    SpecnormOptions opts;
    opts.dense_cap = 10;
    const auto res = certified_specnorm(m, 1e-3, opts);
    CHECK(res.method == "fallback");
    CHECK(res.sigma >= dense_specnorm(m) * (1.0 - 1e-12));
}

TEST_CASE("certified_specnorm: input validation") {
    SparseSym m;
    m.dim = 2;
    m.add(0, 1, 1.0);
    CHECK_THROWS(certified_specnorm(m, 0.0));
    SparseSym bad;
    bad.dim = 1;
    bad.entries.push_back({0, 3, 1.0});
    CHECK_THROWS(certified_specnorm(bad, 1e-3));
}

TEST_CASE("power iteration estimate is a lower bound") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = random_symmetric(rng, 25, 0.4);
        const double est = power_iteration_estimate(m, 80, trial);
        CHECK(est <= dense_specnorm(m) * (1.0 + 1e-9));
    }
}
