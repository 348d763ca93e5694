#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "zsl/svr.hpp"

using namespace zsl;

namespace {

// Dense QP oracle: projected gradient on the stacked (alpha, alpha*) vector
// with a Dykstra projection onto box /\ {sum net = 0} /\ {sum all = lambda*nu}.
double oracle_dual_objective(const Matrix& k, const Vector& z, double lambda, double nu) {
    const Index s = z.size();
    const double c = lambda / double(s);
    Vector u1(2 * s), u2(2 * s);
    u1.head(s).setOnes();
    u1.tail(s).setConstant(-1.0);
    u2.setOnes();

    auto project_affine = [&](Vector v) {
        v -= (v.dot(u1) / u1.squaredNorm()) * u1;
        v -= ((v.dot(u2) - lambda * nu) / u2.squaredNorm()) * u2;
        return v;
    };
    auto project_box = [&](Vector v) { return v.cwiseMax(0.0).cwiseMin(c); };
    auto project = [&](Vector v) {
        Vector p = Vector::Zero(2 * s), q = Vector::Zero(2 * s);
        for (int it = 0; it < 200; ++it) {
            const Vector y = project_box(v + p);
            p = v + p - y;
            const Vector w = project_affine(y + q);
            q = y + q - w;
            v = w;
        }
        return v;
    };

    auto objective = [&](const Vector& v) {
        const Vector net = v.head(s) - v.tail(s);
        return 0.5 * net.dot(k * net) - z.dot(net);
    };

    Eigen::SelfAdjointEigenSolver<Matrix> es(k);
    const double step = 1.0 / std::max(2.0 * es.eigenvalues().maxCoeff(), 1e-8);

    Vector v = project(Vector::Zero(2 * s));
    for (int it = 0; it < 8000; ++it) {
        const Vector net = v.head(s) - v.tail(s);
        const Vector g_net = k * net - z;
        Vector g(2 * s);
        g.head(s) = g_net;
        g.tail(s) = -g_net;
        v = project(v - step * g);
    }
    return objective(v);
}

Matrix random_inputs(std::mt19937_64& rng, Index s, Index a) {
    std::uniform_real_distribution<double> uni(-1, 1);
    Matrix x(s, a);
    for (Index i = 0; i < s; ++i)
        for (Index j = 0; j < a; ++j) x(i, j) = uni(rng);
    return x;
}

} // namespace

TEST_CASE("constant targets give a constant predictor") {
    std::mt19937_64 rng(1);
    const Matrix x = random_inputs(rng, 5, 3);
    const Vector z = Vector::Constant(5, 2.5);
    KernelSpec kernel;
    kernel.bandwidth = 1.0;
    const SvrModel m = train_nu_svr(x, z, 1.0, 0.5, kernel);
    CHECK(m.converged);
    CHECK(m.support_coefficients.norm() == doctest::Approx(0.0));
    CHECK(m.bias == doctest::Approx(2.5));
    const Vector pred = m.predict(random_inputs(rng, 4, 3));
    for (Index i = 0; i < 4; ++i) CHECK(pred(i) == doctest::Approx(2.5));
}

TEST_CASE("input validation") {
    const Matrix x = Matrix::Random(3, 2);
    const Vector z = Vector::Random(3);
    KernelSpec kernel;
    CHECK_THROWS_AS(train_nu_svr(Matrix::Random(1, 2), Vector::Random(1), 1.0, 0.5, kernel),
                    NumericError);
    CHECK_THROWS_AS(train_nu_svr(x, z, 1.0, 0.0, kernel), NumericError);
    CHECK_THROWS_AS(train_nu_svr(x, z, 1.0, 1.5, kernel), NumericError);
    CHECK_THROWS_AS(train_nu_svr(x, z, -1.0, 0.5, kernel), NumericError);
    CHECK_THROWS_AS(train_nu_svr(x, Vector::Random(2), 1.0, 0.5, kernel), NumericError);
}

TEST_CASE("degenerate identical inputs are flagged") {
    Matrix x = Matrix::Zero(3, 2);
    Vector z(3);
    z << 0.0, 1.0, 2.0;
    KernelSpec kernel;
    const SvrModel m = train_nu_svr(x, z, 1.0, 0.5, kernel);
    CHECK(m.degenerate);
}

TEST_CASE("dual objective matches the projected-gradient oracle") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uni(-1, 1);
    SvrOptions options;
    options.kkt_tolerance = 1e-6;
    int checked = 0;
    for (int trial = 0; trial < 22; ++trial) {
        const Index s = 3 + (trial % 6);
        const Matrix x = random_inputs(rng, s, 2);
        Vector z(s);
        for (Index i = 0; i < s; ++i) z(i) = uni(rng);
        const double lambda = 0.5 + (trial % 4) * 0.5;
        const double nu = 0.3 + 0.2 * (trial % 3);
        KernelSpec kernel;
        kernel.bandwidth = 0.8;

        const SvrModel m = train_nu_svr(x, z, lambda, nu, kernel, options);
        REQUIRE(m.converged);
        const double oracle = oracle_dual_objective(rbf_kernel(x, x, kernel), z, lambda, nu);
        const double scale = std::max({std::abs(oracle), std::abs(m.dual_objective), 1e-3});
        CHECK(std::abs(m.dual_objective - oracle) / scale <= 1e-4);

        // Box constraints within 1e-8.
        CHECK(m.support_coefficients.cwiseAbs().maxCoeff() <= m.c_box + 1e-8);

        // Weak duality: primal >= -W with a small gap at convergence.
        const double primal = svr_primal_objective(m, z, lambda, nu);
        CHECK(primal >= -m.dual_objective - 1e-9);
        CHECK(primal + m.dual_objective <= 1e-3);
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("nu-properties hold on converged models") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> uni(-1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        const Index s = 6 + (trial % 4);
        const Matrix x = random_inputs(rng, s, 3);
        Vector z(s);
        for (Index i = 0; i < s; ++i) z(i) = x(i, 0) + 0.3 * uni(rng);
        const double nu = trial % 2 == 0 ? 0.5 : 1.0;
        KernelSpec kernel;
        kernel.bandwidth = 1.2;
        const SvrModel m = train_nu_svr(x, z, 2.0, nu, kernel);
        REQUIRE(m.converged);

        const Vector f = m.predict(x);
        Index margin_errors = 0, support_vectors = 0;
        for (Index i = 0; i < s; ++i) {
            if (std::abs(z(i) - f(i)) > m.epsilon + 1e-6) ++margin_errors;
            if (std::abs(m.support_coefficients(i)) > 1e-8) ++support_vectors;
        }
        const double slack = 1.0 / double(s);
        CHECK(double(margin_errors) / double(s) <= nu + slack + 1e-9);
        CHECK(double(support_vectors) / double(s) >= nu - slack - 1e-9);
    }
}

TEST_CASE("epsilon tube contract on support points") {
    std::mt19937_64 rng(9);
    const Matrix x = random_inputs(rng, 8, 2);
    Vector z(8);
    for (Index i = 0; i < 8; ++i) z(i) = std::sin(x(i, 0)) + 0.5 * x(i, 1);
    KernelSpec kernel;
    kernel.bandwidth = 1.0;
    SvrOptions options;
    options.kkt_tolerance = 1e-8;
    const SvrModel m = train_nu_svr(x, z, 8.0, 0.5, kernel, options);
    REQUIRE(m.converged);
    const Vector f = m.predict(x);
    for (Index i = 0; i < 8; ++i) {
        const double a = m.support_coefficients(i);
        // Free dual variables sit on the tube boundary (up to the KKT slack).
        if (std::abs(a) > 1e-8 && std::abs(a) < m.c_box - 1e-8)
            CHECK(std::abs(std::abs(z(i) - f(i)) - m.epsilon) <= 1e-6);
    }
}
