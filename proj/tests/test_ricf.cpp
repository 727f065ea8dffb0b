#include <doctest.h>

#include <cmath>
#include <random>

#include "admg/errors.hpp"
#include "admg/ricf.hpp"
#include "support.hpp"

using namespace admg;
using namespace testing;

namespace {

Dataset simulate(const Admg& g, std::size_t n, std::uint64_t seed, SemParams* truth = nullptr) {
    std::mt19937_64 rng(seed);
    const SemParams p = random_parameters(g, rng);
    if (truth) *truth = p;
    return sample_data(p, n, rng);
}

// Centred least-squares coefficients of column j on the columns in `parents`.
Vector ols(const Dataset& data, std::size_t j, const std::vector<std::size_t>& parents) {
    const Matrix& s = data.covariance();
    const auto k = static_cast<Eigen::Index>(parents.size());
    Matrix spp(k, k);
    Vector spj(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        spj(a) = s(parents[a], j);
        for (Eigen::Index b = 0; b < k; ++b) spp(a, b) = s(parents[a], parents[b]);
    }
    return spp.ldlt().solve(spj);
}

}  // namespace

TEST_CASE("residuals") {
    Matrix x(3, 2);
    x << 1, 2, 3, 5, -1, 4;
    SemParams p = SemParams::identity(2);
    CHECK(residuals(x, p) == x);
    p.delta(0, 1) = 0.5;
    const Matrix e = residuals(x, p);
    CHECK(e.col(0) == x.col(0));
    CHECK((e.col(1) - (x.col(1) - 0.5 * x.col(0))).norm() < 1e-15);
}

TEST_CASE("residuals recover the noise of noiseless data") {
    std::mt19937_64 rng(3);
    const SemParams p = random_parameters(fig1c(), rng);
    std::normal_distribution<double> z;
    Matrix noise(50, 4);
    for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = z(rng);
    const Matrix x = noise * (Matrix::Identity(4, 4) - p.delta).inverse();
    CHECK((residuals(x, p) - noise).norm() < 1e-10);
}

TEST_CASE("pseudo-variables") {
    Matrix eps(2, 2);
    eps << 1, 4, -2, 6;
    Matrix beta(2, 2);
    beta << 1, 0.5, 0.5, 2;
    const Matrix z = pseudo_variables(eps, beta, 0);
    CHECK(z.col(0).isZero());
    CHECK((z.col(1) - eps.col(1) / 2.0).norm() < 1e-15);

    Matrix e3(4, 3);
    e3 << 1, 2, 3, 4, 5, 6, 7, 8, 9, -1, 0, 2;
    const Matrix diag = Vector(Eigen::Vector3d(2.0, 4.0, 0.5)).asDiagonal();
    const Matrix z3 = pseudo_variables(e3, diag, 1);
    CHECK(z3.col(1).isZero());
    CHECK((z3.col(0) - e3.col(0) / 2.0).norm() < 1e-15);
    CHECK((z3.col(2) - e3.col(2) / 0.5).norm() < 1e-15);

    // Swapping the two variables swaps the pseudo-variables.
    Matrix eps_sw = eps.rowwise().reverse();
    Matrix beta_sw(2, 2);
    beta_sw << 2, 0.5, 0.5, 1;
    const Matrix z_sw = pseudo_variables(eps_sw, beta_sw, 1);
    CHECK((z_sw.rowwise().reverse() - z).norm() < 1e-15);

    Matrix singular = Matrix::Zero(3, 3);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(pseudo_variables(e3, singular, 0), NumericError);
}

TEST_CASE("empty support gives the column variances in one iteration") {
    const Dataset data = simulate(fig1b(), 400, 1);
    RicfOptions opts;
    opts.support = Admg(data.names());
    const RicfResult r = regularized_ricf(data, start_params(data), opts);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.params.delta.isZero());
    CHECK((r.params.beta - Matrix(data.covariance().diagonal().asDiagonal())).norm() < 1e-12);
}

TEST_CASE("single edge gives the least-squares slope") {
    const Admg g = Admg::from_edges({"A", "B"}, {{"A", "B"}}, {});
    const Dataset data = simulate(g, 1000, 2);
    const SemParams fit = fit_on_support(data, g);
    const double slope = data.covariance()(0, 1) / data.covariance()(0, 0);
    CHECK(fit.delta(0, 1) == doctest::Approx(slope).epsilon(1e-6));
    CHECK(fit.delta(1, 0) == 0.0);
}

TEST_CASE("DAG supports converge to per-variable least squares") {
    std::mt19937_64 rng(9);
    for (int k = 0; k < 5; ++k) {
        const Admg g = random_admg(4, 0.5, 0.0, GraphClass::Ancestral, rng);
        const Dataset data = sample_data(random_parameters(g, rng), 500, rng);
        const SemParams fit = fit_on_support(data, g);
        for (std::size_t j = 0; j < 4; ++j) {
            const auto pa = g.parents(j);
            if (pa.empty()) continue;
            const Vector coef = ols(data, j, pa);
            for (std::size_t a = 0; a < pa.size(); ++a)
                CHECK(fit.delta(pa[a], j) == doctest::Approx(coef(a)).epsilon(1e-5));
        }
        CHECK(fit.beta.isDiagonal());
    }
}

TEST_CASE("inner objective gradient matches finite differences") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> mag(0.05, 0.6);
    std::bernoulli_distribution sign(0.5);
    for (GraphClass cls : {GraphClass::Ancestral, GraphClass::Arid, GraphClass::BowFree}) {
        const Dataset data = simulate(fig1c(), 300, 20 + static_cast<int>(cls));
        RicfOptions opts;
        opts.cls = cls;
        opts.rho = 3.0;
        opts.alpha = 0.7;
        opts.lambda = 0.05;
        const SemParams anchor = start_params(data);
        const RicfObjective obj(data.covariance(), data.rows(), anchor, opts);
        for (int k = 0; k < 5; ++k) {
            Vector theta(obj.dimension());
            for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = sign(rng) ? mag(rng) : -mag(rng);
            Vector grad(theta.size());
            obj.evaluate(theta, grad);
            for (Eigen::Index i = 0; i < theta.size(); ++i) {
                Vector hi = theta, lo = theta;
                hi(i) += 1e-6;
                lo(i) -= 1e-6;
                const double fd = (obj.value(hi) - obj.value(lo)) / 2e-6;
                CHECK(grad(i) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            }
        }
    }
}

TEST_CASE("objective packing") {
    const Dataset data = simulate(fig1b(), 100, 4);
    RicfOptions opts;
    const RicfObjective full(data.covariance(), data.rows(), start_params(data), opts);
    CHECK(full.dimension() == 12 + 6);
    opts.support = fig1b();
    SemParams p = start_params(data);
    p.delta(0, 2) = 0.3;
    p.beta(2, 3) = p.beta(3, 2) = -0.2;
    const RicfObjective masked(data.covariance(), data.rows(), p, opts);
    CHECK(masked.dimension() == 3);
    const SemParams back = masked.unpack(masked.pack(p));
    CHECK(back.delta == p.delta);
    CHECK(back.beta == p.beta);
}

TEST_CASE("each inner solve decreases its own objective") {
    const Dataset data = simulate(fig1c(), 1000, 41);
    RicfOptions opts;
    opts.cls = GraphClass::BowFree;
    opts.rho = 1.0;
    opts.alpha = 1.0;
    opts.lambda = 0.05;
    opts.max_iterations = 20;
    const RicfResult r = regularized_ricf(data, start_params(data), opts);
    for (std::size_t t = 1; t < r.trace.size(); ++t) {
        const RicfObjective frozen(data.covariance(), data.rows(), r.trace[t - 1].params, opts);
        CHECK(frozen.value(frozen.pack(r.trace[t].params)) <= r.trace[t - 1].objective + 1e-12);
    }
}

TEST_CASE("fixed-support fits never lose likelihood") {
    // The re-anchored objective itself can rise slightly between iterations,
    // and the first step away from a diagonal start may overshoot; after that
    // the Gaussian likelihood improves monotonically.
    std::mt19937_64 rng(40);
    std::vector<Admg> graphs{fig1b(), fig1c()};
    for (int k = 0; k < 5; ++k) graphs.push_back(random_admg(5, 0.4, 0.3, GraphClass::Ancestral, rng));
    for (std::size_t k = 0; k < graphs.size(); ++k) {
        const Dataset data = simulate(graphs[k], 1000, 40 + k);
        RicfOptions opts;
        opts.support = graphs[k];
        opts.tol = 1e-8;
        opts.max_iterations = 50;
        opts.inner.grad_tol = 1e-10;
        opts.inner.f_rel_tol = 0.0;
        const RicfResult r = regularized_ricf(data, start_params(data), opts);
        REQUIRE(r.trace.size() == static_cast<std::size_t>(r.iterations) + 1);
        REQUIRE(r.trace.size() >= 2);
        double prev = gaussian_neg2_loglik(data, r.trace[1].params);
        for (std::size_t t = 2; t < r.trace.size(); ++t) {
            const double cur = gaussian_neg2_loglik(data, r.trace[t].params);
            CHECK(cur <= prev + 1e-9 * std::abs(prev));
            prev = cur;
        }
        for (const RicfState& s : r.trace) {
            CHECK(s.params.beta.isApprox(s.params.beta.transpose()));
            CHECK(s.params.beta.diagonal().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("penalized iterations keep beta symmetric with a positive diagonal") {
    const Dataset data = simulate(fig1c(), 1000, 41);
    RicfOptions opts;
    opts.cls = GraphClass::BowFree;
    opts.rho = 1.0;
    opts.alpha = 1.0;
    opts.lambda = 0.05;
    opts.max_iterations = 30;
    const RicfResult r = regularized_ricf(data, start_params(data), opts);
    for (const RicfState& s : r.trace) {
        CHECK(std::isfinite(s.objective));
        CHECK(s.params.beta.isApprox(s.params.beta.transpose()));
        CHECK(s.params.beta.diagonal().minCoeff() > 0.0);
    }
}

TEST_CASE("recovers the coefficients of a bow-free ancestral model") {
    SemParams truth;
    const Dataset data = simulate(fig1b(), 100000, 77, &truth);
    RicfOptions opts;
    opts.support = fig1b();
    const RicfResult r = regularized_ricf(data, start_params(data), opts);
    CHECK(r.converged);
    CHECK(std::abs(r.params.delta(0, 2) - truth.delta(0, 2)) < 0.05);
    CHECK(std::abs(r.params.delta(1, 3) - truth.delta(1, 3)) < 0.05);
    CHECK(std::abs(r.params.beta(2, 3) - truth.beta(2, 3)) < 0.05);
}

TEST_CASE("option validation") {
    const Dataset data = simulate(fig1b(), 50, 5);
    RicfOptions opts;
    opts.rho = -1.0;
    CHECK_THROWS_AS(regularized_ricf(data, start_params(data), opts), ArgumentError);
    opts = RicfOptions{};
    opts.tol = 0.0;
    CHECK_THROWS_AS(regularized_ricf(data, start_params(data), opts), ArgumentError);
    opts = RicfOptions{};
    opts.support = Admg::with_default_names(3);
    CHECK_THROWS_AS(regularized_ricf(data, start_params(data), opts), ArgumentError);
}
