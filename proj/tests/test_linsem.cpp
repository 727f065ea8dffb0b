#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "admg/errors.hpp"
#include "admg/linsem.hpp"
#include "admg/sem_io.hpp"
#include "support.hpp"

using namespace admg;
using namespace testing;

TEST_CASE("implied covariance of a single edge with correlated errors") {
    const double a = 1.3, b = -0.8, c = 0.45, e = 0.9;
    SemParams p = SemParams::identity(2);
    p.delta(0, 1) = b;
    p.beta << a, c, c, e;
    const Matrix s = implied_covariance(p);
    CHECK(s(0, 0) == doctest::Approx(a).epsilon(1e-14));
    CHECK(s(0, 1) == doctest::Approx(a * b + c).epsilon(1e-14));
    CHECK(s(1, 0) == doctest::Approx(a * b + c).epsilon(1e-14));
    CHECK(s(1, 1) == doctest::Approx(b * b * a + 2 * b * c + e).epsilon(1e-14));
}

TEST_CASE("implied covariance solves the structural equations") {
    std::mt19937_64 rng(6);
    for (int k = 0; k < 20; ++k) {
        const Admg g = random_admg(5, 0.4, 0.3, GraphClass::BowFree, rng);
        const SemParams p = random_parameters(g, rng);
        const Matrix s = implied_covariance(p);
        const Matrix lhs = (Matrix::Identity(5, 5) - p.delta).transpose() * s * (Matrix::Identity(5, 5) - p.delta);
        CHECK((lhs - p.beta).norm() < 1e-10);
        CHECK(s.llt().info() == Eigen::Success);
    }
}

TEST_CASE("random parameters respect the support and ranges") {
    std::mt19937_64 rng(12);
    const Admg g = fig1c();
    for (int k = 0; k < 50; ++k) {
        const SemParams p = random_parameters(g, rng);
        CHECK(p.support() == g);
        for (int i = 0; i < 4; ++i) {
            double off = 0.0;
            for (int j = 0; j < 4; ++j) {
                if (g.directed(i, j)) {
                    CHECK(std::abs(p.delta(i, j)) >= 0.5);
                    CHECK(std::abs(p.delta(i, j)) <= 2.0);
                }
                if (i != j && g.bidirected(i, j)) {
                    CHECK(std::abs(p.beta(i, j)) >= 0.4);
                    CHECK(std::abs(p.beta(i, j)) <= 0.7);
                    off += std::abs(p.beta(i, j));
                }
            }
            CHECK(p.beta(i, i) - off >= 0.7 - 1e-12);
            CHECK(p.beta(i, i) - off <= 1.2 + 1e-12);
        }
    }
    Admg cyc = Admg::from_edges({"A", "B"}, {{"A", "B"}, {"B", "A"}}, {});
    CHECK_THROWS_AS(random_parameters(cyc, rng), InvalidGraphError);
}

TEST_CASE("sampled covariance approaches the implied covariance") {
    std::mt19937_64 rng(31);
    const SemParams p = random_parameters(fig1b(), rng);
    const Dataset data = sample_data(p, 50000, rng);
    const Matrix s = implied_covariance(p);
    CHECK((data.covariance() - s).norm() < 0.05 * s.norm());
    CHECK(data.data().colwise().mean().norm() < 0.05);
    CHECK(data.names() == kABCD);

    std::mt19937_64 r1(1), r2(1);
    CHECK(sample_data(p, 10, r1).data() == sample_data(p, 10, r2).data());
}

TEST_CASE("Verma residual vanishes on the Verma graph only") {
    std::mt19937_64 rng(44);
    double max_c = 0.0, min_e = 1e9;
    for (int k = 0; k < 100; ++k) {
        const SemParams p = random_parameters(fig1c(), rng);
        max_c = std::max(max_c, std::abs(verma_residual(implied_covariance(p), p)));
        const SemParams q = random_parameters(fig1e(), rng);
        min_e = std::min(min_e, std::abs(verma_residual(implied_covariance(q), q)));
    }
    CHECK(max_c <= 1e-10);
    CHECK(min_e > 1e-6);
}

TEST_CASE("standardization gives unit variances and preserves the model") {
    std::mt19937_64 rng(2);
    const SemParams p = random_parameters(fig1c(), rng);
    Matrix s_std;
    SemParams p_std;
    standardize(implied_covariance(p), p, s_std, p_std);
    for (int i = 0; i < 4; ++i) CHECK(s_std(i, i) == doctest::Approx(1.0));
    CHECK((implied_covariance(p_std) - s_std).norm() < 1e-10);
}

TEST_CASE("one-dimensional log-likelihood at the sample variance") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(3.0, 2.0);
    const std::size_t n = 500;
    Matrix x(n, 1);
    for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), 0) = z(rng);
    const Dataset data(x, {"X"});
    const double var = data.covariance()(0, 0);
    SemParams p = SemParams::identity(1);
    p.names = {"X"};
    p.beta(0, 0) = var;
    const double expect = static_cast<double>(n) * (std::log(2 * std::numbers::pi * var) + 1.0);
    CHECK(gaussian_neg2_loglik(data, p) == doctest::Approx(expect).epsilon(1e-12));
    // Any other variance fits worse.
    p.beta(0, 0) = 1.1 * var;
    CHECK(gaussian_neg2_loglik(data, p) > expect);
}

TEST_CASE("log-likelihood rejects a non positive definite model") {
    const Dataset data(Matrix::Identity(3, 2), {"A", "B"});
    SemParams p = SemParams::identity(2);
    p.names = {"A", "B"};
    p.beta << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(gaussian_neg2_loglik(data, p), NumericError);
}

TEST_CASE("dataset CSV round trip is exact") {
    std::mt19937_64 rng(9);
    const SemParams p = random_parameters(fig1c(), rng);
    const Dataset data = sample_data(p, 200, rng);
    const std::string text = dataset_to_csv(data);
    const Dataset back = dataset_from_csv(text);
    CHECK(back.names() == data.names());
    CHECK(back.data() == data.data());
    CHECK(dataset_to_csv(back) == text);

    CHECK_THROWS_AS(dataset_from_csv("A,B\n1,2\n3\n"), FormatError);
    CHECK_THROWS_AS(dataset_from_csv("A,B\n1,x\n"), FormatError);
    CHECK_THROWS_AS(dataset_from_csv(""), FormatError);
}

TEST_CASE("parameter JSON round trip") {
    std::mt19937_64 rng(10);
    const SemParams p = random_parameters(fig1e(), rng);
    const SemParams back = params_from_json(params_to_json(p));
    CHECK(back.delta == p.delta);
    CHECK(back.beta == p.beta);
    CHECK(back.names == p.names);

    auto j = params_to_json(p);
    j.erase("names");
    CHECK(params_from_json(j).names == std::vector<std::string>{"V1", "V2", "V3", "V4"});
    j["beta"][0][1] = 0.123;
    CHECK_THROWS_AS(params_from_json(j), FormatError);
}
