#include "admg/linsem.hpp"

#include <cmath>
#include <numbers>

#include "admg/errors.hpp"

namespace admg {

SemParams SemParams::identity(std::size_t d) {
    SemParams p;
    const auto n = static_cast<Eigen::Index>(d);
    p.delta = Matrix::Zero(n, n);
    p.beta = Matrix::Identity(n, n);
    p.names = Admg::with_default_names(d).names();
    return p;
}

void SemParams::validate() const {
    if (delta.rows() != delta.cols() || beta.rows() != beta.cols() || delta.rows() != beta.rows()) {
        throw ArgumentError("delta and beta must be square matrices of the same size");
    }
    if (!names.empty() && names.size() != size()) {
        throw ArgumentError("parameter names do not match the matrix size");
    }
    if (!delta.allFinite() || !beta.allFinite()) throw NumericError("non-finite SEM parameters");
    const double scale = std::max(1.0, beta.cwiseAbs().maxCoeff());
    if ((beta - beta.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw ArgumentError("beta must be symmetric");
    }
}

Admg SemParams::support(double tol) const {
    validate();
    std::vector<std::string> labels = names.empty() ? Admg::with_default_names(size()).names() : names;
    Admg g(std::move(labels));
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = 0; j < size(); ++j) {
            if (i == j) continue;
            if (std::abs(delta(i, j)) > tol) g.set_directed(i, j, true);
            if (j > i && std::abs(beta(i, j)) > tol) g.set_bidirected(i, j, true);
        }
    }
    return g;
}

Dataset::Dataset(Matrix x, std::vector<std::string> names) : x_(std::move(x)), names_(std::move(names)) {
    if (names_.size() != static_cast<std::size_t>(x_.cols())) {
        throw ArgumentError("dataset has " + std::to_string(x_.cols()) + " columns but " +
                            std::to_string(names_.size()) + " names");
    }
    if (x_.rows() < 2) throw ArgumentError("dataset needs at least two rows");
    if (!x_.allFinite()) throw NumericError("dataset contains non-finite values");
    const double n = static_cast<double>(x_.rows());
    raw_ = (x_.transpose() * x_) / n;
    const Matrix centered = x_.rowwise() - x_.colwise().mean();
    centered_ = (centered.transpose() * centered) / n;
}

Dataset Dataset::stack(const Dataset& top, const Dataset& bottom) {
    if (top.names() != bottom.names()) throw ArgumentError("cannot stack datasets with different columns");
    Matrix x(top.x_.rows() + bottom.x_.rows(), top.x_.cols());
    x << top.x_, bottom.x_;
    return Dataset(std::move(x), top.names_);
}

namespace {

Matrix inverse_of_i_minus_delta(const Matrix& delta) {
    const auto d = delta.rows();
    const Eigen::FullPivLU<Matrix> lu(Matrix::Identity(d, d) - delta);
    if (!lu.isInvertible()) throw NumericError("I - delta is singular");
    return lu.inverse();
}

}  // namespace

Matrix implied_covariance(const SemParams& p) {
    p.validate();
    const Matrix inv = inverse_of_i_minus_delta(p.delta);
    Matrix sigma = inv.transpose() * p.beta * inv;
    return 0.5 * (sigma + sigma.transpose());
}

Dataset sample_data(const SemParams& p, std::size_t n, std::mt19937_64& rng) {
    p.validate();
    const auto d = static_cast<Eigen::Index>(p.size());
    const Eigen::LLT<Matrix> llt(p.beta);
    if (llt.info() != Eigen::Success) throw NumericError("beta is not positive definite");
    const Matrix inv = inverse_of_i_minus_delta(p.delta);

    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix noise(static_cast<Eigen::Index>(n), d);
    for (Eigen::Index r = 0; r < noise.rows(); ++r)
        for (Eigen::Index c = 0; c < d; ++c) noise(r, c) = normal(rng);
    // rows of eps have covariance L L' = beta; each row v solves v (I - delta) = eps
    const Matrix eps = noise * llt.matrixL().transpose();
    Matrix x = eps * inv;
    std::vector<std::string> names = p.names.empty() ? Admg::with_default_names(p.size()).names() : p.names;
    return Dataset(std::move(x), std::move(names));
}

SemParams random_parameters(const Admg& g, std::mt19937_64& rng) {
    if (!is_acyclic(g)) throw InvalidGraphError("random_parameters requires an acyclic graph");
    const std::size_t d = g.size();
    const auto n = static_cast<Eigen::Index>(d);
    std::uniform_real_distribution<double> coef(0.5, 2.0);
    std::uniform_real_distribution<double> cov(0.4, 0.7);
    std::uniform_real_distribution<double> var(0.7, 1.2);
    std::bernoulli_distribution negative(0.5);

    SemParams p;
    p.names = g.names();
    p.delta = Matrix::Zero(n, n);
    p.beta = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (!g.directed(i, j)) continue;
            const double m = coef(rng);
            p.delta(i, j) = negative(rng) ? -m : m;
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            if (!g.bidirected(i, j)) continue;
            const double m = cov(rng);
            p.beta(i, j) = p.beta(j, i) = negative(rng) ? -m : m;
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        p.beta(i, i) = var(rng) + p.beta.row(i).cwiseAbs().sum();
    }
    return p;
}

double gaussian_neg2_loglik(const Matrix& sample_cov, std::size_t n, const Matrix& model_cov) {
    const auto d = model_cov.rows();
    const Eigen::LLT<Matrix> llt(model_cov);
    if (llt.info() != Eigen::Success) throw NumericError("implied covariance is not positive definite");
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const double trace = llt.solve(sample_cov).trace();
    const double value = static_cast<double>(n) *
                         (logdet + trace + static_cast<double>(d) * std::log(2.0 * std::numbers::pi));
    if (!std::isfinite(value)) throw NumericError("non-finite log-likelihood");
    return value;
}

double gaussian_neg2_loglik(const Dataset& data, const SemParams& p, bool assume_mean_zero) {
    if (p.size() != data.cols()) throw ArgumentError("parameter size does not match dataset columns");
    const Matrix& s = assume_mean_zero ? data.second_moment() : data.covariance();
    return gaussian_neg2_loglik(s, data.rows(), implied_covariance(p));
}

void standardize(const Matrix& sigma, const SemParams& p, Matrix& sigma_std, SemParams& p_std) {
    const Vector sd = sigma.diagonal().array().sqrt().matrix();
    if ((sd.array() <= 0.0).any()) throw NumericError("covariance has a non-positive variance");
    const Vector inv_sd = sd.cwiseInverse();
    sigma_std = inv_sd.asDiagonal() * sigma * inv_sd.asDiagonal();
    p_std = p;
    p_std.delta = sd.asDiagonal() * p.delta * inv_sd.asDiagonal();
    p_std.beta = inv_sd.asDiagonal() * p.beta * inv_sd.asDiagonal();
}

double verma_residual(const Matrix& sigma, const SemParams& p) {
    if (sigma.rows() != 4 || sigma.cols() != 4 || p.size() != 4) {
        throw ArgumentError("verma_residual is defined for the four-vertex graph (A, B, C, D)");
    }
    Matrix s;
    SemParams q;
    standardize(sigma, p, s, q);
    constexpr int A = 0, B = 1, C = 2, D = 3;
    const Matrix& dl = q.delta;
    const Matrix& bt = q.beta;
    return s(B, C) - dl(C, D) * dl(D, B) - dl(A, C) * bt(A, B) - dl(A, C) * bt(A, D) * dl(D, B);
}

}  // namespace admg
