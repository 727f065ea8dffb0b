#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "admg/graph.hpp"
#include "admg/matrix.hpp"
#include "admg/sem_params.hpp"

namespace admg {

/// n x d observations with column names. The mean-centred sample covariance
/// (divisor n) is computed once at construction.
class Dataset {
public:
    Dataset(Matrix x, std::vector<std::string> names);

    const Matrix& data() const { return x_; }
    const std::vector<std::string>& names() const { return names_; }
    std::size_t rows() const { return static_cast<std::size_t>(x_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(x_.cols()); }

    /// Mean-centred covariance, divisor n.
    const Matrix& covariance() const { return centered_; }
    /// X'X / n without centring, for data known to have mean zero.
    const Matrix& second_moment() const { return raw_; }

    /// Concatenates the rows of two datasets with identical columns.
    static Dataset stack(const Dataset& top, const Dataset& bottom);

private:
    Matrix x_;
    std::vector<std::string> names_;
    Matrix centered_;
    Matrix raw_;
};

Matrix implied_covariance(const SemParams& p);

Dataset sample_data(const SemParams& p, std::size_t n, std::mt19937_64& rng);

/// Coefficients on the directed edges of `g` with magnitude in [0.5, 2],
/// error covariances on bidirected edges with magnitude in [0.4, 0.7], and a
/// diagonally dominant beta (diagonal = U[0.7, 1.2] + off-diagonal row sum).
SemParams random_parameters(const Admg& g, std::mt19937_64& rng);

/// -2 ln L of a zero-mean Gaussian with covariance implied by `p`.
double gaussian_neg2_loglik(const Dataset& data, const SemParams& p, bool assume_mean_zero = false);

/// Same quantity from a sufficient statistic (sample covariance and n).
double gaussian_neg2_loglik(const Matrix& sample_cov, std::size_t n, const Matrix& model_cov);

/// Rescales a covariance and matching parameters to unit variances.
void standardize(const Matrix& sigma, const SemParams& p, Matrix& sigma_std, SemParams& p_std);

/// Left-hand side of the Verma polynomial of the four-vertex graph
/// {A->C, C->D, D->B, A<->B, A<->D}, vertices ordered (A, B, C, D):
///   S_BC - d_CD d_DB - d_AC b_AB - d_AC b_AD d_DB
/// evaluated after rescaling Sigma and p to unit variances.
double verma_residual(const Matrix& sigma, const SemParams& p);

}  // namespace admg
