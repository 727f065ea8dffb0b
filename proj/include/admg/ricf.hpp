#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "admg/errors.hpp"
#include "admg/graph.hpp"
#include "admg/lbfgs.hpp"
#include "admg/linsem.hpp"
#include "admg/penalty.hpp"
#include "admg/sem_params.hpp"

namespace admg {

struct RicfOptions {
    double tol = 1e-4;
    int max_iterations = 100;
    GraphClass cls = GraphClass::Ancestral;
    PenaltyConfig penalty;
    double rho = 0.0;
    double alpha = 0.0;
    double lambda = 0.0;
    /// tanh sharpness; ln n when unset.
    std::optional<double> c_sharpness;
    /// Restricts the free parameters to the edges of this graph.
    std::optional<Admg> support;
    LbfgsOptions inner;

    void validate(std::size_t d) const;
};

struct RicfState {
    SemParams params;
    int iteration = 0;
    double last_step_norm = 0.0;
    /// Inner objective at `params`, with pseudo-variables built from `params`.
    double objective = 0.0;
};

struct RicfResult {
    SemParams params;
    int iterations = 0;
    double last_step_norm = 0.0;
    /// Step norm fell below tol before the iteration cap.
    bool converged = false;
    /// Initial state followed by one entry per iteration.
    std::vector<RicfState> trace;
    std::vector<std::string> warnings;
};

/// The objective became non-finite. Carries the last state with a finite value.
class RicfError : public NumericError {
public:
    RicfError(const std::string& what, RicfState last) : NumericError(what), last_state(std::move(last)) {}
    RicfState last_state;
};

/// eps(:, i) = X(:, i) - X delta(:, i).
Matrix residuals(const Matrix& x, const SemParams& p);
Matrix residuals(const Dataset& data, const SemParams& p);

/// Z with column i zero and Z(:, -i) = eps(:, -i) beta(-i, -i)^{-T}.
/// Throws NumericError when beta(-i, -i) is singular.
Matrix pseudo_variables(const Matrix& eps, const Matrix& beta, std::size_t i);

/// The smooth inner objective of one RICF iteration,
///   LS(theta) + rho/2 h(theta)^2 + alpha h(theta) + lambda sum tanh(c |theta_k|),
/// with LS(theta) = 1/(2n) sum_i |X_i - X delta_i - Z^(i) beta_i|^2 and the
/// pseudo-variables Z^(i) frozen at `anchor`. Everything is computed from the
/// centred sample covariance. theta holds the free off-diagonal delta entries
/// (row-major) followed by the free upper-triangular beta entries; beta's
/// diagonal is taken from `anchor`.
class RicfObjective {
public:
    RicfObjective(const Matrix& sample_cov, std::size_t n, const SemParams& anchor, const RicfOptions& opts,
                  std::vector<std::string>* warnings = nullptr);

    Eigen::Index dimension() const { return static_cast<Eigen::Index>(free_.size()); }
    Vector pack(const SemParams& p) const;
    SemParams unpack(const Vector& theta) const;

    double value(const Vector& theta) const;
    double evaluate(const Vector& theta, Vector& grad) const;

private:
    struct Slot {
        bool is_delta;
        Eigen::Index i;
        Eigen::Index j;
    };

    const Matrix& s_;
    const RicfOptions& opts_;
    SemParams anchor_;
    std::vector<Slot> free_;
    std::vector<Matrix> a_;  // Z^(i) = X a_[i]
    double c_;
    bool uses_penalty_;
};

RicfResult regularized_ricf(const Dataset& data, const SemParams& init, const RicfOptions& opts);

}  // namespace admg
