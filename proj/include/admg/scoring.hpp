#pragma once

#include <cstddef>
#include <optional>

#include "admg/linsem.hpp"
#include "admg/sem_params.hpp"

namespace admg {

struct ScoreConfig {
    double lambda = 0.05;
    /// tanh sharpness; ln n when unset.
    std::optional<double> c_sharpness;
    /// Parameters with |value| <= zero_tol are not counted by bic.
    double zero_tol = 0.05;

    double sharpness(std::size_t n) const;
    void validate() const;
};

/// Free parameters above zero_tol: off-diagonal delta entries, each
/// off-diagonal beta pair once, and every diagonal beta entry.
std::size_t nonzero_parameter_count(const SemParams& p, double zero_tol);

/// sum of tanh(c |theta_i|) over the same free parameters.
double tanh_penalty(const SemParams& p, double c);

double bic(const Dataset& data, const SemParams& p, const ScoreConfig& cfg = {});
double abic(const Dataset& data, const SemParams& p, const ScoreConfig& cfg = {});

}  // namespace admg
