#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "admg/graph.hpp"
#include "admg/matrix.hpp"

namespace admg {

/// Linear SEM with correlated errors. delta(i, j) is the coefficient of V_i in
/// the structural equation of V_j; beta is the error covariance.
struct SemParams {
    Matrix delta;
    Matrix beta;
    std::vector<std::string> names;

    std::size_t size() const { return static_cast<std::size_t>(delta.rows()); }

    /// delta = 0, beta = I, names V1..Vd.
    static SemParams identity(std::size_t d);

    /// Shapes agree, names match, beta symmetric. Throws ArgumentError.
    void validate() const;

    /// Graph of the nonzero pattern (|value| > tol) with this parameter set's names.
    Admg support(double tol = 0.0) const;
};

}  // namespace admg
