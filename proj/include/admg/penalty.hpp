#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "admg/graph.hpp"
#include "admg/matrix.hpp"
#include "admg/sem_params.hpp"

namespace admg {

enum class PenaltyMode { MatrixExponential, MatrixPower };

/// Constants of the algebraic graph-class constraints.
///
/// In MatrixPower mode every e^A is replaced by (I + cA)^d, with c_directed for
/// directed parts and c_bidirected for bidirected parts. MatrixExponential mode
/// truncates the exponential series after `exp_series_terms` terms, which must
/// be at least d. `tanh_scale` sharpens Greenery's soft fixability mask.
struct PenaltyConfig {
    PenaltyMode mode = PenaltyMode::MatrixPower;
    double c_directed = 1.0;
    double c_bidirected = 2.0;
    double tanh_scale = std::log(5000.0);
    int exp_series_terms = 20;

    void validate(std::size_t d) const;
};

double acyclicity_penalty(const Matrix& directed, const PenaltyConfig& cfg);
double ancestrality_penalty(const Matrix& directed, const Matrix& bidirected, const PenaltyConfig& cfg);
double bow_penalty(const Matrix& directed, const Matrix& bidirected, const PenaltyConfig& cfg);

/// Soft c-tree detector: zero iff every vertex is reachable by primal fixing
/// (for acyclic supports), positive otherwise.
double greenery(const Matrix& directed, const Matrix& bidirected, const PenaltyConfig& cfg);

/// Fixability masks f computed by Greenery's inner loop for one root, one
/// vector per inner iteration.
std::vector<Vector> greenery_masks(const Matrix& directed, const Matrix& bidirected,
                                   const PenaltyConfig& cfg, std::size_t root);

/// Acyclicity term plus the class-specific term.
double structure_penalty(GraphClass cls, const Matrix& directed, const Matrix& bidirected,
                         const PenaltyConfig& cfg);

struct StructureGradient {
    double value = 0.0;
    Matrix d_directed;
    Matrix d_bidirected;
};

/// Value and gradient of structure_penalty with respect to every entry of
/// both matrices (bidirected entries are treated as independent).
StructureGradient structure_penalty_gradient(GraphClass cls, const Matrix& directed,
                                             const Matrix& bidirected, const PenaltyConfig& cfg);

/// h(theta): structure penalty of D = delta o delta and B = beta' o beta',
/// where beta' is beta with its diagonal zeroed.
double class_penalty(const SemParams& params, GraphClass cls, const PenaltyConfig& cfg);

struct ClassPenaltyGradient {
    double value = 0.0;
    Matrix d_delta;
    /// Symmetric; entry (i, j) is the derivative with respect to the single
    /// parameter shared by beta(i, j) and beta(j, i). Diagonal is zero.
    Matrix d_beta;
};

ClassPenaltyGradient class_penalty_gradient(const SemParams& params, GraphClass cls,
                                            const PenaltyConfig& cfg);

}  // namespace admg
