#pragma once

#include <functional>

#include "admg/matrix.hpp"

namespace admg {

/// Returns f(x) and writes the gradient into `grad` (already sized).
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct LbfgsOptions {
    int max_iterations = 1000;
    int memory = 10;
    double grad_tol = 1e-6;
    /// Stop when |f_k - f_{k+1}| <= f_rel_tol * max(1, |f_k|).
    double f_rel_tol = 1e-12;
    int max_line_search = 40;
    double c1 = 1e-4;
    double c2 = 0.9;
};

enum class LbfgsStatus { GradientTolerance, FunctionTolerance, IterationLimit, LineSearchFailed };

struct LbfgsResult {
    Vector x;
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    int evaluations = 0;
    LbfgsStatus status = LbfgsStatus::IterationLimit;
};

/// Limited-memory BFGS with a strong Wolfe line search. Every accepted step
/// satisfies the sufficient-decrease condition, so the returned value never
/// exceeds f(x0). Throws NumericError if f(x0) is not finite.
LbfgsResult minimize_lbfgs(const Objective& f, Vector x0, const LbfgsOptions& opts = {});

}  // namespace admg
