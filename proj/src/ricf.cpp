#include "admg/ricf.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "admg/errors.hpp"

namespace admg {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kJitter = 1e-8;

// All rows/columns except i.
std::vector<Eigen::Index> others(Eigen::Index d, Eigen::Index i) {
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<std::size_t>(d > 0 ? d - 1 : 0));
    for (Eigen::Index k = 0; k < d; ++k) {
        if (k != i) idx.push_back(k);
    }
    return idx;
}

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

void RicfOptions::validate(std::size_t d) const {
    if (!(tol > 0.0)) throw ArgumentError("ricf tol must be positive");
    if (max_iterations < 1) throw ArgumentError("ricf max_iterations must be at least 1");
    if (!(rho >= 0.0)) throw ArgumentError("rho must be non-negative");
    if (!(lambda >= 0.0)) throw ArgumentError("lambda must be non-negative");
    if (!std::isfinite(alpha)) throw ArgumentError("alpha must be finite");
    if (c_sharpness && !(*c_sharpness > 0.0)) throw ArgumentError("c_sharpness must be positive");
    if (support && support->size() != d) throw ArgumentError("support graph size does not match the data");
    penalty.validate(d);
}

Matrix residuals(const Matrix& x, const SemParams& p) {
    if (static_cast<std::size_t>(x.cols()) != p.size()) throw ArgumentError("parameter size does not match data");
    return x - x * p.delta;
}

Matrix residuals(const Dataset& data, const SemParams& p) { return residuals(data.data(), p); }

Matrix pseudo_variables(const Matrix& eps, const Matrix& beta, std::size_t i) {
    const Eigen::Index d = eps.cols();
    const auto ii = static_cast<Eigen::Index>(i);
    if (beta.rows() != d || beta.cols() != d) throw ArgumentError("beta shape does not match residuals");
    if (ii >= d) throw ArgumentError("vertex index out of range");
    const auto idx = others(d, ii);
    Matrix z = Matrix::Zero(eps.rows(), d);
    if (idx.empty()) return z;
    const Matrix sub = beta(idx, idx);
    const Eigen::FullPivLU<Matrix> lu(sub);
    if (!lu.isInvertible()) throw NumericError("beta(-i, -i) is singular");
    const Matrix inv_t = lu.inverse().transpose();
    z(Eigen::all, idx) = eps(Eigen::all, idx) * inv_t;
    return z;
}

RicfObjective::RicfObjective(const Matrix& sample_cov, std::size_t n, const SemParams& anchor,
                             const RicfOptions& opts, std::vector<std::string>* warnings)
    : s_(sample_cov), opts_(opts), anchor_(anchor) {
    const Eigen::Index d = static_cast<Eigen::Index>(anchor.size());
    if (sample_cov.rows() != d || sample_cov.cols() != d) throw ArgumentError("covariance shape does not match parameters");
    c_ = opts.c_sharpness ? *opts.c_sharpness : std::log(static_cast<double>(n));
    uses_penalty_ = opts.rho != 0.0 || opts.alpha != 0.0;

    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            if (i == j) continue;
            if (!opts.support || opts.support->directed(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) {
                free_.push_back({true, i, j});
            }
        }
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            if (!opts.support || opts.support->bidirected(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) {
                free_.push_back({false, i, j});
            }
        }
    }

    // Z^(i) = eps(:, -i) beta(-i,-i)^{-1} with eps = X (I - delta), so Z^(i) = X a_i.
    const Matrix m = Matrix::Identity(d, d) - anchor.delta;
    a_.assign(static_cast<std::size_t>(d), Matrix::Zero(d, d));
    for (Eigen::Index i = 0; i < d; ++i) {
        const auto idx = others(d, i);
        if (idx.empty()) continue;
        Matrix sub = anchor.beta(idx, idx);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(sub);
        const Vector ev = eig.eigenvalues();
        const double lo = ev.cwiseAbs().minCoeff();
        const double hi = ev.cwiseAbs().maxCoeff();
        if (!(lo > 0.0) || hi / lo > kMaxCondition) {
            sub.diagonal().array() += kJitter;
            eig.compute(sub);
            if (warnings) {
                std::ostringstream msg;
                msg << "beta(-" << i << ", -" << i << ") is ill-conditioned; added " << kJitter
                    << " to its diagonal";
                warnings->push_back(msg.str());
            }
        }
        const Matrix inv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                           eig.eigenvectors().transpose();
        a_[static_cast<std::size_t>(i)](Eigen::all, idx) = m(Eigen::all, idx) * inv;
    }
}

Vector RicfObjective::pack(const SemParams& p) const {
    Vector theta(dimension());
    for (std::size_t k = 0; k < free_.size(); ++k) {
        const Slot& s = free_[k];
        theta(static_cast<Eigen::Index>(k)) = s.is_delta ? p.delta(s.i, s.j) : p.beta(s.i, s.j);
    }
    return theta;
}

SemParams RicfObjective::unpack(const Vector& theta) const {
    SemParams p = anchor_;
    p.delta.setZero();
    const Vector diag = p.beta.diagonal();
    p.beta.setZero();
    p.beta.diagonal() = diag;
    for (std::size_t k = 0; k < free_.size(); ++k) {
        const Slot& s = free_[k];
        const double v = theta(static_cast<Eigen::Index>(k));
        if (s.is_delta) {
            p.delta(s.i, s.j) = v;
        } else {
            p.beta(s.i, s.j) = v;
            p.beta(s.j, s.i) = v;
        }
    }
    return p;
}

double RicfObjective::value(const Vector& theta) const {
    Vector grad(theta.size());
    return evaluate(theta, grad);
}

double RicfObjective::evaluate(const Vector& theta, Vector& grad) const {
    const SemParams p = unpack(theta);
    const Eigen::Index d = static_cast<Eigen::Index>(p.size());

    Matrix u = Matrix::Identity(d, d) - p.delta;
    for (Eigen::Index i = 0; i < d; ++i) u.col(i).noalias() -= a_[static_cast<std::size_t>(i)] * p.beta.col(i);
    const Matrix su = s_ * u;
    double f = 0.5 * u.cwiseProduct(su).sum();

    // Gradient of LS in matrix form: column i of gb is d LS / d beta(:, i).
    Matrix gb(d, d);
    for (Eigen::Index i = 0; i < d; ++i) gb.col(i).noalias() = -a_[static_cast<std::size_t>(i)].transpose() * su.col(i);

    double weight = 0.0;
    ClassPenaltyGradient cp;
    if (uses_penalty_) {
        cp = class_penalty_gradient(p, opts_.cls, opts_.penalty);
        f += 0.5 * opts_.rho * cp.value * cp.value + opts_.alpha * cp.value;
        weight = opts_.rho * cp.value + opts_.alpha;
    }

    grad.resize(dimension());
    for (std::size_t k = 0; k < free_.size(); ++k) {
        const Slot& s = free_[k];
        const double v = theta(static_cast<Eigen::Index>(k));
        double g = s.is_delta ? -su(s.i, s.j) : gb(s.i, s.j) + gb(s.j, s.i);
        if (uses_penalty_) g += weight * (s.is_delta ? cp.d_delta(s.i, s.j) : cp.d_beta(s.i, s.j));
        if (opts_.lambda != 0.0) {
            const double t = std::tanh(c_ * std::abs(v));
            f += opts_.lambda * t;
            g += opts_.lambda * c_ * (1.0 - t * t) * sign0(v);
        }
        grad(static_cast<Eigen::Index>(k)) = g;
    }
    return f;
}

namespace {

double state_objective(const Matrix& s, std::size_t n, const SemParams& p, const RicfOptions& opts) {
    const RicfObjective obj(s, n, p, opts);
    return obj.value(obj.pack(p));
}

}  // namespace

RicfResult regularized_ricf(const Dataset& data, const SemParams& init, const RicfOptions& opts) {
    init.validate();
    const std::size_t d = init.size();
    if (d != data.cols()) throw ArgumentError("initial parameters do not match the dataset columns");
    opts.validate(d);
    const Matrix& s = data.covariance();
    const std::size_t n = data.rows();

    RicfResult result;
    RicfState state{init, 0, 0.0, state_objective(s, n, init, opts)};
    if (!std::isfinite(state.objective)) throw RicfError("RICF objective is not finite at the initial point", state);
    result.trace.push_back(state);

    const Matrix identity = Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (int t = 1; t <= opts.max_iterations; ++t) {
        SemParams next;
        try {
            const RicfObjective obj(s, n, state.params, opts, &result.warnings);
            const LbfgsResult inner = minimize_lbfgs(
                [&obj](const Vector& x, Vector& g) { return obj.evaluate(x, g); }, obj.pack(state.params), opts.inner);
            next = obj.unpack(inner.x);
        } catch (const NumericError& e) {
            throw RicfError(std::string("RICF inner minimization failed: ") + e.what(), state);
        }

        const Matrix m = identity - next.delta;
        next.beta.diagonal() = (m.transpose() * s * m).diagonal();

        const double step = std::sqrt((next.delta - state.params.delta).squaredNorm() +
                                      (next.beta - state.params.beta).squaredNorm());
        const double objective = state_objective(s, n, next, opts);
        if (!std::isfinite(objective) || !std::isfinite(step)) {
            throw RicfError("RICF objective diverged", state);
        }
        state = RicfState{std::move(next), t, step, objective};
        result.trace.push_back(state);
        if (step < opts.tol) {
            result.converged = true;
            break;
        }
    }
    result.params = state.params;
    result.iterations = state.iteration;
    result.last_step_norm = state.last_step_norm;
    return result;
}

}  // namespace admg
