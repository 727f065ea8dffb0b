#include "admg/scoring.hpp"

#include <cmath>

#include "admg/errors.hpp"

namespace admg {

double ScoreConfig::sharpness(std::size_t n) const {
    return c_sharpness ? *c_sharpness : std::log(static_cast<double>(n));
}

void ScoreConfig::validate() const {
    if (!(lambda >= 0.0)) throw ArgumentError("lambda must be non-negative");
    if (!(zero_tol >= 0.0)) throw ArgumentError("zero_tol must be non-negative");
    if (c_sharpness && !(*c_sharpness > 0.0)) throw ArgumentError("c_sharpness must be positive");
}

std::size_t nonzero_parameter_count(const SemParams& p, double zero_tol) {
    const auto d = static_cast<Eigen::Index>(p.size());
    std::size_t count = static_cast<std::size_t>(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            if (i == j) continue;
            if (std::abs(p.delta(i, j)) > zero_tol) ++count;
            if (i < j && std::abs(p.beta(i, j)) > zero_tol) ++count;
        }
    }
    return count;
}

double tanh_penalty(const SemParams& p, double c) {
    const auto d = static_cast<Eigen::Index>(p.size());
    double total = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        total += std::tanh(c * std::abs(p.beta(i, i)));
        for (Eigen::Index j = 0; j < d; ++j) {
            if (i == j) continue;
            total += std::tanh(c * std::abs(p.delta(i, j)));
            if (i < j) total += std::tanh(c * std::abs(p.beta(i, j)));
        }
    }
    return total;
}

double bic(const Dataset& data, const SemParams& p, const ScoreConfig& cfg) {
    cfg.validate();
    const double fit = gaussian_neg2_loglik(data, p);
    return fit + std::log(static_cast<double>(data.rows())) *
                     static_cast<double>(nonzero_parameter_count(p, cfg.zero_tol));
}

double abic(const Dataset& data, const SemParams& p, const ScoreConfig& cfg) {
    cfg.validate();
    const double fit = gaussian_neg2_loglik(data, p);
    if (cfg.lambda == 0.0) return fit;
    return fit + cfg.lambda * tanh_penalty(p, cfg.sharpness(data.rows()));
}

}  // namespace admg
