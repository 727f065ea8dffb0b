#include "admg/penalty.hpp"

#include <string>

#include "admg/errors.hpp"

namespace admg {

void PenaltyConfig::validate(std::size_t d) const {
    if (!(c_directed > 0.0) || !(c_bidirected > 0.0) || !(tanh_scale > 0.0)) {
        throw ArgumentError("penalty constants must be strictly positive");
    }
    if (mode == PenaltyMode::MatrixExponential &&
        (exp_series_terms < 1 || static_cast<std::size_t>(exp_series_terms) < d)) {
        throw ArgumentError("exp_series_terms (" + std::to_string(exp_series_terms) +
                            ") must be at least the number of vertices (" + std::to_string(d) + ")");
    }
}

namespace {

// Upper block-triangular pair [[P, Q], [0, P]]; Q carries a Frechet derivative.
struct BlockPair {
    Matrix p;
    Matrix q;

    BlockPair operator*(const BlockPair& o) const { return {p * o.p, p * o.q + q * o.p}; }
};

// A -> (I + cA)^d, or the truncated exponential series of A.
class SeriesMap {
public:
    SeriesMap(const PenaltyConfig& cfg, double c) : cfg_(cfg), c_(c) {}

    Matrix value(const Matrix& a) const {
        const auto d = a.rows();
        if (cfg_.mode == PenaltyMode::MatrixPower) {
            return power(Matrix::Identity(d, d) + c_ * a, static_cast<unsigned>(d));
        }
        const int terms = cfg_.exp_series_terms;
        Matrix result = Matrix::Identity(d, d) * coefficient(terms);
        for (int k = terms - 1; k >= 0; --k) {
            result = result * a;
            result.diagonal().array() += coefficient(k);
        }
        return result;
    }

    /// Gradient with respect to A of <G, value(A)>.
    Matrix adjoint(const Matrix& a, const Matrix& g) const {
        const auto d = a.rows();
        if (d == 0) return Matrix(0, 0);
        if (cfg_.mode == PenaltyMode::MatrixPower) {
            const Matrix mt = (Matrix::Identity(d, d) + c_ * a).transpose();
            BlockPair base{mt, c_ * g};
            return power(base, static_cast<unsigned>(d)).q;
        }
        const Matrix at = a.transpose();
        const int terms = cfg_.exp_series_terms;
        BlockPair x{at, g};
        BlockPair result{Matrix::Identity(d, d) * coefficient(terms), Matrix::Zero(d, d)};
        for (int k = terms - 1; k >= 0; --k) {
            result = result * x;
            result.p.diagonal().array() += coefficient(k);
        }
        return result.q;
    }

private:
    static double coefficient(int k) {
        double c = 1.0;
        for (int i = 2; i <= k; ++i) c /= i;
        return c;
    }

    static Matrix power(Matrix base, unsigned exponent) {
        Matrix result = Matrix::Identity(base.rows(), base.cols());
        bool first = true;
        while (exponent > 0) {
            if (exponent & 1u) {
                result = first ? base : Matrix(result * base);
                first = false;
            }
            exponent >>= 1u;
            if (exponent > 0) base = base * base;
        }
        return result;
    }

    static BlockPair power(BlockPair base, unsigned exponent) {
        const auto d = base.p.rows();
        BlockPair result{Matrix::Identity(d, d), Matrix::Zero(d, d)};
        bool first = true;
        while (exponent > 0) {
            if (exponent & 1u) {
                result = first ? base : result * base;
                first = false;
            }
            exponent >>= 1u;
            if (exponent > 0) base = base * base;
        }
        return result;
    }

    const PenaltyConfig& cfg_;
    double c_;
};

void require_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) throw ArgumentError(std::string(what) + " matrix must be square");
}

void require_nonnegative(const Matrix& m, const char* what) {
    require_square(m, what);
    if ((m.array() < 0.0).any() || !m.allFinite()) {
        throw DomainError(std::string(what) + " matrix must be finite and entrywise non-negative");
    }
}

void check_inputs(const Matrix& directed, const Matrix& bidirected, const PenaltyConfig& cfg) {
    require_nonnegative(directed, "directed");
    require_nonnegative(bidirected, "bidirected");
    if (directed.rows() != bidirected.rows()) {
        throw ArgumentError("directed and bidirected matrices differ in size");
    }
    cfg.validate(static_cast<std::size_t>(directed.rows()));
}

struct GreeneryOutput {
    double value = 0.0;
    Matrix d_directed;
    Matrix d_bidirected;
};

// Forward pass of the c-tree penalty; when `with_gradient` is set the inner
// loop is replayed backwards for every root.
GreeneryOutput run_greenery(const Matrix& directed, const Matrix& bidirected,
                            const PenaltyConfig& cfg, bool with_gradient,
                            std::vector<Vector>* masks_for_root = nullptr,
                            std::size_t mask_root = 0) {
    const auto d = directed.rows();
    const SeriesMap pow_dir(cfg, cfg.c_directed);
    const SeriesMap pow_bi(cfg, cfg.c_bidirected);
    const double scale = cfg.tanh_scale;
    const Eigen::Index inner = d > 0 ? d - 1 : 0;

    GreeneryOutput out;
    if (with_gradient) {
        out.d_directed = Matrix::Zero(d, d);
        out.d_bidirected = Matrix::Zero(d, d);
    }

    std::vector<Matrix> df(inner + 1), bf(inner + 1), eb(inner);
    std::vector<Vector> masks(inner);
    double total = 0.0;
    for (Eigen::Index root = 0; root < d; ++root) {
        df[0] = directed;
        bf[0] = bidirected;
        for (Eigen::Index j = 0; j < inner; ++j) {
            eb[j] = pow_bi.value(bf[j]);
            Vector t = eb[j].cwiseProduct(df[j]).rowwise().sum();
            t(root) += 1.0;
            masks[j] = (scale * t).array().tanh().matrix();
            df[j + 1] = df[j] * masks[j].asDiagonal();
            bf[j + 1] = masks[j].asDiagonal() * bf[j] * masks[j].asDiagonal();
        }
        const Matrix pd = pow_dir.value(df[inner]);
        const Matrix pb = pow_bi.value(bf[inner]);
        total += pd.col(root).cwiseProduct(pb.col(root)).sum();

        if (masks_for_root != nullptr && static_cast<std::size_t>(root) == mask_root) {
            *masks_for_root = masks;
        }
        if (!with_gradient) continue;

        Matrix g_c = Matrix::Zero(d, d);
        g_c.col(root).setOnes();
        Matrix g_df = pow_dir.adjoint(df[inner], g_c.cwiseProduct(pb));
        Matrix g_bf = pow_bi.adjoint(bf[inner], g_c.cwiseProduct(pd));
        for (Eigen::Index j = inner - 1; j >= 0; --j) {
            const Vector& f = masks[j];
            Vector g_f = g_df.cwiseProduct(df[j]).colwise().sum().transpose();
            const Matrix h = g_bf.cwiseProduct(bf[j]);
            g_f += h * f + h.transpose() * f;

            Matrix g_df_prev = g_df * f.asDiagonal();
            Matrix g_bf_prev = f.asDiagonal() * g_bf * f.asDiagonal();

            const Vector g_t = (g_f.array() * scale * (1.0 - f.array().square())).matrix();
            g_df_prev += g_t.asDiagonal() * eb[j];
            const Matrix g_eb = g_t.asDiagonal() * df[j];
            g_bf_prev += pow_bi.adjoint(bf[j], g_eb);

            g_df = std::move(g_df_prev);
            g_bf = std::move(g_bf_prev);
        }
        out.d_directed += g_df;
        out.d_bidirected += g_bf;
    }
    out.value = total - static_cast<double>(d);
    return out;
}

}  // namespace

double acyclicity_penalty(const Matrix& directed, const PenaltyConfig& cfg) {
    require_nonnegative(directed, "directed");
    cfg.validate(static_cast<std::size_t>(directed.rows()));
    return SeriesMap(cfg, cfg.c_directed).value(directed).trace() - static_cast<double>(directed.rows());
}

double ancestrality_penalty(const Matrix& directed, const Matrix& bidirected, const PenaltyConfig& cfg) {
    check_inputs(directed, bidirected, cfg);
    const Matrix p = SeriesMap(cfg, cfg.c_directed).value(directed);
    return p.trace() - static_cast<double>(directed.rows()) + p.cwiseProduct(bidirected).sum();
}

double bow_penalty(const Matrix& directed, const Matrix& bidirected, const PenaltyConfig& cfg) {
    check_inputs(directed, bidirected, cfg);
    return acyclicity_penalty(directed, cfg) + directed.cwiseProduct(bidirected).sum();
}

double greenery(const Matrix& directed, const Matrix& bidirected, const PenaltyConfig& cfg) {
    check_inputs(directed, bidirected, cfg);
    return run_greenery(directed, bidirected, cfg, false).value;
}

std::vector<Vector> greenery_masks(const Matrix& directed, const Matrix& bidirected,
                                   const PenaltyConfig& cfg, std::size_t root) {
    check_inputs(directed, bidirected, cfg);
    if (root >= static_cast<std::size_t>(directed.rows())) throw ArgumentError("root out of range");
    std::vector<Vector> masks;
    run_greenery(directed, bidirected, cfg, false, &masks, root);
    return masks;
}

double structure_penalty(GraphClass cls, const Matrix& directed, const Matrix& bidirected,
                         const PenaltyConfig& cfg) {
    switch (cls) {
        case GraphClass::Ancestral: return ancestrality_penalty(directed, bidirected, cfg);
        case GraphClass::BowFree: return bow_penalty(directed, bidirected, cfg);
        case GraphClass::Arid:
            return acyclicity_penalty(directed, cfg) + greenery(directed, bidirected, cfg);
    }
    return 0.0;
}

StructureGradient structure_penalty_gradient(GraphClass cls, const Matrix& directed,
                                             const Matrix& bidirected, const PenaltyConfig& cfg) {
    check_inputs(directed, bidirected, cfg);
    const auto d = directed.rows();
    const SeriesMap pow_dir(cfg, cfg.c_directed);
    const Matrix identity = Matrix::Identity(d, d);
    StructureGradient out;
    switch (cls) {
        case GraphClass::Ancestral: {
            // trace(P) - d + sum(P o B) = <I + B, P> - d
            const Matrix p = pow_dir.value(directed);
            const Matrix weight = identity + bidirected;
            out.value = p.cwiseProduct(weight).sum() - static_cast<double>(d);
            out.d_directed = pow_dir.adjoint(directed, weight);
            out.d_bidirected = p;
            break;
        }
        case GraphClass::BowFree: {
            const Matrix p = pow_dir.value(directed);
            out.value = p.trace() - static_cast<double>(d) + directed.cwiseProduct(bidirected).sum();
            out.d_directed = pow_dir.adjoint(directed, identity) + bidirected;
            out.d_bidirected = directed;
            break;
        }
        case GraphClass::Arid: {
            const Matrix p = pow_dir.value(directed);
            GreeneryOutput g = run_greenery(directed, bidirected, cfg, true);
            out.value = p.trace() - static_cast<double>(d) + g.value;
            out.d_directed = pow_dir.adjoint(directed, identity) + g.d_directed;
            out.d_bidirected = std::move(g.d_bidirected);
            break;
        }
    }
    return out;
}

namespace {

void induced_matrices(const SemParams& params, Matrix& directed, Matrix& bidirected) {
    params.validate();
    directed = params.delta.cwiseProduct(params.delta);
    bidirected = params.beta.cwiseProduct(params.beta);
    bidirected.diagonal().setZero();
}

}  // namespace

double class_penalty(const SemParams& params, GraphClass cls, const PenaltyConfig& cfg) {
    Matrix directed, bidirected;
    induced_matrices(params, directed, bidirected);
    return structure_penalty(cls, directed, bidirected, cfg);
}

ClassPenaltyGradient class_penalty_gradient(const SemParams& params, GraphClass cls,
                                            const PenaltyConfig& cfg) {
    Matrix directed, bidirected;
    induced_matrices(params, directed, bidirected);
    const StructureGradient g = structure_penalty_gradient(cls, directed, bidirected, cfg);
    ClassPenaltyGradient out;
    out.value = g.value;
    out.d_delta = 2.0 * params.delta.cwiseProduct(g.d_directed);
    out.d_beta = 2.0 * params.beta.cwiseProduct(g.d_bidirected + g.d_bidirected.transpose());
    out.d_beta.diagonal().setZero();
    return out;
}

}  // namespace admg
