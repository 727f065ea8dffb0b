#include "admg/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "admg/errors.hpp"

namespace admg {

namespace {

struct Point {
    double step = 0.0;
    double value = 0.0;
    double slope = 0.0;
};

// Minimizer of the cubic through two points with known values and slopes,
// clamped into [lo, hi]; falls back to bisection when the cubic degenerates.
double cubic_step(const Point& a, const Point& b, double lo, double hi) {
    const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.step - b.step);
    const double disc = d1 * d1 - a.slope * b.slope;
    double t = 0.5 * (a.step + b.step);
    if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b.step - a.step);
        const double denom = b.slope - a.slope + 2.0 * d2;
        if (denom != 0.0) t = b.step - (b.step - a.step) * (b.slope + d2 - d1) / denom;
    }
    if (!std::isfinite(t)) t = 0.5 * (a.step + b.step);
    const double margin = 0.1 * (hi - lo);
    return std::clamp(t, lo + margin, hi - margin);
}

class LineSearch {
public:
    LineSearch(const Objective& f, const Vector& x, const Vector& dir, double f0, double g0,
               const LbfgsOptions& opts)
        : f_(f), x_(x), dir_(dir), f0_(f0), g0_(g0), opts_(opts), grad_(x.size()) {}

    // Returns true and fills the accepted point on success.
    bool run(double initial, Vector& x_out, Vector& g_out, double& f_out, int& evals) {
        Point prev{0.0, f0_, g0_};
        double step = initial;
        const double max_step = 1e10;
        for (int k = 0; k < opts_.max_line_search; ++k) {
            Point cur = eval(step, evals);
            if (!std::isfinite(cur.value)) {
                // Shrink toward the last finite point.
                step = prev.step + 0.5 * (step - prev.step);
                if (step - prev.step < 1e-20) return false;
                continue;
            }
            if (cur.value > f0_ + opts_.c1 * step * g0_ || (k > 0 && cur.value >= prev.value)) {
                return zoom(prev, cur, x_out, g_out, f_out, evals);
            }
            if (std::abs(cur.slope) <= -opts_.c2 * g0_) return accept(cur, x_out, g_out, f_out);
            if (cur.slope >= 0.0) return zoom(cur, prev, x_out, g_out, f_out, evals);
            prev = cur;
            step = std::min(2.0 * step, max_step);
        }
        return false;
    }

private:
    Point eval(double step, int& evals) {
        trial_ = x_ + step * dir_;
        ++evals;
        const double value = f_(trial_, grad_);
        const double slope = grad_.dot(dir_);
        if (!std::isfinite(slope)) return {step, std::numeric_limits<double>::infinity(), 0.0};
        return {step, value, slope};
    }

    bool accept(const Point& p, Vector& x_out, Vector& g_out, double& f_out) {
        x_out = trial_;
        g_out = grad_;
        f_out = p.value;
        return true;
    }

    bool zoom(Point lo, Point hi, Vector& x_out, Vector& g_out, double& f_out, int& evals) {
        Point best = lo;
        Vector best_x, best_g;
        bool have_best = false;
        for (int k = 0; k < opts_.max_line_search; ++k) {
            const double a = std::min(lo.step, hi.step);
            const double b = std::max(lo.step, hi.step);
            if (b - a <= 1e-16 * std::max(1.0, b)) break;
            const double step = std::isfinite(hi.value) ? cubic_step(lo, hi, a, b) : 0.5 * (a + b);
            Point cur = eval(step, evals);
            if (!std::isfinite(cur.value) || cur.value > f0_ + opts_.c1 * step * g0_ || cur.value >= lo.value) {
                hi = cur;
                continue;
            }
            if (std::abs(cur.slope) <= -opts_.c2 * g0_) return accept(cur, x_out, g_out, f_out);
            if (cur.slope * (hi.step - lo.step) >= 0.0) hi = lo;
            lo = cur;
            best = cur;
            best_x = trial_;
            best_g = grad_;
            have_best = true;
        }
        // Interval collapsed: settle for the best sufficient-decrease point.
        if (have_best && best.step > 0.0) {
            x_out = best_x;
            g_out = best_g;
            f_out = best.value;
            return true;
        }
        if (lo.step > 0.0) {
            const Point p = eval(lo.step, evals);
            if (std::isfinite(p.value) && p.value <= f0_ + opts_.c1 * p.step * g0_) return accept(p, x_out, g_out, f_out);
        }
        return false;
    }

    const Objective& f_;
    const Vector& x_;
    const Vector& dir_;
    double f0_;
    double g0_;
    const LbfgsOptions& opts_;
    Vector trial_;
    Vector grad_;
};

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& f, Vector x0, const LbfgsOptions& opts) {
    LbfgsResult result;
    result.x = std::move(x0);
    const auto n = result.x.size();
    Vector g(n);
    if (n == 0) {
        result.value = f(result.x, g);
        result.evaluations = 1;
        result.status = LbfgsStatus::GradientTolerance;
        return result;
    }
    result.value = f(result.x, g);
    result.evaluations = 1;
    if (!std::isfinite(result.value) || !g.allFinite()) throw NumericError("objective is not finite at the starting point");

    std::deque<Vector> s_hist, y_hist;
    std::deque<double> rho_hist;
    Vector dir(n), x_new(n), g_new(n);
    std::vector<double> alpha(static_cast<std::size_t>(opts.memory));

    for (int iter = 0;; ++iter) {
        result.grad_norm = g.norm();
        result.iterations = iter;
        if (result.grad_norm <= opts.grad_tol) {
            result.status = LbfgsStatus::GradientTolerance;
            return result;
        }
        if (iter >= opts.max_iterations) {
            result.status = LbfgsStatus::IterationLimit;
            return result;
        }

        // Two-loop recursion.
        dir = -g;
        const auto m = s_hist.size();
        for (std::size_t k = m; k-- > 0;) {
            alpha[k] = rho_hist[k] * s_hist[k].dot(dir);
            dir -= alpha[k] * y_hist[k];
        }
        if (m > 0) dir *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        for (std::size_t k = 0; k < m; ++k) {
            const double b = rho_hist[k] * y_hist[k].dot(dir);
            dir += (alpha[k] - b) * s_hist[k];
        }
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            dir = -g;
            slope = -g.squaredNorm();
        }
        const double initial = m == 0 ? std::min(1.0, 1.0 / result.grad_norm) : 1.0;

        double f_new = result.value;
        LineSearch ls(f, result.x, dir, result.value, slope, opts);
        if (!ls.run(initial, x_new, g_new, f_new, result.evaluations)) {
            if (m > 0) {
                // Retry once along steepest descent with fresh memory.
                s_hist.clear();
                y_hist.clear();
                rho_hist.clear();
                continue;
            }
            result.status = LbfgsStatus::LineSearchFailed;
            return result;
        }

        Vector s = x_new - result.x;
        Vector y = g_new - g;
        const double sy = s.dot(y);
        const double f_old = result.value;
        result.x.swap(x_new);
        g.swap(g_new);
        result.value = f_new;
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (static_cast<int>(s_hist.size()) == opts.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
        }
        if (std::abs(f_old - f_new) <= opts.f_rel_tol * std::max(1.0, std::abs(f_old))) {
            result.grad_norm = g.norm();
            result.iterations = iter + 1;
            result.status = result.grad_norm <= opts.grad_tol ? LbfgsStatus::GradientTolerance
                                                              : LbfgsStatus::FunctionTolerance;
            return result;
        }
    }
}

}  // namespace admg
