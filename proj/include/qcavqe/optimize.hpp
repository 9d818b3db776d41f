#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qcavqe {

enum class OptimizerMethod { CobylaLike, NelderMead };

/// Derivative-free local minimization settings. Convergence: best-value
/// improvement below f_tol over a full polling cycle (n+1 evaluations), or
/// the trust region / simplex collapsing, before max_iter evaluations run out.
struct OptimizerConfig {
    OptimizerMethod method = OptimizerMethod::CobylaLike;
    std::vector<double> initial_theta; // empty -> caller default
    double f_tol = 1e-3;
    int max_iter = 500;
    double initial_step = 0.6;
    double min_step = 1e-6;

    void validate() const {
        if (f_tol <= 0.0) throw std::invalid_argument("optimizer f_tol must be positive");
        if (max_iter < 1) throw std::invalid_argument("optimizer max_iter must be >= 1");
    }
};

struct OptimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
    // (evaluation index, best value so far) whenever the best improves
    std::vector<std::pair<int, double>> trace;
};

using Objective = std::function<double(const std::vector<double>&)>;

namespace detail {

struct TracedObjective {
    const Objective& f;
    OptimizeResult& result;

    double operator()(const std::vector<double>& x) {
        const double v = f(x);
        ++result.evaluations;
        if (result.trace.empty() || v < result.value) {
            result.value = v;
            result.x = x;
            result.trace.emplace_back(result.evaluations, v);
        }
        return v;
    }
};

/// Linear-approximation trust-region search over a simplex of n+1 points:
/// fit the affine interpolant, step against its gradient within the trust
/// radius, shrink the radius (recentring the simplex) when the model stops
/// predicting descent.
inline void minimize_cobyla_like(const Objective& f, const std::vector<double>& x0,
                                 const OptimizerConfig& cfg, OptimizeResult& result) {
    const int n = static_cast<int>(x0.size());
    TracedObjective eval{f, result};

    std::vector<std::vector<double>> xs;
    std::vector<double> fs;
    double rho = cfg.initial_step;
    const double polish_rho = std::max(cfg.min_step, 2e-3 * cfg.initial_step);

    const auto build_simplex = [&](const std::vector<double>& center, double fc) {
        xs.assign(1, center);
        fs.assign(1, fc);
        for (int j = 0; j < n && result.evaluations < cfg.max_iter; ++j) {
            auto x = center;
            x[j] += rho;
            xs.push_back(x);
            fs.push_back(eval(x));
        }
        return static_cast<int>(xs.size()) == n + 1;
    };
    const auto best_index = [&] {
        return static_cast<int>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    };
    const auto worst_index = [&] {
        return static_cast<int>(std::max_element(fs.begin(), fs.end()) - fs.begin());
    };

    const double f0 = eval(x0);
    if (!build_simplex(x0, f0)) return;

    double cycle_best = *std::min_element(fs.begin(), fs.end());
    int since_cycle = 0;

    while (result.evaluations < cfg.max_iter) {
        const int ib = best_index();

        // Affine interpolant through the simplex: rows are x_i - x_best.
        Eigen::MatrixXd diffs(n, n);
        Eigen::VectorXd dvals(n);
        int row = 0;
        for (int i = 0; i <= n; ++i) {
            if (i == ib) continue;
            for (int j = 0; j < n; ++j) diffs(row, j) = xs[i][j] - xs[ib][j];
            dvals(row) = fs[i] - fs[ib];
            ++row;
        }
        const Eigen::VectorXd grad = diffs.colPivHouseholderQr().solve(dvals);
        const double gnorm = grad.norm();

        bool shrink = false;
        if (gnorm > 1e-14) {
            auto cand = xs[ib];
            for (int j = 0; j < n; ++j) cand[j] -= rho * grad(j) / gnorm;
            const double predicted = rho * gnorm;
            const double fv = eval(cand);
            const double actual = fs[ib] - fv;
            const int iw = worst_index();
            if (fv < fs[iw]) {
                xs[iw] = std::move(cand);
                fs[iw] = fv;
            }
            if (actual >= 0.1 * predicted)
                rho = std::min(rho * 1.25, cfg.initial_step);
            else
                shrink = true;
        } else {
            shrink = true;
        }

        if (shrink) {
            rho *= 0.5;
            if (rho < cfg.min_step) {
                result.converged = true;
                break;
            }
            // fresh geometry at the new scale
            const int ibs = best_index();
            const auto center = xs[ibs];
            const double fc = fs[ibs];
            if (!build_simplex(center, fc)) break;
        }

        if (++since_cycle >= n + 1) {
            const double now_best = *std::min_element(fs.begin(), fs.end());
            if (cycle_best - now_best < cfg.f_tol && rho <= polish_rho) {
                result.converged = true;
                break;
            }
            cycle_best = now_best;
            since_cycle = 0;
        }
    }
}

/// Nelder-Mead simplex with standard reflection/expansion/contraction/shrink.
inline void minimize_nelder_mead(const Objective& f, const std::vector<double>& x0,
                                 const OptimizerConfig& cfg, OptimizeResult& result) {
    const int n = static_cast<int>(x0.size());
    TracedObjective eval{f, result};

    std::vector<std::vector<double>> xs;
    std::vector<double> fs;
    xs.push_back(x0);
    fs.push_back(eval(x0));
    for (int j = 0; j < n && result.evaluations < cfg.max_iter; ++j) {
        auto x = x0;
        x[j] += cfg.initial_step;
        xs.push_back(x);
        fs.push_back(eval(x));
    }
    if (static_cast<int>(xs.size()) < n + 1) return;

    std::vector<int> order(n + 1);
    double cycle_best = *std::min_element(fs.begin(), fs.end());
    int since_cycle = 0;

    while (result.evaluations < cfg.max_iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const int ib = order[0], is = order[n - 1], iw = order[n];

        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i <= n; ++i) {
            if (i == iw) continue;
            for (int j = 0; j < n; ++j) centroid[j] += xs[i][j] / n;
        }

        const auto combine = [&](double coeff) {
            std::vector<double> x(n);
            for (int j = 0; j < n; ++j) x[j] = centroid[j] + coeff * (xs[iw][j] - centroid[j]);
            return x;
        };

        auto reflected = combine(-1.0);
        const double fr = eval(reflected);
        if (fr < fs[ib]) {
            auto expanded = combine(-2.0);
            const double fe = eval(expanded);
            if (fe < fr) {
                xs[iw] = std::move(expanded);
                fs[iw] = fe;
            } else {
                xs[iw] = std::move(reflected);
                fs[iw] = fr;
            }
        } else if (fr < fs[is]) {
            xs[iw] = std::move(reflected);
            fs[iw] = fr;
        } else {
            auto contracted = combine(fr < fs[iw] ? -0.5 : 0.5);
            const double fc = eval(contracted);
            if (fc < std::min(fr, fs[iw])) {
                xs[iw] = std::move(contracted);
                fs[iw] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == ib) continue;
                    for (int j = 0; j < n; ++j) xs[i][j] = xs[ib][j] + 0.5 * (xs[i][j] - xs[ib][j]);
                    fs[i] = eval(xs[i]);
                    if (result.evaluations >= cfg.max_iter) break;
                }
            }
        }

        double diameter = 0.0;
        for (int j = 0; j < n; ++j) {
            double lo = xs[0][j], hi = xs[0][j];
            for (int i = 1; i <= n; ++i) {
                lo = std::min(lo, xs[i][j]);
                hi = std::max(hi, xs[i][j]);
            }
            diameter = std::max(diameter, hi - lo);
        }
        if (++since_cycle >= n + 1) {
            const double now_best = *std::min_element(fs.begin(), fs.end());
            if (cycle_best - now_best < cfg.f_tol &&
                diameter <= std::max(cfg.min_step, 2e-3 * cfg.initial_step)) {
                result.converged = true;
                break;
            }
            cycle_best = now_best;
            since_cycle = 0;
        }
        if (diameter < cfg.min_step) {
            result.converged = true;
            break;
        }
    }
}

} // namespace detail

/// Minimizes `f` from `x0`. Evaluation counts are reported as iterations.
inline OptimizeResult minimize(const Objective& f, const std::vector<double>& x0,
                               const OptimizerConfig& cfg) {
    cfg.validate();
    if (x0.empty()) throw std::invalid_argument("minimize: empty start point");
    OptimizeResult result;
    result.value = std::numeric_limits<double>::infinity();
    if (cfg.method == OptimizerMethod::CobylaLike)
        detail::minimize_cobyla_like(f, x0, cfg, result);
    else
        detail::minimize_nelder_mead(f, x0, cfg, result);
    return result;
}

} // namespace qcavqe
