#include "condreg/smallsolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace condreg {

namespace {

constexpr double kPivotRelTol = 1e-9;

void check_finite(std::span<const std::vector<double>> rows,
                  std::span<const double> targets) {
    for (const auto& r : rows)
        for (double v : r)
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite row entry");
    for (double v : targets)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite target");
}

double dot(std::span<const double> a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) {
    double acc = 0.0;
    for (double v : a) acc += v * v;
    return std::sqrt(acc);
}

} // namespace

SolveStatus solve_extremal_inplace(double* aug, std::size_t q, double scale,
                                   double* sol) {
    const std::size_t w = q + 1; // row stride
    const double pivot_tol = kPivotRelTol * std::max(scale, 1.0);

    for (std::size_t col = 0; col < q; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < q; ++r)
            if (std::abs(aug[r * w + col]) > std::abs(aug[best * w + col])) best = r;
        if (std::abs(aug[best * w + col]) <= pivot_tol) return SolveStatus::singular;
        if (best != col)
            for (std::size_t c = 0; c < w; ++c)
                std::swap(aug[col * w + c], aug[best * w + c]);
        for (std::size_t r = col + 1; r < q; ++r) {
            double f = aug[r * w + col] / aug[col * w + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < w; ++c) aug[r * w + c] -= f * aug[col * w + c];
        }
    }
    for (std::size_t r = q; r-- > 0;) {
        double acc = aug[r * w + q];
        for (std::size_t c = r + 1; c < q; ++c) acc -= aug[r * w + c] * sol[c];
        sol[r] = acc / aug[r * w + r];
    }

    double eps_prime = sol[q - 1];
    if (!std::isfinite(eps_prime)) return SolveStatus::singular;
    if (eps_prime < 0.0) return SolveStatus::negative_eps_prime;
    return SolveStatus::ok;
}

ExtremalSolveResult solve_extremal_system(std::span<const std::vector<double>> projected_rows,
                                          std::span<const double> targets,
                                          std::span<const int> signs) {
    const std::size_t s = projected_rows.empty() ? 0 : projected_rows[0].size();
    const std::size_t q = s + 1; // unknowns: a_1..a_s, eps'
    if (projected_rows.size() != q || targets.size() != q || signs.size() != q)
        throw std::invalid_argument("extremal system needs s+1 rows, targets, signs");
    for (const auto& r : projected_rows)
        if (r.size() != s) throw std::invalid_argument("ragged projected row");
    for (int sg : signs)
        if (sg != 1 && sg != -1) throw std::invalid_argument("signs must be +-1");
    check_finite(projected_rows, targets);

    // Augmented matrix [rows | -sigma | z].
    std::vector<double> aug(q * (q + 1));
    double scale = 0.0;
    for (std::size_t r = 0; r < q; ++r) {
        for (std::size_t c = 0; c < s; ++c) {
            aug[r * (q + 1) + c] = projected_rows[r][c];
            scale = std::max(scale, std::abs(projected_rows[r][c]));
        }
        aug[r * (q + 1) + s] = -static_cast<double>(signs[r]);
        aug[r * (q + 1) + q] = targets[r];
    }

    std::vector<double> sol(q);
    SolveStatus status = solve_extremal_inplace(aug.data(), q, scale, sol.data());
    if (status != SolveStatus::ok) return {status, {}};

    ExtremalFit fit;
    fit.a.assign(sol.begin(), sol.begin() + s);
    fit.eps_prime = sol[s];
    return {SolveStatus::ok, std::move(fit)};
}

double least_squares_objective(std::span<const std::vector<double>> rows,
                               std::span<const double> targets,
                               std::span<const double> a) {
    double acc = 0.0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        double r = dot(a, rows[j]) - targets[j];
        acc += r * r;
    }
    return acc;
}

std::vector<double> least_squares_gradient(std::span<const std::vector<double>> rows,
                                           std::span<const double> targets,
                                           std::span<const double> a) {
    std::vector<double> g(a.size(), 0.0);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        double r = 2.0 * (dot(a, rows[j]) - targets[j]);
        for (std::size_t i = 0; i < a.size(); ++i) g[i] += r * rows[j][i];
    }
    return g;
}

QuadraticLsProblem build_ls_problem(std::span<const std::vector<double>> rows,
                                    std::span<const double> targets) {
    if (rows.empty()) throw std::invalid_argument("need at least one row");
    if (targets.size() != rows.size())
        throw std::invalid_argument("rows/targets length mismatch");
    check_finite(rows, targets);

    const std::size_t d = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != d) throw std::invalid_argument("ragged rows");

    QuadraticLsProblem prob;
    prob.d = d;
    prob.gram.assign(d * d, 0.0);
    prob.lin.assign(d, 0.0);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const auto& y = rows[j];
        prob.const_term += targets[j] * targets[j];
        for (std::size_t p = 0; p < d; ++p) {
            prob.lin[p] += targets[j] * y[p];
            for (std::size_t q = p; q < d; ++q) prob.gram[p * d + q] += y[p] * y[q];
        }
    }
    for (std::size_t p = 0; p < d; ++p)
        for (std::size_t q = 0; q < p; ++q) prob.gram[p * d + q] = prob.gram[q * d + p];
    return prob;
}

std::vector<double> constrained_least_squares(std::span<const std::vector<double>> rows,
                                              std::span<const double> targets,
                                              double B, const PgdConfig& cfg) {
    return constrained_least_squares(build_ls_problem(rows, targets), B, cfg);
}

std::vector<double> constrained_least_squares(const QuadraticLsProblem& problem,
                                              double B, const PgdConfig& cfg) {
    if (!(B > 0.0)) throw std::invalid_argument("norm bound must be > 0");
    if (cfg.max_iters < 1 || !(cfg.rel_tol > 0.0))
        throw std::invalid_argument("bad PGD config");

    const std::size_t d = problem.d;
    const auto& gram = problem.gram;
    const auto& lin = problem.lin;
    const double const_term = problem.const_term;

    auto gram_mul = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t p = 0; p < d; ++p) {
            double acc = 0.0;
            for (std::size_t q = 0; q < d; ++q) acc += gram[p * d + q] * v[q];
            out[p] = acc;
        }
    };

    // Largest Gram eigenvalue by power iteration (50 rounds, fixed start).
    double lambda = 0.0;
    {
        std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d))), gv(d);
        for (int it = 0; it < 50; ++it) {
            gram_mul(v, gv);
            double nrm = norm2(gv);
            if (nrm == 0.0) break;
            lambda = nrm;
            for (std::size_t i = 0; i < d; ++i) v[i] = gv[i] / nrm;
        }
    }
    const double L = 2.0 * lambda;

    auto project = [&](std::vector<double>& v) {
        double nrm = norm2(v);
        if (nrm > B) {
            double f = B / nrm;
            for (double& x : v) x *= f;
        }
    };
    std::vector<double> scratch(d);
    auto objective_of = [&](const std::vector<double>& v) {
        gram_mul(v, scratch);
        double acc = const_term;
        for (std::size_t i = 0; i < d; ++i) acc += v[i] * (scratch[i] - 2.0 * lin[i]);
        return acc;
    };

    std::vector<double> a(d, 0.0), ga(d), grad(d), trial(d);
    double f_prev = objective_of(a);
    double step = L > 0.0 ? 1.0 / L : 1.0;

    for (std::size_t it = 0; it < cfg.max_iters; ++it) {
        gram_mul(a, ga);
        for (std::size_t i = 0; i < d; ++i) grad[i] = 2.0 * (ga[i] - lin[i]);

        double t = cfg.step_rule == PgdConfig::StepRule::backtracking ? step * 8.0 : step;
        double f_new;
        while (true) {
            for (std::size_t i = 0; i < d; ++i) trial[i] = a[i] - t * grad[i];
            project(trial);
            f_new = objective_of(trial);
            // The power-iteration estimate can sit a hair under the true
            // spectral norm; halve until descent holds.
            if (f_new <= f_prev || t < 1e-18) break;
            t *= 0.5;
        }
        if (f_new > f_prev) break; // no usable descent step
        if (cfg.step_rule == PgdConfig::StepRule::fixed_inverse_lipschitz) step = t;
        a.swap(trial);
        if (cfg.observer) cfg.observer(std::span<const double>(a), f_new);
        double drop = f_prev - f_new;
        f_prev = f_new;
        if (drop <= cfg.rel_tol * std::max(f_prev, 1e-300)) break;
    }
    return a;
}

} // namespace condreg
