#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace condreg {

// Solution of the (s+1)x(s+1) extremal system: coefficients on the projected
// dimensions plus the achieved sup fit eps_prime.
struct ExtremalFit {
    std::vector<double> a;
    double eps_prime = 0.0;
};

enum class SolveStatus {
    ok,
    singular,           // pivot below tolerance; skip this candidate basis
    negative_eps_prime, // mirrored sign pattern covers this case; skip
};

struct ExtremalSolveResult {
    SolveStatus status = SolveStatus::singular;
    ExtremalFit fit;
};

// Solves <a, row_l> - z_l = sigma_l * eps' for l = 1..s+1 in the unknowns
// (a_1..a_s, eps'). Gaussian elimination with partial pivoting; pivots below
// 1e-9 relative to the largest row magnitude report `singular`.
ExtremalSolveResult solve_extremal_system(std::span<const std::vector<double>> projected_rows,
                                          std::span<const double> targets,
                                          std::span<const int> signs);

// Allocation-free core of the above for hot loops: `aug` is a row-major
// q x (q+1) augmented matrix, destroyed in place; `sol` receives q unknowns
// with eps' last. Reports `negative_eps_prime` exactly like the wrapper.
SolveStatus solve_extremal_inplace(double* aug, std::size_t q, double scale,
                                   double* sol);

struct PgdConfig {
    enum class StepRule { fixed_inverse_lipschitz, backtracking };

    std::size_t max_iters = 10000;
    double rel_tol = 1e-8;
    StepRule step_rule = StepRule::fixed_inverse_lipschitz;

    // Test hook: observes (iterate, objective) after every projection step.
    std::function<void(std::span<const double>, double)> observer;
};

// Projected gradient descent for min sum_j (<a,y_j> - z_j)^2 over ||a||_2 <= B.
// Step 1/L with L = 2 * power-iteration estimate of the Gram spectral norm;
// projection is radial scaling onto the ball. Objective never increases.
std::vector<double> constrained_least_squares(std::span<const std::vector<double>> rows,
                                              std::span<const double> targets,
                                              double B, const PgdConfig& cfg = {});

// The same objective as a prebuilt quadratic form
// f(a) = a'Ga - 2 lin'a + const_term, for callers whose row sets are too
// large to keep materialized.
struct QuadraticLsProblem {
    std::size_t d = 0;
    std::vector<double> gram;  // d*d row-major, symmetric
    std::vector<double> lin;   // d
    double const_term = 0.0;   // sum of squared targets
};

QuadraticLsProblem build_ls_problem(std::span<const std::vector<double>> rows,
                                    std::span<const double> targets);
std::vector<double> constrained_least_squares(const QuadraticLsProblem& problem,
                                              double B, const PgdConfig& cfg = {});

// Objective and gradient of the (unnormalized) squared error, exposed so the
// finite-difference checks can probe the same code the solver runs.
double least_squares_objective(std::span<const std::vector<double>> rows,
                               std::span<const double> targets,
                               std::span<const double> a);
std::vector<double> least_squares_gradient(std::span<const std::vector<double>> rows,
                                           std::span<const double> targets,
                                           std::span<const double> a);

} // namespace condreg
