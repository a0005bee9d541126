#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace corrsched {

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string to_string(LpStatus status);

/// minimize cost.x  s.t.  ub_rows x <= ub_rhs,  eq_rows x = eq_rhs,  x >= 0.
struct LpProblem {
    std::vector<double> cost;
    std::vector<std::vector<double>> ub_rows;
    std::vector<double> ub_rhs;
    std::vector<std::vector<double>> eq_rows;
    std::vector<double> eq_rhs;

    std::size_t num_vars() const noexcept { return cost.size(); }
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> x;
    double objective = 0.0;
    /// Row multipliers y with reduced costs cost - A^T y >= 0 at optimality;
    /// inequality multipliers are <= 0.
    std::vector<double> ub_duals;
    std::vector<double> eq_duals;
    std::size_t pivots = 0;
};

struct LpOptions {
    double pivot_tol = 1e-10;
    double feasibility_tol = 1e-9;
    std::size_t max_pivots = 5'000'000;
};

/// Dense two-phase simplex with Bland's rule. Optimal solutions are basic,
/// so at most (#ub rows + #eq rows) entries of x are nonzero.
LpSolution solve_lp(const LpProblem& lp, const LpOptions& options = {});

struct LpResiduals {
    double primal = 0.0;         ///< worst row or bound violation
    double dual = 0.0;           ///< worst negative reduced cost or wrong-signed multiplier
    double complementarity = 0.0;
};

/// KKT residuals of an Optimal solution, recomputed from the original data.
LpResiduals optimality_residuals(const LpProblem& lp, const LpSolution& sol);

}  // namespace corrsched
