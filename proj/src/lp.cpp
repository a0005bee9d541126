#include "corrsched/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace corrsched {

std::string to_string(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

class Tableau {
public:
    Tableau(const LpProblem& lp, const LpOptions& opt) : opt_(opt) {
        n_ = lp.num_vars();
        n_ub_ = lp.ub_rows.size();
        m_ = n_ub_ + lp.eq_rows.size();
        sign_.assign(m_, 1.0);
        identity_col_.assign(m_, 0);

        std::size_t n_art = 0;
        for (std::size_t i = 0; i < n_ub_; ++i) n_art += lp.ub_rhs[i] < 0.0 ? 1 : 0;
        n_art += lp.eq_rows.size();
        art_begin_ = n_ + n_ub_;
        cols_ = art_begin_ + n_art;
        rhs_col_ = cols_;
        t_.assign(m_, std::vector<double>(cols_ + 1, 0.0));
        basis_.assign(m_, 0);

        std::size_t next_art = art_begin_;
        for (std::size_t i = 0; i < m_; ++i) {
            const bool is_ub = i < n_ub_;
            const auto& row = is_ub ? lp.ub_rows[i] : lp.eq_rows[i - n_ub_];
            const double rhs = is_ub ? lp.ub_rhs[i] : lp.eq_rhs[i - n_ub_];
            if (row.size() != n_) throw std::invalid_argument("solve_lp: row length does not match cost");
            const double s = rhs < 0.0 ? -1.0 : 1.0;
            sign_[i] = s;
            for (std::size_t j = 0; j < n_; ++j) t_[i][j] = s * row[j];
            t_[i][rhs_col_] = s * rhs;
            if (is_ub) t_[i][n_ + i] = s;
            if (is_ub && s > 0.0) {
                basis_[i] = n_ + i;
            } else {
                t_[i][next_art] = 1.0;
                basis_[i] = next_art++;
            }
            identity_col_[i] = basis_[i];
        }
        cost_.assign(cols_, 0.0);
    }

    // Returns false when unbounded.
    bool optimize(const std::vector<double>& cost, bool allow_artificial) {
        cost_ = cost;
        d_.assign(cols_ + 1, 0.0);
        for (std::size_t j = 0; j <= cols_; ++j) {
            double z = 0.0;
            for (std::size_t i = 0; i < m_; ++i) z += cost_[basis_[i]] * t_[i][j];
            d_[j] = (j < cols_ ? cost_[j] : 0.0) - z;
        }
        const std::size_t limit = allow_artificial ? cols_ : art_begin_;
        while (true) {
            std::size_t enter = cols_;
            for (std::size_t j = 0; j < limit; ++j) {
                if (d_[j] < -opt_.pivot_tol) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols_) return true;

            std::size_t leave = m_;
            double best = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = t_[i][enter];
                if (a <= opt_.pivot_tol) continue;
                const double ratio = t_[i][rhs_col_] / a;
                if (leave == m_ || ratio < best - 1e-12 ||
                    (ratio <= best + 1e-12 && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        if (++pivots_ > opt_.max_pivots) throw std::runtime_error("solve_lp: pivot limit exceeded");
        auto& pr = t_[r];
        const double inv = 1.0 / pr[c];
        for (double& v : pr) v *= inv;
        pr[c] = 1.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = t_[i][c];
            if (f == 0.0) continue;
            auto& row = t_[i];
            for (std::size_t j = 0; j <= cols_; ++j) row[j] -= f * pr[j];
            row[c] = 0.0;
        }
        const double f = d_[c];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= cols_; ++j) d_[j] -= f * pr[j];
            d_[c] = 0.0;
        }
        basis_[r] = c;
    }

    // Pivot basic artificials at zero level out of the basis where possible.
    void expel_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < art_begin_) continue;
            for (std::size_t j = 0; j < art_begin_; ++j) {
                if (std::abs(t_[i][j]) > opt_.pivot_tol) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    double objective_value() const {
        double z = 0.0;
        for (std::size_t i = 0; i < m_; ++i) z += cost_[basis_[i]] * t_[i][rhs_col_];
        return z;
    }

    std::vector<double> structural_solution() const {
        std::vector<double> x(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) x[basis_[i]] = std::max(0.0, t_[i][rhs_col_]);
        }
        return x;
    }

    std::vector<double> row_duals() const {
        std::vector<double> y(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            double v = 0.0;
            for (std::size_t r = 0; r < m_; ++r) v += cost_[basis_[r]] * t_[r][identity_col_[i]];
            y[i] = sign_[i] * v;
        }
        return y;
    }

    std::size_t cols() const { return cols_; }
    std::size_t art_begin() const { return art_begin_; }
    std::size_t pivots() const { return pivots_; }

private:
    LpOptions opt_;
    std::size_t n_ = 0, n_ub_ = 0, m_ = 0, art_begin_ = 0, cols_ = 0, rhs_col_ = 0;
    std::vector<std::vector<double>> t_;
    std::vector<double> d_;
    std::vector<double> cost_;
    std::vector<double> sign_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> identity_col_;
    std::size_t pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProblem& lp, const LpOptions& options) {
    if (lp.ub_rows.size() != lp.ub_rhs.size() || lp.eq_rows.size() != lp.eq_rhs.size()) {
        throw std::invalid_argument("solve_lp: row and rhs counts differ");
    }
    for (double c : lp.cost) {
        if (!std::isfinite(c)) throw std::invalid_argument("solve_lp: non-finite cost");
    }

    Tableau tab(lp, options);
    LpSolution sol;

    std::vector<double> phase1(tab.cols(), 0.0);
    for (std::size_t j = tab.art_begin(); j < tab.cols(); ++j) phase1[j] = 1.0;
    tab.optimize(phase1, true);
    if (tab.objective_value() > options.feasibility_tol) {
        sol.status = LpStatus::Infeasible;
        sol.pivots = tab.pivots();
        return sol;
    }
    tab.expel_artificials();

    std::vector<double> phase2(tab.cols(), 0.0);
    std::copy(lp.cost.begin(), lp.cost.end(), phase2.begin());
    const bool bounded = tab.optimize(phase2, false);
    sol.pivots = tab.pivots();
    if (!bounded) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.x = tab.structural_solution();
    sol.objective = 0.0;
    for (std::size_t j = 0; j < lp.num_vars(); ++j) sol.objective += lp.cost[j] * sol.x[j];
    const auto y = tab.row_duals();
    sol.ub_duals.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(lp.ub_rows.size()));
    sol.eq_duals.assign(y.begin() + static_cast<std::ptrdiff_t>(lp.ub_rows.size()), y.end());
    return sol;
}

LpResiduals optimality_residuals(const LpProblem& lp, const LpSolution& sol) {
    LpResiduals r;
    const auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
        return s;
    };
    std::vector<double> reduced = lp.cost;
    for (std::size_t i = 0; i < lp.ub_rows.size(); ++i) {
        const double slack = lp.ub_rhs[i] - dot(lp.ub_rows[i], sol.x);
        r.primal = std::max(r.primal, -slack);
        r.dual = std::max(r.dual, sol.ub_duals[i]);
        r.complementarity = std::max(r.complementarity, std::abs(sol.ub_duals[i] * slack));
        for (std::size_t j = 0; j < reduced.size(); ++j) reduced[j] -= sol.ub_duals[i] * lp.ub_rows[i][j];
    }
    for (std::size_t i = 0; i < lp.eq_rows.size(); ++i) {
        r.primal = std::max(r.primal, std::abs(dot(lp.eq_rows[i], sol.x) - lp.eq_rhs[i]));
        for (std::size_t j = 0; j < reduced.size(); ++j) reduced[j] -= sol.eq_duals[i] * lp.eq_rows[i][j];
    }
    for (std::size_t j = 0; j < reduced.size(); ++j) {
        r.primal = std::max(r.primal, -sol.x[j]);
        r.dual = std::max(r.dual, -reduced[j]);
        r.complementarity = std::max(r.complementarity, std::abs(sol.x[j] * reduced[j]));
    }
    return r;
}

}  // namespace corrsched
