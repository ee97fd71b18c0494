#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace alcrp {

/// Dense linear program:  min c'x  s.t.  A x <= b,  E x = f,  x >= 0.
struct LPProblem {
    std::vector<double> objective;    // c, length n
    std::vector<double> ineq_matrix;  // A, ineq_rows * n row-major
    std::vector<double> ineq_rhs;     // b
    std::vector<double> eq_matrix;    // E, eq_rows * n row-major
    std::vector<double> eq_rhs;       // f

    std::size_t num_vars() const { return objective.size(); }
    std::size_t num_ineq() const { return ineq_rhs.size(); }
    std::size_t num_eq() const { return eq_rhs.size(); }
};

enum class LPStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(LPStatus s) {
    switch (s) {
        case LPStatus::optimal: return "optimal";
        case LPStatus::infeasible: return "infeasible";
        case LPStatus::unbounded: return "unbounded";
        case LPStatus::iteration_limit: return "iteration-limit";
    }
    return "?";
}

struct LPSolution {
    LPStatus status = LPStatus::iteration_limit;
    std::vector<double> x;
    double objective = std::numeric_limits<double>::quiet_NaN();
    std::size_t iterations = 0;
};

namespace detail {

inline void validate_lp(const LPProblem& p) {
    const std::size_t n = p.num_vars();
    if (n == 0) throw std::invalid_argument("malformed program: no variables");
    if (p.ineq_matrix.size() != p.num_ineq() * n || p.eq_matrix.size() != p.num_eq() * n)
        throw std::invalid_argument("malformed program: matrix dimensions inconsistent");
    auto finite = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    if (!finite(p.objective) || !finite(p.ineq_matrix) || !finite(p.ineq_rhs) ||
        !finite(p.eq_matrix) || !finite(p.eq_rhs))
        throw std::invalid_argument("malformed program: nonfinite entry");
}

/// Dense two-phase tableau simplex. Pricing is most-negative reduced cost with
/// lowest-index tie-breaking; after a run of degenerate pivots it switches to
/// Bland's rule, which guarantees termination. Fully deterministic.
class SimplexTableau {
public:
    SimplexTableau(const LPProblem& p, double tol) : tol_(tol), n_(p.num_vars()) {
        const std::size_t mi = p.num_ineq(), me = p.num_eq();
        rows_ = mi + me;
        // columns: structural | slack (one per ineq) | artificial (assigned below) | rhs
        n_slack_ = mi;
        // artificials: ineq rows with b < 0 (after slack the slack coeff is -1) and all eq rows
        std::vector<char> needs_art(rows_, 0);
        for (std::size_t r = 0; r < mi; ++r)
            if (p.ineq_rhs[r] < 0) needs_art[r] = 1;
        for (std::size_t r = mi; r < rows_; ++r) needs_art[r] = 1;
        n_art_ = 0;
        for (char c : needs_art) n_art_ += c;

        cols_ = n_ + n_slack_ + n_art_ + 1;
        tab_.assign(rows_ * cols_, 0.0);
        basis_.assign(rows_, 0);

        std::size_t art = 0;
        for (std::size_t r = 0; r < rows_; ++r) {
            const bool is_ineq = r < mi;
            const double* src = is_ineq ? &p.ineq_matrix[r * n_] : &p.eq_matrix[(r - mi) * n_];
            double rhs = is_ineq ? p.ineq_rhs[r] : p.eq_rhs[r - mi];
            double s = 1.0;
            if (rhs < 0) {  // normalize rhs >= 0
                s = -1.0;
                rhs = -rhs;
            }
            double* row = &tab_[r * cols_];
            for (std::size_t j = 0; j < n_; ++j) row[j] = s * src[j];
            if (is_ineq) row[n_ + r] = s;  // slack (coefficient -1 when row was flipped)
            row[cols_ - 1] = rhs;
            if (needs_art[r]) {
                const std::size_t aj = n_ + n_slack_ + art++;
                row[aj] = 1.0;
                basis_[r] = aj;
            } else {
                basis_[r] = n_ + r;  // slack is basic
            }
        }
    }

    std::size_t art_begin() const { return n_ + n_slack_; }
    std::size_t num_art() const { return n_art_; }

    // Minimizes costs (a length cols_-1 vector) from the current basis.
    // Returns optimal or unbounded / iteration_limit.
    LPStatus run(const std::vector<double>& costs, std::size_t max_iters, std::size_t& iters,
                 std::size_t col_limit) {
        std::vector<double> reduced(cols_ - 1);
        std::size_t degenerate_streak = 0;
        bool bland = false;
        while (iters < max_iters) {
            compute_reduced(costs, reduced);
            const std::size_t enter = pick_entering(reduced, bland, col_limit);
            if (enter == npos) return LPStatus::optimal;
            const std::size_t leave = pick_leaving(enter);
            if (leave == npos) return LPStatus::unbounded;
            const double step = tab_[leave * cols_ + cols_ - 1] / tab_[leave * cols_ + enter];
            if (step < tol_) {
                if (++degenerate_streak > rows_ + 16) bland = true;
            } else {
                degenerate_streak = 0;
                bland = false;
            }
            pivot(leave, enter);
            ++iters;
        }
        return LPStatus::iteration_limit;
    }

    // Pivots zero-valued basic artificials out; drops nothing (redundant rows
    // keep their artificial basic at value 0, harmless in phase 2 with cost 0).
    void expel_artificials() {
        for (std::size_t r = 0; r < rows_; ++r) {
            if (basis_[r] < art_begin()) continue;
            for (std::size_t j = 0; j < art_begin(); ++j) {
                if (std::fabs(tab_[r * cols_ + j]) > tol_ * 16) {
                    pivot(r, j);
                    break;
                }
            }
        }
    }

    double basic_value(std::size_t r) const { return tab_[r * cols_ + cols_ - 1]; }
    double cell(std::size_t r, std::size_t j) const { return tab_[r * cols_ + j]; }
    std::size_t basis(std::size_t r) const { return basis_[r]; }
    std::size_t rows() const { return rows_; }

    std::vector<double> extract(std::size_t n) const {
        std::vector<double> x(n, 0.0);
        for (std::size_t r = 0; r < rows_; ++r)
            if (basis_[r] < n) x[basis_[r]] = basic_value(r);
        return x;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    void compute_reduced(const std::vector<double>& costs, std::vector<double>& reduced) const {
        for (std::size_t j = 0; j + 1 < cols_; ++j) reduced[j] = costs[j];
        for (std::size_t r = 0; r < rows_; ++r) {
            const double cb = costs[basis_[r]];
            if (cb == 0.0) continue;
            const double* row = &tab_[r * cols_];
            for (std::size_t j = 0; j + 1 < cols_; ++j) reduced[j] -= cb * row[j];
        }
        for (std::size_t r = 0; r < rows_; ++r) reduced[basis_[r]] = 0.0;
    }

    std::size_t pick_entering(const std::vector<double>& reduced, bool bland,
                              std::size_t col_limit) const {
        if (bland) {
            for (std::size_t j = 0; j < col_limit; ++j)
                if (reduced[j] < -tol_) return j;
            return npos;
        }
        std::size_t best = npos;
        double best_val = -tol_;
        for (std::size_t j = 0; j < col_limit; ++j)
            if (reduced[j] < best_val) {
                best_val = reduced[j];
                best = j;
            }
        return best;
    }

    std::size_t pick_leaving(std::size_t enter) const {
        std::size_t best = npos;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rows_; ++r) {
            const double a = tab_[r * cols_ + enter];
            if (a <= tol_) continue;
            const double ratio = basic_value(r) / a;
            // min ratio; ties broken by lowest basis variable index (Bland-compatible)
            if (best == npos || ratio < best_ratio - 1e-12) {
                best_ratio = ratio;
                best = r;
            } else if (ratio <= best_ratio + 1e-12 && basis_[r] < basis_[best]) {
                best_ratio = std::min(best_ratio, ratio);
                best = r;
            }
        }
        return best;
    }

    void pivot(std::size_t leave, std::size_t enter) {
        double* prow = &tab_[leave * cols_];
        const double inv = 1.0 / prow[enter];
        for (std::size_t j = 0; j < cols_; ++j) prow[j] *= inv;
        prow[enter] = 1.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == leave) continue;
            double* row = &tab_[r * cols_];
            const double factor = row[enter];
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j < cols_; ++j) row[j] -= factor * prow[j];
            row[enter] = 0.0;
        }
        basis_[leave] = enter;
    }

    double tol_;
    std::size_t n_ = 0, rows_ = 0, cols_ = 0, n_slack_ = 0, n_art_ = 0;
    std::vector<double> tab_;
    std::vector<std::size_t> basis_;
};

}  // namespace detail

inline LPSolution solve_lp(const LPProblem& p, double tol = 1e-9, std::size_t max_iters = 200000) {
    detail::validate_lp(p);
    const std::size_t n = p.num_vars();
    detail::SimplexTableau tab(p, tol);
    LPSolution sol;

    const std::size_t total_cols = tab.art_begin() + tab.num_art();
    if (tab.num_art() > 0) {
        std::vector<double> phase1(total_cols, 0.0);
        for (std::size_t j = tab.art_begin(); j < total_cols; ++j) phase1[j] = 1.0;
        const LPStatus st = tab.run(phase1, max_iters, sol.iterations, total_cols);
        if (st == LPStatus::iteration_limit) {
            sol.status = st;
            return sol;
        }
        double art_sum = 0.0;
        for (std::size_t r = 0; r < tab.rows(); ++r)
            if (tab.basis(r) >= tab.art_begin()) art_sum += tab.basic_value(r);
        if (art_sum > tol * 1e3) {
            sol.status = LPStatus::infeasible;
            return sol;
        }
        tab.expel_artificials();
    }

    std::vector<double> phase2(total_cols, 0.0);
    for (std::size_t j = 0; j < n; ++j) phase2[j] = p.objective[j];
    // phase 2 may not re-enter artificial columns
    sol.status = tab.run(phase2, max_iters, sol.iterations, tab.art_begin());
    if (sol.status != LPStatus::optimal) return sol;

    sol.x = tab.extract(n);
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += p.objective[j] * sol.x[j];
    sol.objective = obj;
    return sol;
}

/// Plain-text dump of the initial simplex tableau (structural, slack and
/// artificial columns plus the rhs), for debugging small instances.
inline std::string dump_tableau(const LPProblem& p, double tol = 1e-9) {
    detail::validate_lp(p);
    detail::SimplexTableau tab(p, tol);
    std::ostringstream out;
    const std::size_t cols = p.num_vars() + p.num_ineq() + tab.num_art() + 1;
    for (std::size_t r = 0; r < tab.rows(); ++r) {
        out << "b" << tab.basis(r) << ":";
        for (std::size_t j = 0; j + 1 < cols; ++j) out << ' ' << tab.cell(r, j);
        out << " | " << tab.basic_value(r) << '\n';
    }
    return out.str();
}

/// Plain-text dump of a program, for debugging small instances.
inline std::string dump_lp(const LPProblem& p) {
    std::ostringstream out;
    out << "min:";
    for (double c : p.objective) out << ' ' << c;
    out << '\n';
    for (std::size_t r = 0; r < p.num_ineq(); ++r) {
        out << "le:";
        for (std::size_t j = 0; j < p.num_vars(); ++j) out << ' ' << p.ineq_matrix[r * p.num_vars() + j];
        out << " | " << p.ineq_rhs[r] << '\n';
    }
    for (std::size_t r = 0; r < p.num_eq(); ++r) {
        out << "eq:";
        for (std::size_t j = 0; j < p.num_vars(); ++j) out << ' ' << p.eq_matrix[r * p.num_vars() + j];
        out << " | " << p.eq_rhs[r] << '\n';
    }
    return out.str();
}

}  // namespace alcrp
