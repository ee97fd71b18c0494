#pragma once

// Independent brute-force oracle for small linear programs: enumerates basic
// solutions (all equality rows tight plus every choice of n - me additional
// tight constraints), keeps the feasible ones, and returns the best objective.
// Exponential on purpose; only for desk-size instances in tests.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "alcrp/lp.hpp"

namespace testing_oracle {

struct VertexOptimum {
    double objective = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> x;
    bool found = false;
};

namespace detail {

// Solve M x = rhs (n x n) by Gaussian elimination; nullopt when singular.
inline std::optional<std::vector<double>> solve_square(std::vector<double> M,
                                                       std::vector<double> rhs, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(M[r * n + col]) > std::fabs(M[piv * n + col])) piv = r;
        if (std::fabs(M[piv * n + col]) < 1e-10) return std::nullopt;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(M[piv * n + j], M[col * n + j]);
            std::swap(rhs[piv], rhs[col]);
        }
        const double inv = 1.0 / M[col * n + col];
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = M[r * n + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) M[r * n + j] -= f * M[col * n + j];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / M[i * n + i];
    return x;
}

}  // namespace detail

inline VertexOptimum enumerate_vertices(const alcrp::LPProblem& p, double feas_tol = 1e-7) {
    const std::size_t n = p.num_vars();
    const std::size_t mi = p.num_ineq();
    const std::size_t me = p.num_eq();
    if (me > n) return {};

    // candidate tight rows: inequality rows then the n nonnegativity rows
    const std::size_t cand = mi + n;
    const std::size_t need = n - me;
    VertexOptimum best;

    std::vector<std::size_t> pick(need);
    auto row_into = [&](std::size_t c, std::vector<double>& M, std::vector<double>& rhs,
                        std::size_t at) {
        if (c < mi) {
            for (std::size_t j = 0; j < n; ++j) M[at * n + j] = p.ineq_matrix[c * n + j];
            rhs[at] = p.ineq_rhs[c];
        } else {
            for (std::size_t j = 0; j < n; ++j) M[at * n + j] = 0.0;
            M[at * n + (c - mi)] = 1.0;
            rhs[at] = 0.0;
        }
    };

    auto feasible = [&](const std::vector<double>& x) {
        for (double v : x)
            if (v < -feas_tol) return false;
        for (std::size_t r = 0; r < mi; ++r) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < n; ++j) lhs += p.ineq_matrix[r * n + j] * x[j];
            if (lhs > p.ineq_rhs[r] + feas_tol) return false;
        }
        for (std::size_t r = 0; r < me; ++r) {
            double lhs = 0.0;
            for (std::size_t j = 0; j < n; ++j) lhs += p.eq_matrix[r * n + j] * x[j];
            if (std::fabs(lhs - p.eq_rhs[r]) > feas_tol) return false;
        }
        return true;
    };

    std::vector<double> M(n * n), rhs(n);
    auto consider = [&]() {
        for (std::size_t r = 0; r < me; ++r) {
            for (std::size_t j = 0; j < n; ++j) M[r * n + j] = p.eq_matrix[r * n + j];
            rhs[r] = p.eq_rhs[r];
        }
        for (std::size_t t = 0; t < need; ++t) row_into(pick[t], M, rhs, me + t);
        const auto x = detail::solve_square(M, rhs, n);
        if (!x || !feasible(*x)) return;
        double obj = 0.0;
        for (std::size_t j = 0; j < n; ++j) obj += p.objective[j] * (*x)[j];
        if (!best.found || obj < best.objective) {
            best.found = true;
            best.objective = obj;
            best.x = *x;
        }
    };

    if (need == 0) {
        consider();
        return best;
    }
    if (cand < need) return best;
    // iterate combinations of `need` rows out of `cand`
    for (std::size_t t = 0; t < need; ++t) pick[t] = t;
    while (true) {
        consider();
        bool advanced = false;
        std::size_t i = need;
        while (i-- > 0) {
            if (pick[i] < cand - need + i) {
                ++pick[i];
                for (std::size_t j = i + 1; j < need; ++j) pick[j] = pick[j - 1] + 1;
                advanced = true;
                break;
            }
        }
        if (!advanced) return best;
    }
}

}  // namespace testing_oracle
