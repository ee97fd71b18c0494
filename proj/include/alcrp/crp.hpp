#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "alcrp/hypothesis.hpp"
#include "alcrp/io.hpp"
#include "alcrp/lp.hpp"
#include "alcrp/rng.hpp"

namespace alcrp {

/// Soft predictor output: per pool column, probabilities of predicting +1
/// (xi), -1 (zeta) and abstaining (gamma). phi is the mean abstention rate.
struct AbstentionProfile {
    std::vector<double> xi, zeta, gamma;
    double phi = 0.0;

    std::size_t size() const { return gamma.size(); }
};

namespace detail {

inline void check_crp_inputs(const HypothesisSet& set, double eta) {
    if (set.active().empty()) throw std::invalid_argument("empty hypothesis set");
    if (set.num_examples() == 0) throw std::invalid_argument("empty pool");
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("invalid budget");
}

// Column groups: pool columns with identical predictions under every active
// hypothesis are interchangeable in the LP, so one variable triple per group
// suffices. First-occurrence order keeps everything deterministic.
struct ColumnGroups {
    std::vector<std::size_t> group_of;    // column -> group id
    std::vector<std::size_t> count;       // group -> multiplicity
    std::vector<std::size_t> rep;         // group -> representative column
    std::vector<std::int8_t> unanimous;   // group -> +1/-1 if all rows agree, else 0
};

inline ColumnGroups group_columns(const HypothesisSet& set) {
    const std::size_t m = set.num_examples();
    const auto act = set.active();
    ColumnGroups g;
    g.group_of.resize(m);
    std::unordered_map<std::string, std::size_t> seen;
    std::string key(act.size(), '\0');
    for (std::size_t i = 0; i < m; ++i) {
        std::int8_t first = set.prediction(act.front(), i);
        bool same = true;
        for (std::size_t a = 0; a < act.size(); ++a) {
            const std::int8_t v = set.prediction(act[a], i);
            key[a] = static_cast<char>(v);
            same = same && (v == first);
        }
        auto [it, inserted] = seen.emplace(key, g.count.size());
        if (inserted) {
            g.count.push_back(1);
            g.rep.push_back(i);
            g.unanimous.push_back(same ? first : std::int8_t{0});
        } else {
            ++g.count[it->second];
        }
        g.group_of[i] = it->second;
    }
    return g;
}

}  // namespace detail

/// The predictor's linear program in its documented form: variables
/// [xi_0..xi_{m-1}, zeta_0.., gamma_0..], objective sum(gamma), one inequality
/// per dichotomy representative, m equality rows xi+zeta+gamma = 1.
inline LPProblem build_crp_lp(const HypothesisSet& set, double eta) {
    detail::check_crp_inputs(set, eta);
    const std::size_t m = set.num_examples();
    const auto idx = all_indices(m);
    const auto dichotomies = dedupe_by_dichotomy(set, idx);

    LPProblem p;
    const std::size_t n = 3 * m;
    p.objective.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) p.objective[2 * m + i] = 1.0;

    p.ineq_matrix.assign(dichotomies.size() * n, 0.0);
    p.ineq_rhs.assign(dichotomies.size(), eta * static_cast<double>(m));
    for (std::size_t r = 0; r < dichotomies.size(); ++r) {
        const std::size_t h = dichotomies[r].representative;
        for (std::size_t i = 0; i < m; ++i) {
            if (set.prediction(h, i) == 1)
                p.ineq_matrix[r * n + m + i] = 1.0;  // zeta on predicted +1
            else
                p.ineq_matrix[r * n + i] = 1.0;      // xi on predicted -1
        }
    }

    p.eq_matrix.assign(m * n, 0.0);
    p.eq_rhs.assign(m, 1.0);
    for (std::size_t i = 0; i < m; ++i) {
        p.eq_matrix[i * n + i] = 1.0;
        p.eq_matrix[i * n + m + i] = 1.0;
        p.eq_matrix[i * n + 2 * m + i] = 1.0;
    }
    return p;
}

/// Solves the predictor LP. Internally the gamma variables are eliminated by
/// substitution and identical pool columns share one variable pair; the
/// expanded solution is optimal for build_crp_lp's program.
inline AbstentionProfile solve_crp(const HypothesisSet& set, double eta, double tol = 1e-9,
                                   std::size_t max_iters = 200000) {
    detail::check_crp_inputs(set, eta);
    const std::size_t m = set.num_examples();
    const auto groups = detail::group_columns(set);
    const std::size_t ng = groups.count.size();

    // unanimously labeled groups take the common label outright
    std::vector<std::size_t> lp_groups;
    for (std::size_t g = 0; g < ng; ++g)
        if (groups.unanimous[g] == 0) lp_groups.push_back(g);

    std::vector<double> gxi(ng, 0.0), gzeta(ng, 0.0), ggamma(ng, 0.0);
    for (std::size_t g = 0; g < ng; ++g) {
        if (groups.unanimous[g] == 1)
            gxi[g] = 1.0;
        else if (groups.unanimous[g] == -1)
            gzeta[g] = 1.0;
    }

    if (!lp_groups.empty()) {
        const std::size_t k = lp_groups.size();
        std::vector<std::size_t> reps(k);
        for (std::size_t t = 0; t < k; ++t) reps[t] = groups.rep[lp_groups[t]];
        const auto dichotomies = dedupe_by_dichotomy(set, reps);

        // variables: [xi_g.., zeta_g..]; maximize covered mass
        LPProblem p;
        const std::size_t n = 2 * k;
        p.objective.assign(n, 0.0);
        for (std::size_t t = 0; t < k; ++t) {
            const double c = static_cast<double>(groups.count[lp_groups[t]]);
            p.objective[t] = -c;
            p.objective[k + t] = -c;
        }
        const std::size_t rows = dichotomies.size() + k;
        p.ineq_matrix.assign(rows * n, 0.0);
        p.ineq_rhs.assign(rows, 0.0);
        for (std::size_t r = 0; r < dichotomies.size(); ++r) {
            const std::size_t h = dichotomies[r].representative;
            for (std::size_t t = 0; t < k; ++t) {
                const double c = static_cast<double>(groups.count[lp_groups[t]]);
                if (set.prediction(h, reps[t]) == 1)
                    p.ineq_matrix[r * n + k + t] = c;
                else
                    p.ineq_matrix[r * n + t] = c;
            }
            p.ineq_rhs[r] = eta * static_cast<double>(m);
        }
        for (std::size_t t = 0; t < k; ++t) {  // xi + zeta <= 1 keeps gamma >= 0
            p.ineq_matrix[(dichotomies.size() + t) * n + t] = 1.0;
            p.ineq_matrix[(dichotomies.size() + t) * n + k + t] = 1.0;
            p.ineq_rhs[dichotomies.size() + t] = 1.0;
        }

        const LPSolution sol = solve_lp(p, tol, max_iters);
        if (sol.status != LPStatus::optimal)
            throw std::runtime_error(std::string("crp solve failed: ") + to_string(sol.status));

        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t g = lp_groups[t];
            double xi = sol.x[t], zeta = sol.x[k + t];
            if (xi < -1e-7 || zeta < -1e-7 || xi + zeta > 1.0 + 1e-7)
                throw std::runtime_error("crp solve: round-off beyond tolerance");
            xi = std::max(0.0, xi);
            zeta = std::max(0.0, zeta);
            double gamma = std::max(0.0, 1.0 - xi - zeta);
            const double sum = xi + zeta + gamma;
            gxi[g] = xi / sum;
            gzeta[g] = zeta / sum;
            ggamma[g] = gamma / sum;
        }
    }

    AbstentionProfile out;
    out.xi.resize(m);
    out.zeta.resize(m);
    out.gamma.resize(m);
    double mass = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t g = groups.group_of[i];
        out.xi[i] = gxi[g];
        out.zeta[i] = gzeta[g];
        out.gamma[i] = ggamma[g];
        mass += ggamma[g];
    }
    out.phi = mass / static_cast<double>(m);
    return out;
}

/// Baseline of the related work: abstain on the disagreement region, predict
/// the unanimous label elsewhere. Satisfies the error guarantee with eta = 0.
inline AbstentionProfile dis_abstain_predictor(const HypothesisSet& set) {
    if (set.active().empty()) throw std::invalid_argument("empty hypothesis set");
    const std::size_t m = set.num_examples();
    const auto idx = all_indices(m);
    const auto mask = disagreement_region_mask(set, idx);
    AbstentionProfile out;
    out.xi.assign(m, 0.0);
    out.zeta.assign(m, 0.0);
    out.gamma.assign(m, 0.0);
    const std::size_t h0 = set.active().front();
    double mass = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (mask[i]) {
            out.gamma[i] = 1.0;
            mass += 1.0;
        } else if (set.prediction(h0, i) == 1) {
            out.xi[i] = 1.0;
        } else {
            out.zeta[i] = 1.0;
        }
    }
    out.phi = mass / static_cast<double>(m);
    return out;
}

/// Max over active h of (1/m)[sum_{h=+1} zeta_i + sum_{h=-1} xi_i] - eta.
/// <= 0 (up to tolerance) means the profile meets the error guarantee.
inline double verify_error_guarantee(const AbstentionProfile& profile, const HypothesisSet& set,
                                     double eta) {
    const std::size_t m = set.num_examples();
    if (profile.size() != m || profile.xi.size() != m || profile.zeta.size() != m)
        throw std::invalid_argument("profile dimensions do not match pool");
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t h : set.active()) {
        double mass = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            mass += set.prediction(h, i) == 1 ? profile.zeta[i] : profile.xi[i];
        worst = std::max(worst, mass / static_cast<double>(m) - eta);
    }
    return worst;
}

/// m_count i.i.d. draws from the abstention distribution Gamma (weights
/// gamma_i / sum gamma). With repetition; deterministic given the stream.
inline std::vector<std::size_t> sample_queries(const AbstentionProfile& profile,
                                               std::size_t m_count, RngStream& rng) {
    std::vector<std::size_t> out;
    if (m_count == 0) return out;
    const auto cum = prefix_sums(profile.gamma);
    if (cum.empty() || cum.back() <= 0.0)
        throw std::runtime_error("degenerate abstention distribution");
    out.reserve(m_count);
    for (std::size_t t = 0; t < m_count; ++t)
        out.push_back(sample_from_cumulative(cum, rng.uniform01()));
    return out;
}

inline void write_profile_csv(std::ostream& out, const AbstentionProfile& profile) {
    out << "# alcrp-csv v1 profile\n";
    out << "index,xi,zeta,gamma\n";
    for (std::size_t i = 0; i < profile.size(); ++i)
        out << i << ',' << fmt(profile.xi[i]) << ',' << fmt(profile.zeta[i]) << ','
            << fmt(profile.gamma[i]) << '\n';
}

}  // namespace alcrp
