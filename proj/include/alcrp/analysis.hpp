#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alcrp/crp.hpp"
#include "alcrp/hypothesis.hpp"
#include "alcrp/hypothesis_classes.hpp"
#include "alcrp/io.hpp"
#include "alcrp/learner.hpp"
#include "alcrp/oracle.hpp"

namespace alcrp {

struct PhiEstimate {
    double value = 0.0;
    std::size_t pool_size = 0;
    double eta = 0.0;
    double r = 1.0;  // ball radius, 1 when estimating over all of V
};

/// Empirical Phi_D(V, eta): minimum abstention probability of the LP
/// predictor on the pool the set was built over.
inline PhiEstimate estimate_phi_capital(const HypothesisSet& set, double eta) {
    const auto profile = solve_crp(set, eta);
    return {profile.phi, set.num_examples(), eta, 1.0};
}

/// phi(r, eta) = Phi over the empirical disagreement ball B(h_star, r).
inline PhiEstimate estimate_phi_small(const HypothesisClass& cls, std::size_t h_star, double r,
                                      double eta, const UnlabeledPool& pool) {
    const HypothesisSet all = predictions_on_pool(cls, pool);
    const auto idx = all_indices(pool.size());
    const HypothesisSet ball = disagreement_ball(all, h_star, r, idx);
    if (ball.active().empty()) throw std::invalid_argument("empty ball");
    auto est = estimate_phi_capital(ball, eta);
    est.r = r;
    return est;
}

struct ThetaRow {
    double r = 0.0;
    double theta = 0.0;
};

/// Disagreement coefficient estimate: theta(r) = sup over grid r' >= r of
/// (empirical DIS mass of B(h_star, r')) / r'.
inline std::vector<ThetaRow> estimate_theta(const HypothesisClass& cls, std::size_t h_star,
                                            std::vector<double> r_grid, const UnlabeledPool& pool) {
    if (r_grid.empty()) throw std::invalid_argument("empty radius grid");
    for (double r : r_grid)
        if (r <= 0.0 || r > 1.0) throw std::invalid_argument("radius grid values must be in (0,1]");
    std::sort(r_grid.begin(), r_grid.end());

    const HypothesisSet all = predictions_on_pool(cls, pool);
    const auto idx = all_indices(pool.size());
    std::vector<double> ratio(r_grid.size());
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        const HypothesisSet ball = disagreement_ball(all, h_star, r_grid[i], idx);
        double mass = 0.0;
        if (!ball.active().empty()) {
            const auto mask = disagreement_region_mask(ball, idx);
            for (auto b : mask) mass += b;
            mass /= static_cast<double>(pool.size());
        }
        ratio[i] = mass / r_grid[i];
    }
    std::vector<ThetaRow> out(r_grid.size());
    double sup = 0.0;
    for (std::size_t i = r_grid.size(); i-- > 0;) {
        sup = std::max(sup, ratio[i]);
        out[i] = {r_grid[i], sup};
    }
    return out;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("linear_fit needs >= 2 points");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::fabs(denom) < 1e-15) throw std::invalid_argument("degenerate regression design");
    LinearFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double pred = fit.slope * xs[i] + fit.intercept;
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    fit.r2 = ss_tot <= 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

struct CurveCell {
    std::string strategy;  // lp | dis | passive
    double eps = 0.0;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double mean_labels = 0.0;
    double q25 = 0.0, q50 = 0.0, q75 = 0.0;
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

/// Passive label budget at target eps: the smallest n with sigma(n, delta)
/// <= eps in the realizable case, the single-round bound otherwise. Not
/// multiplied by the scale knob: passive sample sizes are already feasible
/// at desk scale, and scaling would collapse them all to 1.
inline std::size_t passive_budget(double eps, double delta, int d, bool realizable) {
    if (realizable) {
        std::size_t n = 1;
        while (sigma(n, delta, d) > eps && n < (std::size_t{1} << 40)) n *= 2;
        std::size_t lo = n / 2 > 0 ? n / 2 : 1, hi = n;
        while (lo + 1 < hi) {
            const std::size_t mid = lo + (hi - lo) / 2;
            (sigma(mid, delta, d) > eps ? lo : hi) = mid;
        }
        return hi;
    }
    return static_cast<std::size_t>(std::ceil(nonadaptive_sample_size(eps, delta, d)));
}

}  // namespace detail

struct CurveSettings {
    HypothesisClass cls;
    Marginal marginal;
    Conditional conditional;
    bool realizable_mode = true;
    std::vector<double> eps_grid;
    double delta = 0.1;
    double scale = 1e-4;
    std::size_t trials = 10;
    std::uint64_t seed = 1;
    std::vector<std::string> strategies = {"lp", "dis", "passive"};
};

/// Mean and quartiles of total labels vs. eps per strategy, matched seeds
/// across strategies. Per-cell failures are recorded, not fatal.
inline std::vector<CurveCell> label_complexity_curve(const CurveSettings& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
    std::vector<CurveCell> cells;
    for (const auto& strategy : cfg.strategies) {
        for (std::size_t ei = 0; ei < cfg.eps_grid.size(); ++ei) {
            const double eps = cfg.eps_grid[ei];
            CurveCell cell;
            cell.strategy = strategy;
            cell.eps = eps;
            cell.trials = cfg.trials;
            std::vector<double> labels;
            for (std::size_t t = 0; t < cfg.trials; ++t) {
                const std::uint64_t trial_seed = derive_seed(cfg.seed, {ei, t});
                OracleSpec spec{cfg.marginal, cfg.conditional, cfg.cls, trial_seed};
                Oracle oracle(std::move(spec));
                try {
                    if (strategy == "passive") {
                        const auto budget = detail::passive_budget(
                            eps, cfg.delta, class_vc_dim(cfg.cls), cfg.realizable_mode);
                        run_passive(cfg.cls, oracle, budget);
                        labels.push_back(static_cast<double>(budget));
                    } else {
                        const PredictorKind kind =
                            strategy == "lp" ? PredictorKind::lp : PredictorKind::dis;
                        const auto rep =
                            cfg.realizable_mode
                                ? run_realizable(cfg.cls, oracle, kind, eps, cfg.delta, cfg.scale, trial_seed)
                                : run_agnostic(cfg.cls, oracle, kind, eps, cfg.delta, cfg.scale, trial_seed);
                        labels.push_back(static_cast<double>(rep.total_labels));
                    }
                } catch (const std::exception&) {
                    ++cell.failures;
                }
            }
            if (!labels.empty()) {
                double sum = 0.0;
                for (double v : labels) sum += v;
                cell.mean_labels = sum / static_cast<double>(labels.size());
                std::sort(labels.begin(), labels.end());
                cell.q25 = detail::quantile_sorted(labels, 0.25);
                cell.q50 = detail::quantile_sorted(labels, 0.50);
                cell.q75 = detail::quantile_sorted(labels, 0.75);
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

inline void write_estimates_csv(std::ostream& out, const std::string& quantity,
                                const std::vector<PhiEstimate>& rows) {
    out << "# alcrp-csv v1 estimates\n";
    out << "quantity,r,eta,pool_size,value,stderr\n";
    for (const auto& e : rows)
        out << quantity << ',' << fmt(e.r) << ',' << fmt(e.eta) << ',' << e.pool_size << ','
            << fmt(e.value) << ",0\n";
}

inline void write_theta_csv(std::ostream& out, const std::vector<ThetaRow>& rows,
                            std::size_t pool_size) {
    out << "# alcrp-csv v1 estimates\n";
    out << "quantity,r,eta,pool_size,value,stderr\n";
    for (const auto& row : rows)
        out << "theta," << fmt(row.r) << ",0," << pool_size << ',' << fmt(row.theta) << ",0\n";
}

inline void write_curve_csv(std::ostream& out, const std::vector<CurveCell>& cells) {
    out << "# alcrp-csv v1 curve\n";
    out << "strategy,eps,trials,failures,mean_labels,q25,q50,q75\n";
    for (const auto& c : cells)
        out << c.strategy << ',' << fmt(c.eps) << ',' << c.trials << ',' << c.failures << ','
            << fmt(c.mean_labels) << ',' << fmt(c.q25) << ',' << fmt(c.q50) << ',' << fmt(c.q75)
            << '\n';
}

}  // namespace alcrp
