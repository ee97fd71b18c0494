#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "alcrp/hypothesis.hpp"
#include "alcrp/io.hpp"
#include "alcrp/oracle.hpp"
#include "alcrp/rng.hpp"

namespace alcrp {

/// sigma(n, delta) = (8/n)(2 d ln(2 e n / d) + ln(24 / delta)).
/// Exact evaluation; may exceed 1 for small n.
inline double sigma(std::size_t n, double delta, int d) {
    if (n < 1 || delta <= 0.0 || delta >= 1.0 || d < 1) throw std::invalid_argument("invalid parameter");
    const double nd = static_cast<double>(n);
    const double dd = static_cast<double>(d);
    return 8.0 / nd * (2.0 * dd * std::log(2.0 * std::numbers::e * nd / dd) + std::log(24.0 / delta));
}

struct QueryRound {
    std::size_t j;
    std::uint64_t n_j;
    std::size_t erm_index;
    std::size_t survivors;
    double stop_stat;  // sup_h sigma + sqrt(sigma rho)
};

struct QueryResult {
    std::vector<std::size_t> surviving;  // active indices of the returned set
    std::uint64_t labels_used = 0;
    std::vector<QueryRound> rounds;
    bool conformant = true;  // false when the round cap was hit before the stop rule
};

namespace detail {

struct DrawnSample {
    LabeledSample sample;           // indices into the pool
    std::vector<std::size_t> idx;   // same indices, for rho computations
};

inline DrawnSample draw_labeled(std::span<const double> weights, const UnlabeledPool& pool,
                                Oracle& oracle, std::size_t n, RngStream& query_rng) {
    DrawnSample out;
    const auto cum = prefix_sums(weights);
    if (cum.empty() || cum.back() <= 0.0)
        throw std::invalid_argument("query distribution has no mass");
    out.sample.items.reserve(n);
    out.idx.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t i = sample_from_cumulative(cum, query_rng.uniform01());
        const std::int8_t y = oracle.query_label(pool.point(i));
        out.sample.items.push_back({i, y});
        out.idx.push_back(i);
    }
    return out;
}

}  // namespace detail

/// Doubling procedure: rounds j = 1, 2, ... draw fresh samples of size 2^j
/// from the given distribution, keep hypotheses passing
///   err(h) <= err(erm) + eps/2 + sigma_j + sqrt(sigma_j rho(h, erm)),
/// and stop once sup_h sigma_j + sqrt(sigma_j rho(h, erm)) <= eps/6.
/// eps_t may exceed 1 (the outer loop passes eps_k / (8 phi_k)).
inline QueryResult adaptive_label_query(const HypothesisSet& set, std::span<const double> weights,
                                        const UnlabeledPool& pool, Oracle& oracle, double eps_t,
                                        double delta_t, RngStream& query_rng,
                                        std::size_t j_cap = 24) {
    if (set.active().empty()) throw std::invalid_argument("empty hypothesis set");
    if (eps_t <= 0.0) throw std::invalid_argument("invalid parameter");
    if (delta_t <= 0.0 || delta_t >= 1.0) throw std::invalid_argument("invalid parameter");
    if (j_cap < 1) throw std::invalid_argument("invalid parameter");

    QueryResult out;
    const int d = set.vc_dim();
    for (std::size_t j = 1; j <= j_cap; ++j) {
        const std::size_t n_j = std::size_t{1} << j;
        const double delta_j = delta_t / (static_cast<double>(j) * static_cast<double>(j + 1));
        auto drawn = detail::draw_labeled(weights, pool, oracle, n_j, query_rng);
        out.labels_used += n_j;

        std::vector<double> errs(set.active().size());
        for (std::size_t a = 0; a < set.active().size(); ++a)
            errs[a] = empirical_error(set.active()[a], drawn.sample, set);
        std::size_t erm_pos = 0;
        for (std::size_t a = 1; a < errs.size(); ++a)
            if (errs[a] < errs[erm_pos]) erm_pos = a;
        const std::size_t erm_h = set.active()[erm_pos];

        const double sg = sigma(n_j, delta_j, d);
        std::vector<std::size_t> survivors;
        double stat = 0.0;
        for (std::size_t a = 0; a < set.active().size(); ++a) {
            const double rho = empirical_disagreement(set.active()[a], erm_h, drawn.idx, set);
            const double slack = sg + std::sqrt(sg * rho);
            if (errs[a] <= errs[erm_pos] + eps_t / 2.0 + slack) {
                survivors.push_back(set.active()[a]);
                stat = std::max(stat, slack);
            }
        }
        out.rounds.push_back({j, n_j, erm_h, survivors.size(), stat});
        out.surviving = std::move(survivors);
        if (stat <= eps_t / 6.0) return out;
    }
    out.conformant = false;  // no halt within the round cap
    return out;
}

/// Sample size of the single-round alternative, before scaling.
inline double nonadaptive_sample_size(double eps_t, double delta_t, int d) {
    const double base = 6144.0 / (eps_t * eps_t);
    return base * (static_cast<double>(d) * std::log(base) + std::log(24.0 / delta_t));
}

/// One round of n = (6144/eps^2)(d ln(6144/eps^2) + ln(24/delta)) draws
/// (times scale, rounded up); survivors by err(h) <= err(erm) + 3 eps / 4.
inline QueryResult nonadaptive_label_query(const HypothesisSet& set, std::span<const double> weights,
                                           const UnlabeledPool& pool, Oracle& oracle, double eps_t,
                                           double delta_t, RngStream& query_rng, double scale = 1.0) {
    if (set.active().empty()) throw std::invalid_argument("empty hypothesis set");
    if (eps_t <= 0.0 || scale <= 0.0) throw std::invalid_argument("invalid parameter");
    if (delta_t <= 0.0 || delta_t >= 1.0) throw std::invalid_argument("invalid parameter");

    const auto n = static_cast<std::size_t>(std::ceil(scale * nonadaptive_sample_size(eps_t, delta_t, set.vc_dim())));
    auto drawn = detail::draw_labeled(weights, pool, oracle, std::max<std::size_t>(n, 1), query_rng);

    QueryResult out;
    out.labels_used = drawn.sample.size();
    std::vector<double> errs(set.active().size());
    for (std::size_t a = 0; a < set.active().size(); ++a)
        errs[a] = empirical_error(set.active()[a], drawn.sample, set);
    std::size_t erm_pos = 0;
    for (std::size_t a = 1; a < errs.size(); ++a)
        if (errs[a] < errs[erm_pos]) erm_pos = a;
    for (std::size_t a = 0; a < set.active().size(); ++a)
        if (errs[a] <= errs[erm_pos] + 0.75 * eps_t) out.surviving.push_back(set.active()[a]);
    out.rounds.push_back({1, out.labels_used, set.active()[erm_pos], out.surviving.size(), 0.0});
    return out;
}

inline void write_rounds_csv(std::ostream& out, const QueryResult& result) {
    out << "# alcrp-csv v1 query-rounds\n";
    out << "j,n_j,erm_index,survivors,stop_stat\n";
    for (const auto& r : result.rounds)
        out << r.j << ',' << r.n_j << ',' << r.erm_index << ',' << r.survivors << ','
            << fmt(r.stop_stat) << '\n';
}

}  // namespace alcrp
