#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "alcrp/hypothesis.hpp"
#include "alcrp/hypothesis_classes.hpp"
#include "alcrp/rng.hpp"

namespace alcrp {

struct UniformIntervalMarginal {
    double low = 0.0, high = 1.0;
};

/// Finite pool of equally spaced, equally weighted 1-D points.
struct UniformGridMarginal {
    std::size_t size = 0;
    double low = 0.0, high = 1.0;
};

struct GaussianMarginal {
    std::size_t dim = 2;
};

struct FinitePoolMarginal {
    UnlabeledPool pool;
    std::vector<double> weights;  // empty = uniform
};

using Marginal =
    std::variant<UniformIntervalMarginal, UniformGridMarginal, GaussianMarginal, FinitePoolMarginal>;

/// label = truth(x) deterministically
struct RealizableConditional {
    std::size_t truth_index = 0;
};

/// label = truth(x) flipped with probability rate
struct UniformFlipConditional {
    std::size_t truth_index = 0;
    double rate = 0.1;
};

/// 1-D margin model around t_star:
/// eta(x) = 1/2 + (1/2) sign(x - t_star) min(1, c0 |x - t_star|^(kappa-1)).
struct TsybakovThresholdConditional {
    double t_star = 0.5;
    double c0 = 1.0;
    double kappa = 2.0;
};

using Conditional =
    std::variant<RealizableConditional, UniformFlipConditional, TsybakovThresholdConditional>;

struct OracleSpec {
    Marginal marginal;
    Conditional conditional;
    HypothesisClass cls;  // truth_index refers into this class
    std::uint64_t seed = 1;
};

struct DrawResult {
    UnlabeledPool pool;
    std::vector<std::size_t> source_index;  // filled for finite marginals
};

struct ExcessErrorEstimate {
    double value = 0.0;
    double stderr_ = 0.0;  // 0 for exact paths
};

namespace detail {

constexpr std::uint64_t kDrawTag = 0xD1;
constexpr std::uint64_t kLabelTag = 0x1A;
constexpr std::uint64_t kEvalTag = 0xE7;

inline bool is_finite_marginal(const Marginal& m) {
    return std::holds_alternative<UniformGridMarginal>(m) ||
           std::holds_alternative<FinitePoolMarginal>(m);
}

}  // namespace detail

/// Simulated example + labeling oracle with seeded streams, known truth and
/// an audited label budget. One instance per trial; not thread-safe.
class Oracle {
public:
    explicit Oracle(OracleSpec spec) : spec_(std::move(spec)) {
        if (const auto* g = std::get_if<UniformGridMarginal>(&spec_.marginal)) {
            if (g->size == 0) throw std::invalid_argument("uniform grid marginal needs size >= 1");
        }
        if (const auto* f = std::get_if<FinitePoolMarginal>(&spec_.marginal)) {
            if (f->pool.size() == 0) throw std::invalid_argument("finite pool marginal is empty");
            if (!f->weights.empty() && f->weights.size() != f->pool.size())
                throw std::invalid_argument("finite pool weights size mismatch");
        }
    }

    const OracleSpec& spec() const { return spec_; }
    std::uint64_t budget() const { return budget_; }

    /// P(Y=+1 | X=x) under the configured conditional.
    double eta(std::span<const double> x) const {
        if (const auto* r = std::get_if<RealizableConditional>(&spec_.conditional))
            return predict(spec_.cls, r->truth_index, x) == 1 ? 1.0 : 0.0;
        if (const auto* f = std::get_if<UniformFlipConditional>(&spec_.conditional)) {
            const bool pos = predict(spec_.cls, f->truth_index, x) == 1;
            return pos ? 1.0 - f->rate : f->rate;
        }
        const auto& t = std::get<TsybakovThresholdConditional>(spec_.conditional);
        const double d = x[0] - t.t_star;
        const double margin = std::min(1.0, t.c0 * std::pow(std::fabs(d), t.kappa - 1.0));
        return 0.5 + 0.5 * (d >= 0 ? margin : -margin);
    }

    /// n i.i.d. draws from the marginal. Budget unchanged. Each call uses its
    /// own derived stream, so the i-th call is reproducible regardless of how
    /// much randomness other calls consumed.
    DrawResult draw_unlabeled(std::size_t n) {
        RngStream rng(derive_seed(spec_.seed, {detail::kDrawTag, draw_calls_++}));
        DrawResult out;
        if (const auto* u = std::get_if<UniformIntervalMarginal>(&spec_.marginal)) {
            out.pool.dim = 1;
            out.pool.coords.reserve(n);
            for (std::size_t i = 0; i < n; ++i) out.pool.coords.push_back(rng.uniform(u->low, u->high));
        } else if (const auto* g = std::get_if<UniformGridMarginal>(&spec_.marginal)) {
            out.pool.dim = 1;
            out.pool.coords.reserve(n);
            out.source_index.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = rng.uniform_index(g->size);
                out.source_index.push_back(j);
                out.pool.coords.push_back(grid_point(*g, j));
            }
        } else if (const auto* gs = std::get_if<GaussianMarginal>(&spec_.marginal)) {
            out.pool.dim = gs->dim;
            out.pool.coords.reserve(n * gs->dim);
            for (std::size_t i = 0; i < n * gs->dim; ++i) out.pool.coords.push_back(rng.gaussian());
        } else {
            const auto& f = std::get<FinitePoolMarginal>(spec_.marginal);
            out.pool.dim = f.pool.dim;
            out.pool.coords.reserve(n * f.pool.dim);
            out.source_index.reserve(n);
            std::vector<double> cum;
            if (!f.weights.empty()) cum = prefix_sums(f.weights);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = f.weights.empty()
                                          ? rng.uniform_index(f.pool.size())
                                          : sample_from_cumulative(cum, rng.uniform01());
                out.source_index.push_back(j);
                out.pool.push_back(f.pool.point(j));
            }
        }
        return out;
    }

    /// Draws y from D_{Y|X=x}; increments the budget.
    std::int8_t query_label(std::span<const double> x) {
        ++budget_;
        if (const auto* r = std::get_if<RealizableConditional>(&spec_.conditional))
            return predict(spec_.cls, r->truth_index, x);
        RngStream rng(derive_seed(spec_.seed, {detail::kLabelTag, label_calls_++}));
        return rng.uniform01() < eta(x) ? std::int8_t{1} : std::int8_t{-1};
    }

    /// err_D(h) - nu*(D). Exact on finite marginals and for the closed forms
    /// below; otherwise Monte Carlo with a reported standard error.
    ExcessErrorEstimate true_excess_error(std::size_t h, std::size_t mc_samples = 200000) {
        if (detail::is_finite_marginal(spec_.marginal)) return exact_excess_finite(h);
        if (auto cf = closed_form_excess(h)) return {*cf, 0.0};
        return monte_carlo_excess(h, mc_samples);
    }

    /// err_D(h), same evaluation strategy; nu* = err(truth) where defined.
    ExcessErrorEstimate true_error(std::size_t h, std::size_t mc_samples = 200000) {
        auto ex = true_excess_error(h, mc_samples);
        ex.value += best_error();
        return ex;
    }

    /// nu*(D): exact on finite marginals, closed form otherwise where known.
    double best_error() {
        if (detail::is_finite_marginal(spec_.marginal)) {
            double best = std::numeric_limits<double>::infinity();
            const auto [pts, w] = finite_points();
            for (std::size_t h = 0; h < class_size(spec_.cls); ++h)
                best = std::min(best, weighted_error(h, pts, w));
            return best;
        }
        if (std::holds_alternative<RealizableConditional>(spec_.conditional)) return 0.0;
        if (const auto* f = std::get_if<UniformFlipConditional>(&spec_.conditional)) return f->rate;
        // Tsybakov threshold over a uniform interval: Bayes risk of h_{t*}
        const auto& t = std::get<TsybakovThresholdConditional>(spec_.conditional);
        const auto* u = std::get_if<UniformIntervalMarginal>(&spec_.marginal);
        if (u && std::holds_alternative<ThresholdClass>(spec_.cls)) {
            // risk(t*) = E[min(eta, 1-eta)] = E[(1 - min(1, c0 |x-t*|^(k-1)))/2]
            auto seg = [&](double a, double b) {  // integral over [a,b] of min(1, c0 u^(k-1)), u = |x-t*|
                return tsybakov_margin_integral(std::fabs(a - t.t_star), std::fabs(b - t.t_star), t);
            };
            const double len = u->high - u->low;
            const double integral = seg(u->low, t.t_star) + seg(t.t_star, u->high);
            return 0.5 * (1.0 - integral / len);
        }
        return monte_carlo_best_error();
    }

    double grid_point(const UniformGridMarginal& g, std::size_t j) const {
        return g.size == 1
                   ? g.low
                   : g.low + (g.high - g.low) * static_cast<double>(j) / static_cast<double>(g.size - 1);
    }

private:
    std::pair<UnlabeledPool, std::vector<double>> finite_points() const {
        if (const auto* g = std::get_if<UniformGridMarginal>(&spec_.marginal)) {
            UnlabeledPool p;
            p.dim = 1;
            p.coords.resize(g->size);
            for (std::size_t j = 0; j < g->size; ++j) p.coords[j] = grid_point(*g, j);
            return {std::move(p), std::vector<double>(g->size, 1.0 / static_cast<double>(g->size))};
        }
        const auto& f = std::get<FinitePoolMarginal>(spec_.marginal);
        std::vector<double> w = f.weights;
        if (w.empty()) w.assign(f.pool.size(), 1.0 / static_cast<double>(f.pool.size()));
        else {
            double tot = 0.0;
            for (double v : w) tot += v;
            for (double& v : w) v /= tot;
        }
        return {f.pool, std::move(w)};
    }

    double weighted_error(std::size_t h, const UnlabeledPool& pts, const std::vector<double>& w) const {
        double err = 0.0;
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const double e = eta(pts.point(j));
            err += w[j] * (predict(spec_.cls, h, pts.point(j)) == 1 ? 1.0 - e : e);
        }
        return err;
    }

    ExcessErrorEstimate exact_excess_finite(std::size_t h) const {
        const auto [pts, w] = finite_points();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < class_size(spec_.cls); ++g)
            best = std::min(best, weighted_error(g, pts, w));
        return {weighted_error(h, pts, w) - best, 0.0};
    }

    // integral over u in [u0,u1] (0 <= u0 <= u1) of min(1, c0 u^(kappa-1))
    static double tsybakov_margin_integral(double u0, double u1,
                                           const TsybakovThresholdConditional& t) {
        if (u1 < u0) std::swap(u0, u1);
        if (t.kappa <= 1.0) return std::min(1.0, t.c0) * (u1 - u0);
        const double ustar = std::pow(1.0 / t.c0, 1.0 / (t.kappa - 1.0));
        auto prim = [&](double u) {  // antiderivative
            if (u <= ustar) return t.c0 * std::pow(u, t.kappa) / t.kappa;
            return t.c0 * std::pow(ustar, t.kappa) / t.kappa + (u - ustar);
        };
        return prim(u1) - prim(u0);
    }

    std::optional<double> closed_form_excess(std::size_t h) const {
        const auto* u = std::get_if<UniformIntervalMarginal>(&spec_.marginal);
        if (u && std::holds_alternative<ThresholdClass>(spec_.cls)) {
            const double t = std::get<ThresholdClass>(spec_.cls).thresholds[h];
            const double len = u->high - u->low;
            auto clamp = [&](double v) { return std::min(u->high, std::max(u->low, v)); };
            if (const auto* r = std::get_if<RealizableConditional>(&spec_.conditional)) {
                const double ts = std::get<ThresholdClass>(spec_.cls).thresholds[r->truth_index];
                return std::fabs(clamp(t) - clamp(ts)) / len;
            }
            if (const auto* f = std::get_if<UniformFlipConditional>(&spec_.conditional)) {
                const double ts = std::get<ThresholdClass>(spec_.cls).thresholds[f->truth_index];
                return (1.0 - 2.0 * f->rate) * std::fabs(clamp(t) - clamp(ts)) / len;
            }
            const auto& ts = std::get<TsybakovThresholdConditional>(spec_.conditional);
            const double a = std::fabs(clamp(t) - ts.t_star);
            return tsybakov_margin_integral(0.0, a, ts) / len;
        }
        const auto* g = std::get_if<GaussianMarginal>(&spec_.marginal);
        if (g && std::holds_alternative<LinearClass>(spec_.cls) &&
            std::holds_alternative<RealizableConditional>(spec_.conditional)) {
            // isotropic: disagreement of two homogeneous halfspaces = angle / pi
            const auto& lin = std::get<LinearClass>(spec_.cls);
            const std::size_t hs = std::get<RealizableConditional>(spec_.conditional).truth_index;
            double dot = 0.0;
            for (std::size_t j = 0; j < lin.dim; ++j)
                dot += lin.directions[h * lin.dim + j] * lin.directions[hs * lin.dim + j];
            dot = std::min(1.0, std::max(-1.0, dot));
            return std::acos(dot) / std::numbers::pi;
        }
        return std::nullopt;
    }

    ExcessErrorEstimate monte_carlo_excess(std::size_t h, std::size_t n) {
        RngStream rng(derive_seed(spec_.seed, {detail::kEvalTag, eval_calls_++}));
        UnlabeledPool sample = draw_for_eval(n, rng);
        double sum = 0.0, sum2 = 0.0;
        const double nu = best_error();
        for (std::size_t i = 0; i < n; ++i) {
            const double e = eta(sample.point(i));
            const double v = predict(spec_.cls, h, sample.point(i)) == 1 ? 1.0 - e : e;
            sum += v;
            sum2 += v * v;
        }
        const double mean = sum / static_cast<double>(n);
        const double var = std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
        return {mean - nu, std::sqrt(var / static_cast<double>(n))};
    }

    double monte_carlo_best_error() {
        RngStream rng(derive_seed(spec_.seed, {detail::kEvalTag, 0xBE57}));
        UnlabeledPool sample = draw_for_eval(50000, rng);
        // nu* = E[min(eta, 1-eta)] when truth is the Bayes rule of the model
        double sum = 0.0;
        for (std::size_t i = 0; i < sample.size(); ++i) {
            const double e = eta(sample.point(i));
            sum += std::min(e, 1.0 - e);
        }
        return sum / static_cast<double>(sample.size());
    }

    UnlabeledPool draw_for_eval(std::size_t n, RngStream& rng) const {
        UnlabeledPool out;
        if (const auto* u = std::get_if<UniformIntervalMarginal>(&spec_.marginal)) {
            out.dim = 1;
            for (std::size_t i = 0; i < n; ++i) out.coords.push_back(rng.uniform(u->low, u->high));
        } else if (const auto* g = std::get_if<GaussianMarginal>(&spec_.marginal)) {
            out.dim = g->dim;
            for (std::size_t i = 0; i < n * g->dim; ++i) out.coords.push_back(rng.gaussian());
        } else {
            throw std::logic_error("draw_for_eval is only used for continuous marginals");
        }
        return out;
    }

    OracleSpec spec_;
    std::uint64_t budget_ = 0;
    std::uint64_t draw_calls_ = 0;
    std::uint64_t label_calls_ = 0;
    std::uint64_t eval_calls_ = 0;
};

/// Plain numeric text file: one point per line, whitespace-separated coords.
inline UnlabeledPool parse_pool(std::istream& in) {
    UnlabeledPool pool;
    std::string line;
    std::size_t dim = 0;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::vector<double> vals;
        double v;
        while (row >> v) vals.push_back(v);
        if (vals.empty()) continue;
        if (dim == 0) {
            dim = vals.size();
            pool.dim = dim;
        } else if (vals.size() != dim) {
            throw std::invalid_argument("pool rows have differing dimensions");
        }
        pool.coords.insert(pool.coords.end(), vals.begin(), vals.end());
    }
    if (pool.coords.empty()) throw std::invalid_argument("empty pool file");
    return pool;
}

inline UnlabeledPool load_pool(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pool file: " + path);
    return parse_pool(in);
}

}  // namespace alcrp
