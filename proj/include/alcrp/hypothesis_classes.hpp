#pragma once

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "alcrp/hypothesis.hpp"
#include "alcrp/rng.hpp"

namespace alcrp {

// sign convention used throughout: sign(0) = +1
inline std::int8_t sign_of(double z) { return z >= 0.0 ? std::int8_t{1} : std::int8_t{-1}; }

/// 1-D thresholds h_t(x) = sign(x - t) on a fixed grid of t values.
struct ThresholdClass {
    std::vector<double> thresholds;
    int vc_dim = 1;
};

/// 1-D intervals: +1 inside [a,b], -1 outside.
struct IntervalClass {
    std::vector<std::pair<double, double>> bounds;
    int vc_dim = 2;
};

/// Homogeneous linear classifiers sign(w . x); directions stored row-major.
struct LinearClass {
    std::size_t dim = 2;
    std::vector<double> directions;  // size() * dim unit vectors
    int vc_dim = 2;

    std::size_t size() const { return dim == 0 ? 0 : directions.size() / dim; }
};

/// Hypotheses given directly as a +-1 matrix over a fixed finite pool.
/// Points are addressed by their pool index: a point's first coordinate is
/// the column id (pair this class with a finite-pool oracle).
struct ExplicitClass {
    std::size_t cols = 0;
    std::vector<std::int8_t> cells;  // rows * cols
    int vc_dim = 1;

    std::size_t rows() const { return cols == 0 ? 0 : cells.size() / cols; }
};

using HypothesisClass = std::variant<ThresholdClass, IntervalClass, LinearClass, ExplicitClass>;

inline std::size_t class_size(const HypothesisClass& cls) {
    return std::visit(
        [](const auto& c) -> std::size_t {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ThresholdClass>)
                return c.thresholds.size();
            else if constexpr (std::is_same_v<T, IntervalClass>)
                return c.bounds.size();
            else if constexpr (std::is_same_v<T, LinearClass>)
                return c.size();
            else
                return c.rows();
        },
        cls);
}

inline int class_vc_dim(const HypothesisClass& cls) {
    return std::visit([](const auto& c) { return c.vc_dim; }, cls);
}

inline std::size_t class_point_dim(const HypothesisClass& cls) {
    if (const auto* lin = std::get_if<LinearClass>(&cls)) return lin->dim;
    return 1;
}

inline std::int8_t predict(const HypothesisClass& cls, std::size_t h, std::span<const double> x) {
    if (const auto* th = std::get_if<ThresholdClass>(&cls))
        return sign_of(x[0] - th->thresholds[h]);
    if (const auto* iv = std::get_if<IntervalClass>(&cls)) {
        const auto& [a, b] = iv->bounds[h];
        return (x[0] >= a && x[0] <= b) ? std::int8_t{1} : std::int8_t{-1};
    }
    if (const auto* lin = std::get_if<LinearClass>(&cls)) {
        double dot = 0.0;
        for (std::size_t j = 0; j < lin->dim; ++j) dot += lin->directions[h * lin->dim + j] * x[j];
        return sign_of(dot);
    }
    const auto& ex = std::get<ExplicitClass>(cls);
    const auto col = static_cast<std::size_t>(x[0]);
    if (col >= ex.cols) throw std::invalid_argument("explicit class: point is not a pool column id");
    return ex.cells[h * ex.cols + col];
}

/// Evaluates the whole class on a pool; all hypotheses start active.
inline HypothesisSet predictions_on_pool(const HypothesisClass& cls, const UnlabeledPool& pool) {
    const std::size_t rows = class_size(cls);
    const std::size_t cols = pool.size();
    std::vector<std::int8_t> cells(rows * cols);
    for (std::size_t h = 0; h < rows; ++h)
        for (std::size_t i = 0; i < cols; ++i) cells[h * cols + i] = predict(cls, h, pool.point(i));
    return HypothesisSet(std::move(cells), rows, cols, class_vc_dim(cls));
}

inline ThresholdClass make_threshold_grid(std::size_t count, double lo = 0.0, double hi = 1.0) {
    if (count < 1) throw std::invalid_argument("threshold grid needs at least one point");
    ThresholdClass cls;
    cls.thresholds.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        cls.thresholds[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return cls;
}

/// All pairs (a,b) with a <= b over the same grid.
inline IntervalClass make_interval_grid(std::size_t count, double lo = 0.0, double hi = 1.0) {
    const ThresholdClass grid = make_threshold_grid(count, lo, hi);
    IntervalClass cls;
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i; j < count; ++j)
            cls.bounds.emplace_back(grid.thresholds[i], grid.thresholds[j]);
    return cls;
}

/// 2-D directions at equally spaced angles.
inline LinearClass make_angular_grid(std::size_t count) {
    if (count < 1) throw std::invalid_argument("angular grid needs at least one direction");
    LinearClass cls;
    cls.dim = 2;
    cls.vc_dim = 2;
    cls.directions.resize(2 * count);
    for (std::size_t i = 0; i < count; ++i) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
        cls.directions[2 * i] = std::cos(a);
        cls.directions[2 * i + 1] = std::sin(a);
    }
    return cls;
}

/// d >= 3: deterministic unit directions from a seeded stream.
inline LinearClass make_spherical_grid(std::size_t dim, std::size_t count, std::uint64_t seed) {
    if (dim < 1 || count < 1) throw std::invalid_argument("spherical grid needs dim >= 1, count >= 1");
    LinearClass cls;
    cls.dim = dim;
    cls.vc_dim = static_cast<int>(dim);
    cls.directions.resize(dim * count);
    RngStream rng(derive_seed(seed, {0x5D1Full}));
    for (std::size_t i = 0; i < count; ++i) {
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double g = rng.gaussian();
                cls.directions[i * dim + j] = g;
                norm2 += g * g;
            }
        } while (norm2 < 1e-12);
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t j = 0; j < dim; ++j) cls.directions[i * dim + j] *= inv;
    }
    return cls;
}

/// Text format: one hypothesis per line, whitespace-separated +-1 entries.
inline ExplicitClass parse_class_matrix(std::istream& in, int vc_dim = 1) {
    ExplicitClass cls;
    cls.vc_dim = vc_dim;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::vector<std::int8_t> vals;
        int v;
        while (row >> v) {
            if (v != 1 && v != -1) throw std::invalid_argument("matrix entries must be +-1");
            vals.push_back(static_cast<std::int8_t>(v));
        }
        if (vals.empty()) continue;
        if (cls.cols == 0)
            cls.cols = vals.size();
        else if (vals.size() != cls.cols)
            throw std::invalid_argument("matrix rows have differing lengths");
        cls.cells.insert(cls.cells.end(), vals.begin(), vals.end());
    }
    if (cls.cells.empty()) throw std::invalid_argument("empty hypothesis matrix");
    return cls;
}

inline ExplicitClass load_class_matrix(const std::string& path, int vc_dim = 1) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open hypothesis matrix file: " + path);
    return parse_class_matrix(in, vc_dim);
}

}  // namespace alcrp
