#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "alcrp/hypothesis.hpp"
#include "alcrp/hypothesis_classes.hpp"
#include "alcrp/rng.hpp"

using namespace alcrp;

namespace {

HypothesisSet from_rows(const std::vector<std::vector<int>>& rows, int vc = 1) {
    std::vector<std::int8_t> cells;
    for (const auto& r : rows)
        for (int v : r) cells.push_back(static_cast<std::int8_t>(v));
    return HypothesisSet(std::move(cells), rows.size(), rows.front().size(), vc);
}

HypothesisSet random_set(RngStream& rng, std::size_t rows, std::size_t cols) {
    std::vector<std::int8_t> cells(rows * cols);
    for (auto& c : cells) c = rng.uniform01() < 0.5 ? 1 : -1;
    return HypothesisSet(std::move(cells), rows, cols, 1);
}

UnlabeledPool grid_pool(std::size_t n, double lo, double hi) {
    UnlabeledPool pool;
    pool.dim = 1;
    for (std::size_t i = 0; i < n; ++i)
        pool.coords.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return pool;
}

}  // namespace

TEST_CASE("prediction matrix validation") {
    CHECK_THROWS_AS(HypothesisSet({1, 0, 1, 1}, 2, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(HypothesisSet({1, 1, 1, 1}, 2, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(HypothesisSet({1, 1, 1}, 2, 2, 1), std::invalid_argument);
}

TEST_CASE("empirical_error counts mismatches") {
    auto set = from_rows({{1, 1, -1}});
    LabeledSample s{{{0, 1}, {1, -1}, {2, -1}}};
    CHECK(empirical_error(0, s, set) == Catch::Approx(1.0 / 3.0));

    LabeledSample match{{{0, 1}, {1, 1}, {2, -1}}};
    CHECK(empirical_error(0, match, set) == 0.0);

    CHECK_THROWS_WITH(empirical_error(0, LabeledSample{}, set), "empty sample");
    auto restricted = set.with_active({});
    CHECK_THROWS_WITH(empirical_error(0, s, restricted), "unknown hypothesis");
}

TEST_CASE("empirical_error matches a per-item recount on random instances") {
    RngStream rng(11);
    auto set = random_set(rng, 5, 20);
    LabeledSample s;
    for (std::size_t i = 0; i < 20; ++i)
        s.items.push_back({i, rng.uniform01() < 0.5 ? std::int8_t{1} : std::int8_t{-1}});
    for (std::size_t h = 0; h < 5; ++h) {
        int wrong = 0;
        for (const auto& it : s.items) wrong += set.prediction(h, it.index) != it.label ? 1 : 0;
        CHECK(empirical_error(h, s, set) == Catch::Approx(wrong / 20.0));
    }
}

TEST_CASE("empirical_disagreement basics and threshold enumeration") {
    auto set = from_rows({{1, -1, 1}, {-1, 1, -1}});
    auto idx = all_indices(3);
    CHECK(empirical_disagreement(0, 0, idx, set) == 0.0);
    CHECK(empirical_disagreement(0, 1, idx, set) == 1.0);
    CHECK_THROWS_WITH(empirical_disagreement(0, 1, std::span<const std::size_t>{}, set), "empty sample");

    // thresholds 0.3 vs 0.7 on the 19-point grid 0.05..0.95: h_t(x) = sign(x-t)
    // disagrees exactly on grid points in [0.3, 0.7)
    auto pool = grid_pool(19, 0.05, 0.95);
    ThresholdClass cls;
    cls.thresholds = {0.3, 0.7};
    auto sets = predictions_on_pool(HypothesisClass{cls}, pool);
    std::size_t expected = 0;  // independent enumeration
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double x = pool.coords[i];
        if (x >= 0.3 && x < 0.7) ++expected;
    }
    CHECK(expected == 8);
    auto gridx = all_indices(19);
    CHECK(empirical_disagreement(0, 1, gridx, sets) == Catch::Approx(expected / 19.0));
}

TEST_CASE("empirical_disagreement is a pseudo-metric on random triples") {
    RngStream rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        auto set = random_set(rng, 3, 15);
        auto idx = all_indices(15);
        const double d01 = empirical_disagreement(0, 1, idx, set);
        const double d10 = empirical_disagreement(1, 0, idx, set);
        const double d02 = empirical_disagreement(0, 2, idx, set);
        const double d12 = empirical_disagreement(1, 2, idx, set);
        CHECK(d01 == d10);
        CHECK(empirical_disagreement(0, 0, idx, set) == 0.0);
        CHECK(d02 <= d01 + d12 + 1e-12);
    }
}

TEST_CASE("erm picks the argmin with lowest-index ties") {
    auto single = from_rows({{1, 1}}).with_active({0});
    LabeledSample s{{{0, 1}, {1, -1}}};
    CHECK(erm(single, s) == 0);

    auto set = from_rows({{1, -1}, {1, 1}});
    CHECK(erm(set, s) == 0);  // row 0 consistent, row 1 not

    CHECK_THROWS_WITH(erm(set.with_active({}), s), "empty hypothesis set");

    RngStream rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        auto rnd = random_set(rng, 8, 12);
        LabeledSample rs;
        for (std::size_t i = 0; i < 12; ++i)
            rs.items.push_back({i, rng.uniform01() < 0.5 ? std::int8_t{1} : std::int8_t{-1}});
        // exhaustive scan oracle
        std::size_t best = 0;
        double best_err = 2.0;
        for (std::size_t h = 0; h < 8; ++h) {
            const double e = empirical_error(h, rs, rnd);
            if (e < best_err) {
                best_err = e;
                best = h;
            }
        }
        CHECK(erm(rnd, rs) == best);
    }
}

TEST_CASE("version_space_update keeps exactly the consistent hypotheses") {
    auto set = from_rows({{1, 1}, {1, -1}, {-1, -1}});
    CHECK(version_space_update(set, LabeledSample{}).active().size() == 3);

    // labels from row 1: it must survive
    LabeledSample s{{{0, 1}, {1, -1}}};
    auto updated = version_space_update(set, s);
    CHECK(updated.is_active(1));

    RngStream rng(14);
    for (int rep = 0; rep < 10; ++rep) {
        auto rnd = random_set(rng, 10, 8);
        const std::size_t truth = rng.uniform_index(10);
        LabeledSample rs;
        for (std::size_t i = 0; i < 5; ++i) {
            const std::size_t col = rng.uniform_index(8);
            rs.items.push_back({col, rnd.prediction(truth, col)});
        }
        auto out = version_space_update(rnd, rs);
        // filter oracle: survivors are exactly the zero-error rows
        for (std::size_t h = 0; h < 10; ++h) {
            const bool zero = empirical_error(h, rs, rnd) == 0.0;
            CHECK(out.is_active(h) == zero);
        }
        // monotone: adding items never grows the output
        rs.items.push_back({0, rnd.prediction(truth, 0)});
        auto out2 = version_space_update(rnd, rs);
        for (std::size_t h : out2.active()) CHECK(out.is_active(h));
    }
}

TEST_CASE("disagreement_region_mask") {
    auto idx = all_indices(4);
    auto single = from_rows({{1, -1, 1, -1}});
    for (auto b : disagreement_region_mask(single, idx)) CHECK(b == 0);

    auto comp = from_rows({{1, -1, 1, -1}, {-1, 1, -1, 1}});
    for (auto b : disagreement_region_mask(comp, idx)) CHECK(b == 1);

    // thresholds {0.2, 0.5, 0.8} on the 0.05..0.95 grid: DIS = [0.2, 0.8)
    auto pool = grid_pool(19, 0.05, 0.95);
    ThresholdClass cls;
    cls.thresholds = {0.2, 0.5, 0.8};
    auto set = predictions_on_pool(HypothesisClass{cls}, pool);
    auto gridx = all_indices(19);
    auto mask = disagreement_region_mask(set, gridx);
    for (std::size_t i = 0; i < 19; ++i) {
        const double x = pool.coords[i];
        CHECK(static_cast<bool>(mask[i]) == (x >= 0.2 && x < 0.8));
    }

    // monotone in V: shrinking the active set can only shrink the mask
    auto sub = set.with_active({0, 1});
    auto submask = disagreement_region_mask(sub, gridx);
    for (std::size_t i = 0; i < 19; ++i) CHECK(submask[i] <= mask[i]);
}

TEST_CASE("disagreement_ball") {
    RngStream rng(15);
    auto set = random_set(rng, 12, 30);
    auto idx = all_indices(30);
    CHECK(disagreement_ball(set, 3, 1.0, idx).active().size() == 12);
    auto zero = disagreement_ball(set, 3, 0.0, idx);
    for (std::size_t h : zero.active())
        CHECK(empirical_disagreement(h, 3, idx, set) == 0.0);
    CHECK_THROWS_WITH(disagreement_ball(set, 3, 0.5, std::span<const std::size_t>{}), "empty sample");

    // thresholds under a dense grid: rho(h_t, h_t*) tracks |t - t*|
    auto pool = grid_pool(1001, 0.0, 1.0);
    auto cls = make_threshold_grid(101, 0.0, 1.0);
    auto tset = predictions_on_pool(HypothesisClass{cls}, pool);
    auto gridx = all_indices(1001);
    const std::size_t star = 50;  // t* = 0.5
    auto ball = disagreement_ball(tset, star, 0.1, gridx);
    for (std::size_t h = 0; h < 101; ++h) {
        const double dist = std::fabs(cls.thresholds[h] - 0.5);
        if (dist <= 0.099) CHECK(ball.is_active(h));
        if (dist >= 0.102) CHECK(!ball.is_active(h));
    }
}

TEST_CASE("dedupe_by_dichotomy groups row restrictions") {
    auto idx = all_indices(3);
    auto same = from_rows({{1, -1, 1}, {1, -1, 1}, {1, -1, 1}});
    auto groups = dedupe_by_dichotomy(same, idx);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].representative == 0);
    CHECK(groups[0].multiplicity == 3);

    auto distinct = from_rows({{1, 1, 1}, {1, 1, -1}, {-1, 1, 1}});
    CHECK(dedupe_by_dichotomy(distinct, idx).size() == 3);

    RngStream rng(16);
    for (int rep = 0; rep < 10; ++rep) {
        auto rnd = random_set(rng, 9, 4);
        auto ridx = all_indices(4);
        auto g = dedupe_by_dichotomy(rnd, ridx);
        // hash-grouping oracle
        std::set<std::vector<int>> patterns;
        for (std::size_t h = 0; h < 9; ++h) {
            std::vector<int> pat;
            for (std::size_t i = 0; i < 4; ++i) pat.push_back(rnd.prediction(h, i));
            patterns.insert(pat);
        }
        CHECK(g.size() == patterns.size());
        std::size_t total = 0;
        for (const auto& gr : g) total += gr.multiplicity;
        CHECK(total == 9);
    }
}

TEST_CASE("built-in classes and matrix loading") {
    auto th = make_threshold_grid(5, 0.0, 1.0);
    CHECK(th.thresholds == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});

    auto iv = make_interval_grid(3, 0.0, 1.0);
    CHECK(iv.bounds.size() == 6);  // pairs with a <= b
    double pt[1] = {0.5};
    CHECK(predict(HypothesisClass{iv}, 1, pt) == 1);  // [0, 0.5]

    auto lin = make_angular_grid(4);
    double xy[2] = {1.0, 0.1};
    CHECK(predict(HypothesisClass{lin}, 0, xy) == 1);   // w = (1,0)
    CHECK(predict(HypothesisClass{lin}, 2, xy) == -1);  // w = (-1,0)

    auto sph = make_spherical_grid(3, 7, 42);
    CHECK(sph.size() == 7);
    for (std::size_t h = 0; h < 7; ++h) {
        double norm = 0;
        for (std::size_t j = 0; j < 3; ++j) norm += sph.directions[h * 3 + j] * sph.directions[h * 3 + j];
        CHECK(norm == Catch::Approx(1.0));
    }

    std::istringstream matrix("1 -1 1\n-1 1 1\n");
    auto ex = parse_class_matrix(matrix, 1);
    CHECK(ex.rows() == 2);
    CHECK(ex.cols == 3);
    double col[1] = {2.0};
    CHECK(predict(HypothesisClass{ex}, 0, col) == 1);

    std::istringstream bad("1 2\n");
    CHECK_THROWS_AS(parse_class_matrix(bad, 1), std::invalid_argument);
}
