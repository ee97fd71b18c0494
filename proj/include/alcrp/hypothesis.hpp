#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace alcrp {

/// Pool of unlabeled points, flat row-major storage. Indices are the stable
/// identity of a point; raw coordinates may repeat.
struct UnlabeledPool {
    std::size_t dim = 1;
    std::vector<double> coords;

    std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }

    std::span<const double> point(std::size_t i) const {
        return {coords.data() + i * dim, dim};
    }

    void push_back(std::span<const double> x) {
        coords.insert(coords.end(), x.begin(), x.end());
    }
};

struct LabeledExample {
    std::size_t index;   // pool column
    std::int8_t label;   // -1 or +1
};

struct LabeledSample {
    std::vector<LabeledExample> items;

    std::size_t size() const { return items.size(); }
    bool empty() const { return items.empty(); }
};

/// Finite hypothesis class over a fixed pool: an H x m matrix of +-1
/// predictions, the VC-dimension parameter used by the sample-size bounds,
/// and the surviving ("active") row indices. Immutable after construction;
/// active-set updates return new values sharing the matrix.
class HypothesisSet {
public:
    HypothesisSet() = default;

    HypothesisSet(std::vector<std::int8_t> cells, std::size_t rows, std::size_t cols, int vc_dim)
        : cells_(std::make_shared<const std::vector<std::int8_t>>(std::move(cells))),
          rows_(rows),
          cols_(cols),
          vc_dim_(vc_dim) {
        if (rows_ * cols_ != cells_->size()) throw std::invalid_argument("prediction matrix shape mismatch");
        if (vc_dim_ < 1) throw std::invalid_argument("vc_dim must be >= 1");
        for (std::int8_t v : *cells_)
            if (v != 1 && v != -1) throw std::invalid_argument("prediction entries must be +-1");
        active_.resize(rows_);
        for (std::size_t h = 0; h < rows_; ++h) active_[h] = h;
    }

    std::int8_t prediction(std::size_t h, std::size_t i) const { return (*cells_)[h * cols_ + i]; }

    std::span<const std::int8_t> row(std::size_t h) const {
        return {cells_->data() + h * cols_, cols_};
    }

    std::size_t num_hypotheses() const { return rows_; }
    std::size_t num_examples() const { return cols_; }
    int vc_dim() const { return vc_dim_; }
    std::span<const std::size_t> active() const { return active_; }

    bool is_active(std::size_t h) const {
        return std::binary_search(active_.begin(), active_.end(), h);
    }

    HypothesisSet with_active(std::vector<std::size_t> active) const {
        for (std::size_t h : active)
            if (h >= rows_) throw std::invalid_argument("active index out of range");
        HypothesisSet out = *this;
        out.active_ = std::move(active);
        std::sort(out.active_.begin(), out.active_.end());
        out.active_.erase(std::unique(out.active_.begin(), out.active_.end()), out.active_.end());
        return out;
    }

    HypothesisSet with_vc_dim(int d) const {
        if (d < 1) throw std::invalid_argument("vc_dim must be >= 1");
        HypothesisSet out = *this;
        out.vc_dim_ = d;
        return out;
    }

private:
    std::shared_ptr<const std::vector<std::int8_t>> cells_;
    std::size_t rows_ = 0, cols_ = 0;
    int vc_dim_ = 1;
    std::vector<std::size_t> active_;
};

/// err_S(h): fraction of S where h's prediction differs from the label.
inline double empirical_error(std::size_t h, const LabeledSample& sample, const HypothesisSet& set) {
    if (sample.empty()) throw std::invalid_argument("empty sample");
    if (!set.is_active(h)) throw std::invalid_argument("unknown hypothesis");
    std::size_t wrong = 0;
    for (const auto& it : sample.items)
        if (set.prediction(h, it.index) != it.label) ++wrong;
    return static_cast<double>(wrong) / static_cast<double>(sample.size());
}

/// rho(h1,h2) restricted to idx: fraction of columns where the rows differ.
inline double empirical_disagreement(std::size_t h1, std::size_t h2,
                                     std::span<const std::size_t> idx, const HypothesisSet& set) {
    if (idx.empty()) throw std::invalid_argument("empty sample");
    std::size_t diff = 0;
    for (std::size_t i : idx)
        if (set.prediction(h1, i) != set.prediction(h2, i)) ++diff;
    return static_cast<double>(diff) / static_cast<double>(idx.size());
}

/// ERM over the active set; ties broken by lowest index.
inline std::size_t erm(const HypothesisSet& set, const LabeledSample& sample) {
    if (set.active().empty()) throw std::invalid_argument("empty hypothesis set");
    if (sample.empty()) throw std::invalid_argument("empty sample");
    std::size_t best = set.active().front();
    std::size_t best_wrong = sample.size() + 1;
    for (std::size_t h : set.active()) {
        std::size_t wrong = 0;
        for (const auto& it : sample.items)
            if (set.prediction(h, it.index) != it.label) ++wrong;
        if (wrong < best_wrong) {
            best_wrong = wrong;
            best = h;
        }
    }
    return best;
}

/// Version space: active hypotheses consistent with every labeled example.
/// An empty sample leaves the set unchanged; the result may be empty.
inline HypothesisSet version_space_update(const HypothesisSet& set, const LabeledSample& sample) {
    if (sample.empty()) return set;
    std::vector<std::size_t> keep;
    keep.reserve(set.active().size());
    for (std::size_t h : set.active()) {
        bool consistent = true;
        for (const auto& it : sample.items) {
            if (set.prediction(h, it.index) != it.label) {
                consistent = false;
                break;
            }
        }
        if (consistent) keep.push_back(h);
    }
    return set.with_active(std::move(keep));
}

/// mask[j] = true iff two active hypotheses disagree on column idx[j].
inline std::vector<std::uint8_t> disagreement_region_mask(const HypothesisSet& set,
                                                          std::span<const std::size_t> idx) {
    if (set.active().empty()) throw std::invalid_argument("empty hypothesis set");
    std::vector<std::uint8_t> mask(idx.size(), 0);
    const std::size_t h0 = set.active().front();
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const std::int8_t ref = set.prediction(h0, idx[j]);
        for (std::size_t h : set.active()) {
            if (set.prediction(h, idx[j]) != ref) {
                mask[j] = 1;
                break;
            }
        }
    }
    return mask;
}

/// B(h*, r): active hypotheses within empirical disagreement r of h_star on idx.
inline HypothesisSet disagreement_ball(const HypothesisSet& set, std::size_t h_star, double r,
                                       std::span<const std::size_t> idx) {
    if (idx.empty()) throw std::invalid_argument("empty sample");
    std::vector<std::size_t> keep;
    for (std::size_t h : set.active())
        if (empirical_disagreement(h, h_star, idx, set) <= r) keep.push_back(h);
    return set.with_active(std::move(keep));
}

struct DichotomyGroup {
    std::size_t representative;  // lowest active index realizing the pattern
    std::size_t multiplicity;
};

/// Groups active rows by their restriction to idx. Deterministic: groups appear
/// in order of first occurrence, so representatives are lowest-index.
inline std::vector<DichotomyGroup> dedupe_by_dichotomy(const HypothesisSet& set,
                                                       std::span<const std::size_t> idx) {
    std::vector<DichotomyGroup> groups;
    std::unordered_map<std::string, std::size_t> seen;
    std::string key(idx.size(), '\0');
    for (std::size_t h : set.active()) {
        for (std::size_t j = 0; j < idx.size(); ++j)
            key[j] = static_cast<char>(set.prediction(h, idx[j]));
        auto [it, inserted] = seen.emplace(key, groups.size());
        if (inserted)
            groups.push_back({h, 1});
        else
            ++groups[it->second].multiplicity;
    }
    return groups;
}

inline std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

}  // namespace alcrp
