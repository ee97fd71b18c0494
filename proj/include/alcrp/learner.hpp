#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "alcrp/crp.hpp"
#include "alcrp/hypothesis.hpp"
#include "alcrp/hypothesis_classes.hpp"
#include "alcrp/io.hpp"
#include "alcrp/oracle.hpp"
#include "alcrp/query.hpp"
#include "alcrp/rng.hpp"

namespace alcrp {

enum class PredictorKind { lp, dis, custom };

inline const char* to_string(PredictorKind k) {
    switch (k) {
        case PredictorKind::lp: return "lp";
        case PredictorKind::dis: return "dis";
        case PredictorKind::custom: return "custom";
    }
    return "?";
}

/// Fixed profile keyed by finite-pool source index; lets an externally
/// supplied confidence-rated predictor drive the loop.
struct CustomProfile {
    std::vector<double> xi, zeta, gamma;
};

struct EpochState {
    std::size_t k;
    double eps_k, delta_k;
    std::size_t n_k;      // unlabeled sample size
    double phi_k;         // abstention rate
    double dis_mass;      // disagreement-region mass of V_k on U_k
    std::uint64_t m_k;    // labels requested this epoch
    std::size_t v_size;   // |active| entering the epoch
};

struct ExperimentReport {
    std::vector<EpochState> epochs;
    std::vector<std::size_t> final_active;  // V_{k0+1}
    std::size_t returned_index = 0;
    std::uint64_t total_labels = 0;
    std::uint64_t total_unlabeled = 0;
    double final_error = 0.0;
    double excess_error = 0.0;
    double error_stderr = 0.0;
    bool conformant = true;  // false when an adaptive query hit its round cap
};

struct EpochTarget {
    double eps_k, delta_k;
    std::size_t n_k;
};

/// k = 1..k0 with k0 = ceil(log2(1/eps)); eps_k = eps 2^(k0-k+1),
/// delta_k = delta / (2 (k0-k+1)^2), n_k = 192 (256/eps_k)^2 (d ln(256/eps_k)
/// + ln(288/delta_k)), scaled and rounded up.
inline std::vector<EpochTarget> epoch_schedule(double eps, double delta, int d, double scale) {
    if (eps <= 0.0 || eps > 1.0) throw std::invalid_argument("invalid target");
    if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("invalid target");
    if (scale <= 0.0 || d < 1) throw std::invalid_argument("invalid target");
    const int k0 = static_cast<int>(std::ceil(std::log2(1.0 / eps)));
    std::vector<EpochTarget> out;
    for (int k = 1; k <= k0; ++k) {
        const double eps_k = eps * std::pow(2.0, k0 - k + 1);
        const double delta_k = delta / (2.0 * std::pow(static_cast<double>(k0 - k + 1), 2.0));
        const double ratio = 256.0 / eps_k;
        const double n_raw =
            scale * 192.0 * ratio * ratio * (static_cast<double>(d) * std::log(ratio) + std::log(288.0 / delta_k));
        out.push_back({eps_k, delta_k, static_cast<std::size_t>(std::ceil(n_raw))});
    }
    return out;
}

namespace detail {

constexpr std::uint64_t kQueryTag = 0x9C;

inline AbstentionProfile run_predictor(PredictorKind kind, const HypothesisSet& set, double eta,
                                       const DrawResult& draw, const CustomProfile* custom) {
    switch (kind) {
        case PredictorKind::lp:
            return solve_crp(set, eta);
        case PredictorKind::dis:
            return dis_abstain_predictor(set);
        case PredictorKind::custom: {
            if (custom == nullptr) throw std::invalid_argument("custom predictor requires a profile");
            if (draw.source_index.empty())
                throw std::invalid_argument("custom predictor requires a finite-pool oracle");
            AbstentionProfile p;
            const std::size_t m = draw.pool.size();
            p.xi.resize(m);
            p.zeta.resize(m);
            p.gamma.resize(m);
            double mass = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t s = draw.source_index[i];
                if (s >= custom->gamma.size())
                    throw std::invalid_argument("profile file does not cover the oracle pool");
                p.xi[i] = custom->xi[s];
                p.zeta[i] = custom->zeta[s];
                p.gamma[i] = custom->gamma[s];
                mass += p.gamma[i];
            }
            p.phi = m == 0 ? 0.0 : mass / static_cast<double>(m);
            return p;
        }
    }
    throw std::logic_error("unreachable");
}

inline void finalize_report(ExperimentReport& rep, const std::vector<std::size_t>& active,
                            Oracle& oracle) {
    rep.final_active = active;
    rep.returned_index = active.front();  // arbitrary survivor: lowest index
    const auto excess = oracle.true_excess_error(rep.returned_index);
    rep.excess_error = excess.value;
    rep.error_stderr = excess.stderr_;
    rep.final_error = excess.value + oracle.best_error();
}

inline double dis_region_mass(const HypothesisSet& set) {
    const auto idx = all_indices(set.num_examples());
    const auto mask = disagreement_region_mask(set, idx);
    std::size_t count = 0;
    for (auto b : mask) count += b;
    return static_cast<double>(count) / static_cast<double>(set.num_examples());
}

}  // namespace detail

/// Realizable branch: per epoch, run the predictor at eta = eps_k/64 on a
/// fresh unlabeled sample, draw m_k = 768 phi_k/eps_k (d ln(768 phi_k/eps_k)
/// + ln(48/delta_k)) labels (scaled, rounded up) from the abstention
/// distribution, and keep the consistent hypotheses.
inline ExperimentReport run_realizable(const HypothesisClass& cls, Oracle& oracle,
                                       PredictorKind predictor, double eps, double delta,
                                       double scale, std::uint64_t run_seed,
                                       const CustomProfile* custom = nullptr) {
    const auto schedule = epoch_schedule(eps, delta, class_vc_dim(cls), scale);
    std::vector<std::size_t> active = all_indices(class_size(cls));
    ExperimentReport rep;
    const std::uint64_t budget0 = oracle.budget();

    for (std::size_t e = 0; e < schedule.size(); ++e) {
        const auto& tgt = schedule[e];
        const std::size_t k = e + 1;
        EpochState st{k, tgt.eps_k, tgt.delta_k, tgt.n_k, 0.0, 0.0, 0, active.size()};

        auto draw = oracle.draw_unlabeled(tgt.n_k);
        rep.total_unlabeled += tgt.n_k;
        const HypothesisSet V = predictions_on_pool(cls, draw.pool).with_active(active);
        const auto profile = detail::run_predictor(predictor, V, tgt.eps_k / 64.0, draw, custom);
        st.phi_k = profile.phi;
        st.dis_mass = detail::dis_region_mass(V);

        if (profile.phi >= 1e-12) {
            const double ratio = 768.0 * profile.phi / tgt.eps_k;
            const double m_raw = scale * ratio * (static_cast<double>(V.vc_dim()) * std::log(ratio) +
                                                  std::log(48.0 / tgt.delta_k));
            const auto m_k = m_raw > 0.0 ? static_cast<std::uint64_t>(std::ceil(m_raw)) : 0;
            st.m_k = m_k;
            if (m_k > 0) {
                RngStream qrng(derive_seed(run_seed, {detail::kQueryTag, k}));
                const auto drawn_idx = sample_queries(profile, m_k, qrng);
                LabeledSample S;
                S.items.reserve(drawn_idx.size());
                for (std::size_t i : drawn_idx)
                    S.items.push_back({i, oracle.query_label(draw.pool.point(i))});
                const HypothesisSet next = version_space_update(V, S);
                if (next.active().empty()) throw std::runtime_error("inconsistent realizable run");
                active.assign(next.active().begin(), next.active().end());
            }
        }
        rep.epochs.push_back(st);
        rep.total_labels += st.m_k;
    }

    if (rep.total_labels != oracle.budget() - budget0)
        throw std::logic_error("label accounting mismatch");
    detail::finalize_report(rep, active, oracle);
    return rep;
}

/// Agnostic branch: per epoch, the adaptive query procedure runs over the
/// abstention distribution with target excess eps_k / (8 phi_k) and
/// confidence delta_k / 2. phi_k = 0 skips the query and carries V forward.
inline ExperimentReport run_agnostic(const HypothesisClass& cls, Oracle& oracle,
                                     PredictorKind predictor, double eps, double delta, double scale,
                                     std::uint64_t run_seed, const CustomProfile* custom = nullptr,
                                     std::size_t j_cap = 24) {
    const auto schedule = epoch_schedule(eps, delta, class_vc_dim(cls), scale);
    std::vector<std::size_t> active = all_indices(class_size(cls));
    ExperimentReport rep;
    const std::uint64_t budget0 = oracle.budget();

    for (std::size_t e = 0; e < schedule.size(); ++e) {
        const auto& tgt = schedule[e];
        const std::size_t k = e + 1;
        EpochState st{k, tgt.eps_k, tgt.delta_k, tgt.n_k, 0.0, 0.0, 0, active.size()};

        auto draw = oracle.draw_unlabeled(tgt.n_k);
        rep.total_unlabeled += tgt.n_k;
        const HypothesisSet V = predictions_on_pool(cls, draw.pool).with_active(active);
        const auto profile = detail::run_predictor(predictor, V, tgt.eps_k / 64.0, draw, custom);
        st.phi_k = profile.phi;
        st.dis_mass = detail::dis_region_mass(V);

        if (profile.phi >= 1e-12) {
            RngStream qrng(derive_seed(run_seed, {detail::kQueryTag, k}));
            const auto res = adaptive_label_query(V, profile.gamma, draw.pool, oracle,
                                                  tgt.eps_k / (8.0 * profile.phi), tgt.delta_k / 2.0,
                                                  qrng, j_cap);
            rep.conformant = rep.conformant && res.conformant;
            st.m_k = res.labels_used;
            active = res.surviving;
        }
        rep.epochs.push_back(st);
        rep.total_labels += st.m_k;
    }

    if (rep.total_labels != oracle.budget() - budget0)
        throw std::logic_error("label accounting mismatch");
    detail::finalize_report(rep, active, oracle);
    return rep;
}

/// Passive baseline: ERM over n labeled i.i.d. draws from the marginal.
inline std::size_t run_passive(const HypothesisClass& cls, Oracle& oracle, std::size_t n) {
    if (n < 1) throw std::invalid_argument("invalid target");
    auto draw = oracle.draw_unlabeled(n);
    const HypothesisSet all = predictions_on_pool(cls, draw.pool);
    LabeledSample S;
    S.items.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        S.items.push_back({i, oracle.query_label(draw.pool.point(i))});
    return erm(all, S);
}

inline void write_report_csv(std::ostream& out, const ExperimentReport& rep, std::size_t trial) {
    std::uint64_t cum = 0;
    for (const auto& st : rep.epochs) {
        cum += st.m_k;
        out << trial << ',' << st.k << ',' << fmt(st.eps_k) << ',' << fmt(st.delta_k) << ','
            << st.n_k << ',' << fmt(st.phi_k) << ',' << fmt(st.dis_mass) << ',' << st.m_k << ','
            << st.v_size << ',' << cum << '\n';
    }
}

inline void write_report_json(std::ostream& out, const ExperimentReport& rep) {
    out << "{\n  \"epochs\": [";
    for (std::size_t i = 0; i < rep.epochs.size(); ++i) {
        const auto& st = rep.epochs[i];
        out << (i ? ",\n    " : "\n    ") << "{\"k\": " << st.k << ", \"eps_k\": " << fmt(st.eps_k)
            << ", \"delta_k\": " << fmt(st.delta_k) << ", \"n_k\": " << st.n_k
            << ", \"phi_k\": " << fmt(st.phi_k) << ", \"dis_mass\": " << fmt(st.dis_mass)
            << ", \"m_k\": " << st.m_k
            << ", \"v_size\": " << st.v_size << "}";
    }
    out << "\n  ],\n";
    out << "  \"final_active\": [";
    for (std::size_t i = 0; i < rep.final_active.size(); ++i)
        out << (i ? ", " : "") << rep.final_active[i];
    out << "],\n";
    out << "  \"returned_index\": " << rep.returned_index << ",\n";
    out << "  \"total_labels\": " << rep.total_labels << ",\n";
    out << "  \"total_unlabeled\": " << rep.total_unlabeled << ",\n";
    out << "  \"final_error\": " << fmt(rep.final_error) << ",\n";
    out << "  \"excess_error\": " << fmt(rep.excess_error) << ",\n";
    out << "  \"error_stderr\": " << fmt(rep.error_stderr) << ",\n";
    out << "  \"conformant\": " << (rep.conformant ? "true" : "false") << "\n}\n";
}

}  // namespace alcrp
