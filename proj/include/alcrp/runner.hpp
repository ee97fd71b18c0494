#pragma once

#include <atomic>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "alcrp/analysis.hpp"
#include "alcrp/config.hpp"
#include "alcrp/learner.hpp"

namespace alcrp {

using OutputFiles = std::map<std::string, std::string>;

/// Runs the configured trials on a worker pool. Trial t uses the oracle seed
/// derive_seed(cfg.seed, {t}); outputs are merged by trial index, so results
/// do not depend on the worker count.
inline void run_trials(const ExperimentConfig& cfg, std::size_t workers,
                       std::vector<ExperimentReport>& reports, std::vector<std::string>& errors) {
    reports.assign(cfg.trials, {});
    errors.assign(cfg.trials, "");
    CustomProfile profile;
    if (cfg.predictor == PredictorKind::custom) profile = load_custom_profile(cfg.profile_file);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= cfg.trials) return;
            const std::uint64_t trial_seed = derive_seed(cfg.seed, {t});
            try {
                Oracle oracle(OracleSpec{cfg.marginal, cfg.conditional, cfg.cls, trial_seed});
                const CustomProfile* custom =
                    cfg.predictor == PredictorKind::custom ? &profile : nullptr;
                reports[t] = cfg.mode == "realizable"
                                 ? run_realizable(cfg.cls, oracle, cfg.predictor, cfg.eps, cfg.delta,
                                                  cfg.scale, trial_seed, custom)
                                 : run_agnostic(cfg.cls, oracle, cfg.predictor, cfg.eps, cfg.delta,
                                                cfg.scale, trial_seed, custom);
            } catch (const std::exception& e) {
                errors[t] = e.what();
            }
        }
    };

    std::size_t n = workers == 0 ? std::thread::hardware_concurrency() : workers;
    if (n == 0) n = 1;
    n = std::min<std::size_t>(n, cfg.trials);
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

inline OutputFiles generate_run_outputs(const ExperimentConfig& cfg, std::size_t workers = 0) {
    std::vector<ExperimentReport> reports;
    std::vector<std::string> errors;
    run_trials(cfg, workers, reports, errors);
    for (std::size_t t = 0; t < errors.size(); ++t)
        if (!errors[t].empty())
            throw std::runtime_error("trial " + std::to_string(t) + " failed: " + errors[t]);

    OutputFiles files;
    std::ostringstream agg;
    agg << "# alcrp-csv v1 run-aggregate\n";
    agg << "trial,seed,mode,predictor,epochs,total_labels,total_unlabeled,returned_index,"
           "final_error,excess_error,error_stderr,conformant\n";
    std::ostringstream epochs;
    epochs << "# alcrp-csv v1 run-epochs\n";
    epochs << "trial,k,eps_k,delta_k,n_k,phi_k,dis_mass,m_k,v_size,cum_labels\n";
    for (std::size_t t = 0; t < reports.size(); ++t) {
        const auto& r = reports[t];
        agg << t << ',' << derive_seed(cfg.seed, {t}) << ',' << cfg.mode << ','
            << to_string(cfg.predictor) << ',' << r.epochs.size() << ',' << r.total_labels << ','
            << r.total_unlabeled << ',' << r.returned_index << ',' << fmt(r.final_error) << ','
            << fmt(r.excess_error) << ',' << fmt(r.error_stderr) << ','
            << (r.conformant ? "true" : "false") << '\n';
        write_report_csv(epochs, r, t);
        std::ostringstream js;
        write_report_json(js, r);
        char name[32];
        std::snprintf(name, sizeof(name), "trial_%04zu.json", t);
        files[name] = js.str();
    }
    files["aggregate.csv"] = agg.str();
    files["epochs.csv"] = epochs.str();
    return files;
}

inline OutputFiles generate_estimate_outputs(const ExperimentConfig& cfg, const std::string& quantity,
                                             std::size_t workers = 0) {
    if (!cfg.estimate || cfg.estimate->quantity != quantity)
        throw ConfigError("config needs estimate.quantity = " + quantity);
    const auto& est = *cfg.estimate;
    OutputFiles files;

    if (quantity == "curve") {
        if (est.eps_grid.empty()) throw ConfigError("missing field \"estimate.eps_grid\"");
        CurveSettings settings{cfg.cls,      cfg.marginal, cfg.conditional,
                               cfg.mode == "realizable", est.eps_grid, cfg.delta,
                               cfg.scale,    cfg.trials,   cfg.seed,
                               est.strategies};
        const auto cells = label_complexity_curve(settings);
        std::ostringstream out;
        write_curve_csv(out, cells);
        files["curve.csv"] = out.str();
        return files;
    }

    (void)workers;
    Oracle oracle(OracleSpec{cfg.marginal, cfg.conditional, cfg.cls, cfg.seed});
    const auto draw = oracle.draw_unlabeled(est.pool_size);

    if (quantity == "theta") {
        if (est.r.empty()) throw ConfigError("missing field \"estimate.r\"");
        const auto rows = estimate_theta(cfg.cls, est.truth_index, est.r, draw.pool);
        std::ostringstream out;
        write_theta_csv(out, rows, est.pool_size);
        files["theta.csv"] = out.str();
        return files;
    }

    if (est.r.empty()) throw ConfigError("missing field \"estimate.r\"");
    if (est.eta.empty()) throw ConfigError("missing field \"estimate.eta\"");
    std::vector<PhiEstimate> rows;
    for (double r : est.r)
        for (double eta : est.eta)
            rows.push_back(estimate_phi_small(cfg.cls, est.truth_index, r, eta, draw.pool));
    std::ostringstream out;
    write_estimates_csv(out, "phi", rows);
    files["phi.csv"] = out.str();
    return files;
}

inline OutputFiles generate_outputs(const ExperimentConfig& cfg, const std::string& command,
                                    std::size_t workers = 0) {
    if (command == "run") return generate_run_outputs(cfg, workers);
    if (command == "estimate-phi") return generate_estimate_outputs(cfg, "phi", workers);
    if (command == "estimate-theta") return generate_estimate_outputs(cfg, "theta", workers);
    if (command == "curve") return generate_estimate_outputs(cfg, "curve", workers);
    throw std::logic_error("unknown command");
}

}  // namespace alcrp
