#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "alcrp/hypothesis_classes.hpp"
#include "alcrp/learner.hpp"
#include "alcrp/oracle.hpp"

namespace alcrp {

/// Config problems name the offending field; the CLI maps these to exit 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct EstimateConfig {
    std::string quantity;  // phi | theta | curve
    std::vector<double> r;
    std::vector<double> eta;
    std::size_t pool_size = 10000;
    std::size_t truth_index = 0;
    std::vector<double> eps_grid;
    std::vector<std::string> strategies = {"lp", "dis", "passive"};
};

struct ExperimentConfig {
    HypothesisClass cls;
    Marginal marginal;
    Conditional conditional;
    std::string mode = "realizable";  // realizable | agnostic
    PredictorKind predictor = PredictorKind::lp;
    std::string profile_file;  // predictor = custom
    double eps = 0.1;
    double delta = 0.1;
    double scale = 1.0;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    std::string out_dir;  // optional; --out overrides
    std::optional<EstimateConfig> estimate;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::string& where,
                                const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key \"" + where + it.key() + "\"");
}

inline const json& need(const json& obj, const std::string& where, const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing field \"" + where + key + "\"");
    return *it;
}

template <typename T>
inline T get_as(const json& obj, const std::string& where, const std::string& key) {
    try {
        return need(obj, where, key).get<T>();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("invalid value for \"" + where + key + "\"");
    }
}

template <typename T>
inline T get_or(const json& obj, const std::string& where, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    return get_as<T>(obj, where, key);
}

inline HypothesisClass parse_class(const json& j) {
    if (!j.is_object()) throw ConfigError("invalid value for \"class\"");
    const std::string kind = get_as<std::string>(j, "class.", "kind");
    if (kind == "thresholds") {
        reject_unknown_keys(j, "class.", {"kind", "size", "low", "high", "vc_dim"});
        auto cls = make_threshold_grid(get_as<std::size_t>(j, "class.", "size"),
                                       get_or<double>(j, "class.", "low", 0.0),
                                       get_or<double>(j, "class.", "high", 1.0));
        cls.vc_dim = get_or<int>(j, "class.", "vc_dim", 1);
        return cls;
    }
    if (kind == "intervals") {
        reject_unknown_keys(j, "class.", {"kind", "size", "low", "high", "vc_dim"});
        auto cls = make_interval_grid(get_as<std::size_t>(j, "class.", "size"),
                                      get_or<double>(j, "class.", "low", 0.0),
                                      get_or<double>(j, "class.", "high", 1.0));
        cls.vc_dim = get_or<int>(j, "class.", "vc_dim", 2);
        return cls;
    }
    if (kind == "linear") {
        reject_unknown_keys(j, "class.", {"kind", "dim", "size", "seed", "vc_dim"});
        const auto dim = get_or<std::size_t>(j, "class.", "dim", 2);
        const auto size = get_as<std::size_t>(j, "class.", "size");
        auto cls = dim == 2 ? make_angular_grid(size)
                            : make_spherical_grid(dim, size, get_or<std::uint64_t>(j, "class.", "seed", 1));
        cls.vc_dim = get_or<int>(j, "class.", "vc_dim", static_cast<int>(dim));
        return cls;
    }
    if (kind == "matrix") {
        reject_unknown_keys(j, "class.", {"kind", "file", "vc_dim"});
        return load_class_matrix(get_as<std::string>(j, "class.", "file"),
                                 get_or<int>(j, "class.", "vc_dim", 1));
    }
    throw ConfigError("unknown class.kind \"" + kind + "\"");
}

inline Marginal parse_marginal(const json& j) {
    if (!j.is_object()) throw ConfigError("invalid value for \"oracle.marginal\"");
    const std::string kind = get_as<std::string>(j, "oracle.marginal.", "kind");
    if (kind == "uniform_interval") {
        reject_unknown_keys(j, "oracle.marginal.", {"kind", "low", "high"});
        return UniformIntervalMarginal{get_or<double>(j, "oracle.marginal.", "low", 0.0),
                                       get_or<double>(j, "oracle.marginal.", "high", 1.0)};
    }
    if (kind == "uniform_grid") {
        reject_unknown_keys(j, "oracle.marginal.", {"kind", "size", "low", "high"});
        return UniformGridMarginal{get_as<std::size_t>(j, "oracle.marginal.", "size"),
                                   get_or<double>(j, "oracle.marginal.", "low", 0.0),
                                   get_or<double>(j, "oracle.marginal.", "high", 1.0)};
    }
    if (kind == "gaussian") {
        reject_unknown_keys(j, "oracle.marginal.", {"kind", "dim"});
        return GaussianMarginal{get_as<std::size_t>(j, "oracle.marginal.", "dim")};
    }
    if (kind == "finite_pool") {
        reject_unknown_keys(j, "oracle.marginal.", {"kind", "file", "weights"});
        FinitePoolMarginal m;
        m.pool = load_pool(get_as<std::string>(j, "oracle.marginal.", "file"));
        m.weights = get_or<std::vector<double>>(j, "oracle.marginal.", "weights", {});
        return m;
    }
    throw ConfigError("unknown oracle.marginal.kind \"" + kind + "\"");
}

inline Conditional parse_conditional(const json& j) {
    if (!j.is_object()) throw ConfigError("invalid value for \"oracle.conditional\"");
    const std::string kind = get_as<std::string>(j, "oracle.conditional.", "kind");
    if (kind == "realizable") {
        reject_unknown_keys(j, "oracle.conditional.", {"kind", "truth_index"});
        return RealizableConditional{get_as<std::size_t>(j, "oracle.conditional.", "truth_index")};
    }
    if (kind == "uniform_flip") {
        reject_unknown_keys(j, "oracle.conditional.", {"kind", "truth_index", "rate"});
        return UniformFlipConditional{get_as<std::size_t>(j, "oracle.conditional.", "truth_index"),
                                      get_as<double>(j, "oracle.conditional.", "rate")};
    }
    if (kind == "tsybakov") {
        reject_unknown_keys(j, "oracle.conditional.", {"kind", "t_star", "c0", "kappa"});
        return TsybakovThresholdConditional{get_as<double>(j, "oracle.conditional.", "t_star"),
                                            get_as<double>(j, "oracle.conditional.", "c0"),
                                            get_as<double>(j, "oracle.conditional.", "kappa")};
    }
    throw ConfigError("unknown oracle.conditional.kind \"" + kind + "\"");
}

inline EstimateConfig parse_estimate(const json& j) {
    if (!j.is_object()) throw ConfigError("invalid value for \"estimate\"");
    reject_unknown_keys(j, "estimate.",
                        {"quantity", "r", "eta", "pool_size", "truth_index", "eps_grid", "strategies"});
    EstimateConfig e;
    e.quantity = get_as<std::string>(j, "estimate.", "quantity");
    if (e.quantity != "phi" && e.quantity != "theta" && e.quantity != "curve")
        throw ConfigError("estimate.quantity must be phi, theta or curve");
    e.r = get_or<std::vector<double>>(j, "estimate.", "r", {});
    e.eta = get_or<std::vector<double>>(j, "estimate.", "eta", {});
    e.pool_size = get_or<std::size_t>(j, "estimate.", "pool_size", 10000);
    e.truth_index = get_or<std::size_t>(j, "estimate.", "truth_index", 0);
    e.eps_grid = get_or<std::vector<double>>(j, "estimate.", "eps_grid", {});
    e.strategies =
        get_or<std::vector<std::string>>(j, "estimate.", "strategies", {"lp", "dis", "passive"});
    return e;
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::get_as;
    using detail::get_or;
    if (!j.is_object()) throw ConfigError("config root must be an object");
    detail::reject_unknown_keys(j, "",
                                {"class", "oracle", "mode", "predictor", "profile_file", "eps",
                                 "delta", "scale", "trials", "seed", "out_dir", "estimate"});

    ExperimentConfig cfg;
    cfg.cls = detail::parse_class(detail::need(j, "", "class"));
    const auto& oracle = detail::need(j, "", "oracle");
    if (!oracle.is_object()) throw ConfigError("invalid value for \"oracle\"");
    detail::reject_unknown_keys(oracle, "oracle.", {"marginal", "conditional"});
    cfg.marginal = detail::parse_marginal(detail::need(oracle, "oracle.", "marginal"));
    cfg.conditional = detail::parse_conditional(detail::need(oracle, "oracle.", "conditional"));

    cfg.mode = get_or<std::string>(j, "", "mode", "realizable");
    if (cfg.mode != "realizable" && cfg.mode != "agnostic")
        throw ConfigError("mode must be realizable or agnostic");

    const std::string pred = get_or<std::string>(j, "", "predictor", "lp");
    if (pred == "lp")
        cfg.predictor = PredictorKind::lp;
    else if (pred == "dis")
        cfg.predictor = PredictorKind::dis;
    else if (pred == "custom")
        cfg.predictor = PredictorKind::custom;
    else
        throw ConfigError("predictor must be lp, dis or custom");
    cfg.profile_file = get_or<std::string>(j, "", "profile_file", "");
    if (cfg.predictor == PredictorKind::custom && cfg.profile_file.empty())
        throw ConfigError("missing field \"profile_file\" (required for predictor custom)");

    cfg.eps = get_as<double>(j, "", "eps");
    if (!(cfg.eps > 0.0 && cfg.eps <= 1.0)) throw ConfigError("eps must be in (0,1]");
    cfg.delta = get_as<double>(j, "", "delta");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must be in (0,1)");
    cfg.scale = get_or<double>(j, "", "scale", 1.0);
    if (!(cfg.scale > 0.0)) throw ConfigError("scale must be > 0");
    cfg.trials = get_or<std::size_t>(j, "", "trials", 1);
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    cfg.seed = get_or<std::uint64_t>(j, "", "seed", 1);
    cfg.out_dir = get_or<std::string>(j, "", "out_dir", "");

    if (j.contains("estimate")) cfg.estimate = detail::parse_estimate(j["estimate"]);

    // cross-field checks
    if (cfg.predictor == PredictorKind::custom &&
        !std::holds_alternative<UniformGridMarginal>(cfg.marginal) &&
        !std::holds_alternative<FinitePoolMarginal>(cfg.marginal))
        throw ConfigError("predictor custom requires a finite oracle.marginal (uniform_grid or finite_pool)");
    std::size_t marginal_dim = 1;
    if (const auto* g = std::get_if<GaussianMarginal>(&cfg.marginal)) marginal_dim = g->dim;
    if (const auto* f = std::get_if<FinitePoolMarginal>(&cfg.marginal)) marginal_dim = f->pool.dim;
    if (class_point_dim(cfg.cls) != marginal_dim)
        throw ConfigError("class and oracle.marginal point dimensions differ");
    const std::size_t H = class_size(cfg.cls);
    if (const auto* r = std::get_if<RealizableConditional>(&cfg.conditional); r && r->truth_index >= H)
        throw ConfigError("oracle.conditional.truth_index out of range");
    if (const auto* f = std::get_if<UniformFlipConditional>(&cfg.conditional)) {
        if (f->truth_index >= H) throw ConfigError("oracle.conditional.truth_index out of range");
        if (!(f->rate >= 0.0 && f->rate < 0.5)) throw ConfigError("oracle.conditional.rate must be in [0,0.5)");
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

/// Profile CSV: optional "# ..." comment line, header "index,xi,zeta,gamma".
inline CustomProfile load_custom_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile file: " + path);
    CustomProfile p;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("index", 0) == 0) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
        if (vals.size() != 4) throw ConfigError("profile rows must be index,xi,zeta,gamma");
        p.xi.push_back(vals[1]);
        p.zeta.push_back(vals[2]);
        p.gamma.push_back(vals[3]);
    }
    if (p.gamma.empty()) throw ConfigError("profile file has no rows");
    return p;
}

}  // namespace alcrp
