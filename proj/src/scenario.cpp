#include "topoflock/scenario.hpp"

#include <fstream>
#include <string>

#include "topoflock/error.hpp"

namespace topoflock {

namespace {

Eigen::VectorXd vector_from_json(const nlohmann::json& j, const char* key)
{
    const auto values = j.at(key).get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

} // namespace

Scenario scenario_from_json(const nlohmann::json& j)
{
    Scenario s;
    try {
        s.name = j.value("name", std::string("scenario"));
        for (const auto& t : j.at("topologies"))
            s.topologies.push_back(topology_from_json(t));
        if (s.topologies.empty())
            throw Error(ErrorCode::ParseError, "scenario lists no topologies");
        s.x0 = vector_from_json(j, "x0");
        s.v0 = vector_from_json(j, "v0");
        if (static_cast<std::size_t>(s.x0.size()) != s.topologies.front().size() || s.x0.size() != s.v0.size())
            throw Error(ErrorCode::ParseError, "x0 and v0 must have one entry per agent");

        if (j.contains("plan")) {
            const auto& p = j.at("plan");
            s.plan.tau_hat = p.value("tau_hat", s.plan.tau_hat);
            s.plan.m = p.value("m", s.plan.m);
            if (p.contains("params"))
                s.plan.params = params_from_json(p.at("params"));
        }
        if (j.contains("metric")) {
            const auto& m = j.at("metric");
            s.metric.varpi = m.value("varpi", s.metric.varpi);
            s.metric.delta = m.value("delta", s.metric.delta);
            s.metric.fdot_tol = m.value("fdot_tol", s.metric.fdot_tol);
        }
        s.t_max = j.value("t_max", s.t_max);
        s.dt_sample = j.value("dt_sample", s.dt_sample);
        s.seed = j.value("seed", s.seed);
        const int initial = j.value("initial_mode", 1);
        if (initial < 1 || static_cast<std::size_t>(initial) > s.topologies.size())
            throw Error(ErrorCode::ParseError, "initial_mode must name one of the topologies (1-based)");
        s.initial_mode = static_cast<std::size_t>(initial - 1);
        if (!(s.dt_sample > 0.0) || !(s.t_max > 0.0))
            throw Error(ErrorCode::ParseError, "t_max and dt_sample must be positive");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("scenario: ") + e.what());
    }
    s.estimator = estimator_from_json(j.value("estimator", nlohmann::json::object()), s.topologies.front().size());
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return scenario_from_json(j);
}

nlohmann::json to_json(const Scenario& s)
{
    nlohmann::json topologies = nlohmann::json::array();
    for (const auto& t : s.topologies)
        topologies.push_back(to_json(t));
    nlohmann::json plan = {{"tau_hat", s.plan.tau_hat}, {"m", s.plan.m}};
    if (s.plan.params) {
        const auto& p = *s.plan.params;
        plan["params"] = {{"alpha", p.alpha},     {"beta", p.beta}, {"kappa", p.kappa},
                          {"tau_hat_max", p.tau_hat_max}, {"m", p.m}, {"xi", p.xi}};
    }
    return {
        {"name", s.name},
        {"topologies", std::move(topologies)},
        {"x0", to_std(s.x0)},
        {"v0", to_std(s.v0)},
        {"plan", std::move(plan)},
        {"metric", {{"varpi", s.metric.varpi}, {"delta", s.metric.delta}, {"fdot_tol", s.metric.fdot_tol}}},
        {"estimator", to_json(s.estimator)},
        {"t_max", s.t_max},
        {"dt_sample", s.dt_sample},
        {"seed", s.seed},
        {"initial_mode", s.initial_mode + 1},
    };
}

SwitchPlan plan_for(const Scenario& s, const TopologySet& ts)
{
    const SwitchParams params = s.plan.params ? *s.plan.params : search_params(ts, s.plan.tau_hat, s.plan.m);
    return plan_dwell(ts, params);
}

RunConfig make_run_config(const Scenario& s)
{
    RunConfig cfg;
    cfg.topology_set = validate_topology_set(s.topologies);
    cfg.plan = plan_for(s, cfg.topology_set);
    cfg.metric_cfg = s.metric;
    cfg.estimator_cfg = s.estimator;
    if (cfg.estimator_cfg.mode == EstimatorMode::Simulated)
        cfg.estimator_cfg = tune_gains(cfg.estimator_cfg, cfg.plan.tau_min, cfg.topology_set.agents());
    cfg.x0 = s.x0;
    cfg.v0 = s.v0;
    cfg.t_max = s.t_max;
    cfg.seed = s.seed;
    cfg.initial_mode = s.initial_mode;
    cfg.dt_sample = s.dt_sample;
    return cfg;
}

} // namespace topoflock
