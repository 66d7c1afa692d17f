#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "topoflock/estimator.hpp"
#include "topoflock/graph.hpp"
#include "topoflock/metric.hpp"
#include "topoflock/orchestrator.hpp"
#include "topoflock/switching.hpp"

namespace topoflock {

/// How a scenario fixes the switching parameters: either a search target
/// (tau_hat, m) or explicit parameters.
struct PlanDirective {
    double tau_hat = 0.5;
    int m = 1;
    std::optional<SwitchParams> params;
};

struct Scenario {
    std::string name;
    std::vector<Topology> topologies;
    Eigen::VectorXd x0;
    Eigen::VectorXd v0;
    PlanDirective plan;
    MetricConfig metric;
    EstimatorConfig estimator;
    double t_max = 500.0;
    double dt_sample = 1e-2;
    std::uint64_t seed = 0;
    std::size_t initial_mode = 0; // 0-based; written 1-based in JSON
};

/// Throws ParseError on malformed input or missing keys.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const Scenario& s);

/// Validates the topology set, then searches (or checks) the switching
/// parameters and builds the dwell plan.
SwitchPlan plan_for(const Scenario& s, const TopologySet& ts);

/// Everything run_algorithm1 needs; estimator gains are tuned to the plan's tau_min.
RunConfig make_run_config(const Scenario& s);

} // namespace topoflock
