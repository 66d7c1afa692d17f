#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "topoflock/dynamics.hpp"
#include "topoflock/estimator.hpp"
#include "topoflock/metric.hpp"
#include "topoflock/spectral.hpp"
#include "topoflock/switching.hpp"

namespace topoflock {

struct RunConfig {
    TopologySet topology_set;
    SwitchPlan plan;
    MetricConfig metric_cfg;
    EstimatorConfig estimator_cfg;
    Eigen::VectorXd x0;
    Eigen::VectorXd v0;
    double t_max = 500.0;
    std::uint64_t seed = 0;
    std::size_t initial_mode = 0;
    std::size_t max_switches = static_cast<std::size_t>(-1);
    double dt_sample = 1e-2;
};

enum class Verdict { AsymptoticProgress, DeltaConsensus, HorizonReached };

std::string_view to_string(Verdict v);

/// One pass of the switching loop: metrics observed at t_k, and the switch
/// they scheduled at t_k + tau.
struct SwitchDecision {
    double t_k = 0.0;
    double F = 0.0;
    double Fdot = 0.0;
    bool fdot_zero_branch = false;
    std::size_t from_mode = 0;
    std::size_t to_mode = 0;
    double switch_time = 0.0;
};

struct RunResult {
    Trace trace;
    std::vector<SwitchDecision> decisions;
    std::size_t switch_count = 0;
    std::optional<double> stopped_at; // nullopt: horizon
    double final_F = 0.0;             // latest global metric seen by the loop guard
    double initial_F = 0.0;
    Verdict verdict = Verdict::HorizonReached;
};

/// Fraction of F(0) below which a horizon-capped run counts as progressing.
inline constexpr double kProgressRatio = 1e-3;

/// Decentralized time-dependent switching loop. While the latest global F
/// exceeds delta, agents report local F_i and Fdot_i at t_k, the estimator
/// returns the global values before t_k + tau_min, and the network switches
/// at t_k + tau_{sigma(t_k)}: to a distinct-eigenvalue mode when Fdot is
/// (numerically) zero, otherwise to the next mode in round-robin order.
/// Throws NoDistinctEigTopology, DimensionMismatch, UnknownMode.
RunResult run_algorithm1(const RunConfig& cfg);

/// Positions and velocities agree to within tol over the last `window` time units.
bool check_second_order_consensus(const Trace& trace, double tol, double window);

/// Earliest sample with F <= delta.
std::pair<bool, double> check_delta_consensus(const Trace& trace, double delta);

/// sum_{i<j} (x_i - x_j)^2 + sum_{i<j} (v_i - v_j)^2.
double lyapunov_V(const Eigen::VectorXd& x, const Eigen::VectorXd& v);

nlohmann::json to_json(const RunResult& result);

} // namespace topoflock
