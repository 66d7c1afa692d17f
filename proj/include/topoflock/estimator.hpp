#pragma once

#include <cstddef>
#include <utility>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "topoflock/graph.hpp"

namespace topoflock {

enum class EstimatorMode { Ideal, Simulated };

/// Finite-time average-consensus protocol
///   r_i' = at * sum_j b_ij sig(r_j - r_i)^{mbar/nbar} + bt * sum_j b_ij sig(r_j - r_i)^{pbar/qbar}
/// where sig(u)^e = sign(u) |u|^e and all four exponent integers are odd.
struct EstimatorConfig {
    double alpha_t = 1.0;
    double beta_t = 1.0;
    int mbar = 3;
    int nbar = 1;
    int pbar = 1;
    int qbar = 3;
    Topology comm_graph; // unweighted: b_ij in {0, 1}
    EstimatorMode mode = EstimatorMode::Ideal;
    double h = 1e-4;
};

/// Unweighted complete graph on n agents.
Topology complete_graph(std::size_t n);

/// Throws NonOddExponents, Disconnected, InvalidParams.
void validate(const EstimatorConfig& cfg);

/// Upper bound on the settling time:
/// (1/lambda_2(L_A)) (n^{(mbar-nbar)/(2 nbar)} / at * nbar/(mbar-nbar) + 1/bt * qbar/(qbar-pbar)).
double settling_time_bound(const EstimatorConfig& cfg, std::size_t n);

/// Scales both gains by max(1, bound / tau_min) * (1 + margin) so that the
/// settling bound drops below tau_min.
EstimatorConfig tune_gains(EstimatorConfig cfg, double tau_min, std::size_t n, double margin = 0.1);

struct EstimatorRun {
    Eigen::VectorXd r;
    double max_mean_drift = 0.0; // max |mean(r(t)) - mean(r0)| over the run
    std::size_t steps = 0;
};

/// Differences below this magnitude contribute nothing to the sublinear term.
inline constexpr double kSublinearCutoff = 1e-14;

/// Integrates the protocol with RK4 over [0, t_run]. Steps are at most h and
/// are shortened near consensus so that no step overshoots the sublinear
/// coupling (the flow is not Lipschitz at agreement).
EstimatorRun run_estimator(const EstimatorConfig& cfg, const Eigen::VectorXd& r0, double t_run, double h);

/// Global F and Fdot from per-agent shares: the plain sums in Ideal mode, or
/// n times agent 1's estimator output after tau_min in Simulated mode.
std::pair<double, double> estimate_global_metrics(const Eigen::VectorXd& F_locals, const Eigen::VectorXd& Fdot_locals,
                                                  const EstimatorConfig& cfg, double tau_min);

/// Reads the "estimator" scenario block; a missing "comm_graph" means the
/// complete graph on n agents.
EstimatorConfig estimator_from_json(const nlohmann::json& j, std::size_t n);
nlohmann::json to_json(const EstimatorConfig& cfg);

} // namespace topoflock
