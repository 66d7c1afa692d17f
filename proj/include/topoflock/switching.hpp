#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "topoflock/dynamics.hpp"
#include "topoflock/spectral.hpp"

namespace topoflock {

/// Strict inequalities must hold with at least this much slack.
inline constexpr double kStrictSlack = 1e-12;

/// Scalars of the dwell-time strategy. Dwell in mode r is
/// tau_hat_max + m * T_r / 2.
struct SwitchParams {
    double alpha = 0.0;
    double beta = 0.0;
    int kappa = 1;
    double tau_hat_max = 0.0;
    int m = 1;
    double xi = 0.0;
};

/// One inequality `lhs < rhs`, recorded as slack = lhs - rhs (negative when it holds).
struct Inequality {
    std::string name;
    double slack = 0.0;

    bool holds() const noexcept { return slack < -kStrictSlack; }
};

struct SwitchPlan {
    std::vector<double> dwell; // per mode
    SwitchParams params;
    double tau_min = 0.0;
    double tau_max = 0.0;
    std::vector<Inequality> inequalities;
};

/// max over modes and eigenvalues of max(1 - lambda_i, lambda_i - 1).
double compute_xi(const TopologySet& ts);

/// The lower bound (beta^{-1/kappa} - 1) * kappa / (alpha - xi) every dwell must exceed.
double dwell_lower_bound(const SwitchParams& p);

/// Builds the plan after checking the admissibility inequalities on
/// (alpha, beta, kappa, tau_hat_max, m) in the order xi < alpha,
/// 0 < tau_hat_max < -ln(beta)/alpha, dwell > lower bound.
/// Throws InvalidParams, AlphaBelowXi, DecayWindowViolated, DwellBoundViolated.
SwitchPlan plan_dwell(const TopologySet& ts, const SwitchParams& params);

struct SearchOptions {
    double margin = 0.05;
    double alpha_growth = 1.5;
    int alpha_steps = 80;
    int max_kappa = 64;
};

/// Feasibility search: alpha starts at xi (1 + margin) and grows
/// geometrically; beta = exp(-alpha tau_hat (1 + margin)); kappa swept
/// 1..max_kappa. Throws NoFeasibleParams with the tightest slack found.
SwitchParams search_params(const TopologySet& ts, double target_tau_hat, int m, const SearchOptions& opts = {});

struct CertificateEntry {
    std::string form; // "ramp-growth", "ramp-decay", "steady" or "jump"
    std::size_t mode = 0;
    std::size_t eigen_index = 0;
    int sign = 1;
    double slack = 0.0;

    bool holds() const noexcept { return slack < -kStrictSlack; }
};

struct CertificateReport {
    std::vector<CertificateEntry> entries;

    bool passed() const;
    std::vector<CertificateEntry> failures() const;
    /// Throws CertificateFailed listing every violated entry.
    void require() const;
};

/// Scalar form of the Lyapunov matrix inequalities for the diagonal choice
/// P_{r,q} = beta^{-q/kappa} h I, evaluated at every mode, eigenvalue and sign.
CertificateReport check_certificate(const TopologySet& ts, const SwitchParams& params, double tau_min);

/// g(beta) = exp(kappa (1 - beta^{-1/kappa})) - beta.
double contradiction_function(int kappa, double beta);

struct ContradictionReport {
    int kappa = 1;
    std::size_t samples = 0;
    double max_value = 0.0;   // largest g on the grid
    double min_value = 0.0;
    double beta_star = 0.0;   // analytic minimizer
    double g_star = 0.0;
    double g_star_closed = 0.0; // beta* (beta*^{1/kappa} - 1)
    double g_low = 0.0;       // g at the lower grid end
    double g_high = 0.0;      // g at the upper grid end
    bool passed = false;
};

/// Evaluates g on `grid` uniform samples of [lo, hi] and at its analytic
/// extremum; passes iff every sample is strictly negative and both ends are
/// within end_tol of zero.
ContradictionReport verify_contradiction(int kappa, std::size_t grid, double lo = 1e-3, double hi = 0.999, double end_tol = 1e-3);

/// Cyclic switching signal over [0, t_end] following mode_order (0-based)
/// with gaps equal to the dwell of the departing mode.
/// Throws RepeatedConsecutiveMode, UnknownMode, InvalidParams.
SwitchingSignal make_signal(const SwitchPlan& plan, const std::vector<std::size_t>& mode_order, double t_end);

nlohmann::json to_json(const SwitchPlan& plan);
SwitchParams params_from_json(const nlohmann::json& j);

} // namespace topoflock
