#include "topoflock/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "topoflock/error.hpp"

namespace topoflock {

namespace {

std::size_t next_mode(const TopologySet& ts, std::size_t current, bool need_distinct)
{
    const std::size_t s = ts.modes();
    for (std::size_t step = 1; step < s; ++step) {
        const std::size_t candidate = (current + step) % s;
        if (!need_distinct || ts.distinct[candidate])
            return candidate;
    }
    throw Error(ErrorCode::NoDistinctEigTopology,
                "no distinct-eigenvalue mode other than " + std::to_string(current + 1) + " is available");
}

} // namespace

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::AsymptoticProgress: return "asymptotic-progress";
    case Verdict::DeltaConsensus: return "delta-consensus";
    case Verdict::HorizonReached: return "horizon-reached";
    }
    return "unknown";
}

RunResult run_algorithm1(const RunConfig& cfg)
{
    const TopologySet& ts = cfg.topology_set;
    const std::size_t n = ts.agents();
    if (static_cast<std::size_t>(cfg.x0.size()) != n || static_cast<std::size_t>(cfg.v0.size()) != n)
        throw Error(ErrorCode::DimensionMismatch, "initial state size does not match the topology set");
    if (cfg.plan.dwell.size() != ts.modes())
        throw Error(ErrorCode::DimensionMismatch, "plan and topology set disagree on the number of modes");
    if (cfg.initial_mode >= ts.modes())
        throw Error(ErrorCode::UnknownMode, "initial mode out of range");
    if (!(cfg.metric_cfg.delta >= 0.0) || !(cfg.t_max > 0.0))
        throw Error(ErrorCode::InvalidParams, "delta must be nonnegative and t_max positive");

    const double varpi = cfg.metric_cfg.varpi;
    const double tau_min = cfg.plan.tau_min;
    const SystemState initial{0.0, cfg.x0, cfg.v0, cfg.initial_mode};

    RunResult result;
    SwitchingSignal sigma{{0.0, cfg.initial_mode}};

    FluctuationState f = to_fluctuations(initial, initial);
    std::size_t mode = cfg.initial_mode;
    double t_k = 0.0;

    // Input to the loop: the global metric at t_{k-1} = 0.
    double guard_F = estimate_global_metrics(metric_F_locals(f, varpi),
                                             metric_Fdot_locals(f, ts.topologies[mode], varpi),
                                             cfg.estimator_cfg, tau_min)
                         .first;
    result.initial_F = guard_F;

    while (guard_F > cfg.metric_cfg.delta && t_k < cfg.t_max && result.switch_count < cfg.max_switches) {
        const auto [F, Fdot] = estimate_global_metrics(metric_F_locals(f, varpi),
                                                       metric_Fdot_locals(f, ts.topologies[mode], varpi),
                                                       cfg.estimator_cfg, tau_min);
        const bool flat = std::abs(Fdot) <= cfg.metric_cfg.fdot_tol * std::max(1.0, F);
        const std::size_t target = next_mode(ts, mode, flat);
        const double dwell = cfg.plan.dwell[mode];
        const double t_next = t_k + dwell;

        result.decisions.push_back({t_k, F, Fdot, flat, mode, target, t_next});

        f = closed_form_propagate(f, ts.spectra[mode], dwell);
        f.t = t_next;
        sigma.push_back({t_next, target});
        ++result.switch_count;

        guard_F = F;
        t_k = t_next;
        mode = target;
    }

    result.final_F = guard_F;
    if (guard_F <= cfg.metric_cfg.delta) {
        result.stopped_at = t_k;
        result.verdict = Verdict::DeltaConsensus;
    } else {
        const double now_F = metric_F(f, varpi);
        result.verdict = now_F < kProgressRatio * result.initial_F ? Verdict::AsymptoticProgress : Verdict::HorizonReached;
    }

    SimulationOptions sim;
    sim.dt_sample = cfg.dt_sample;
    sim.varpi = varpi;
    result.trace = simulate_switched(ts, sigma, cfg.x0, cfg.v0, t_k, sim);
    return result;
}

bool check_second_order_consensus(const Trace& trace, double tol, double window)
{
    if (trace.samples.empty())
        return false;
    const double t_last = trace.samples.back().t;
    for (const auto& s : trace.samples) {
        if (s.t < t_last - window)
            continue;
        if (s.x.maxCoeff() - s.x.minCoeff() > tol || s.v.maxCoeff() - s.v.minCoeff() > tol)
            return false;
    }
    return true;
}

std::pair<bool, double> check_delta_consensus(const Trace& trace, double delta)
{
    for (const auto& s : trace.samples)
        if (s.F <= delta)
            return {true, s.t};
    return {false, 0.0};
}

double lyapunov_V(const Eigen::VectorXd& x, const Eigen::VectorXd& v)
{
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        for (Eigen::Index j = i + 1; j < x.size(); ++j) {
            const double dx = x(i) - x(j);
            const double dv = v(i) - v(j);
            total += dx * dx + dv * dv;
        }
    }
    return total;
}

nlohmann::json to_json(const RunResult& result)
{
    nlohmann::json decisions = nlohmann::json::array();
    for (const auto& d : result.decisions) {
        decisions.push_back({{"t_k", d.t_k},
                             {"F", d.F},
                             {"Fdot", d.Fdot},
                             {"fdot_zero_branch", d.fdot_zero_branch},
                             {"from", d.from_mode + 1},
                             {"to", d.to_mode + 1},
                             {"switch_time", d.switch_time}});
    }
    nlohmann::json out = {
        {"verdict", std::string(to_string(result.verdict))},
        {"switch_count", result.switch_count},
        {"initial_F", result.initial_F},
        {"final_F", result.final_F},
        {"decisions", std::move(decisions)},
    };
    if (result.stopped_at)
        out["stopped_at"] = *result.stopped_at;
    else
        out["stopped_at"] = "horizon";
    if (!result.trace.samples.empty()) {
        const auto& last = result.trace.samples.back();
        out["final_V"] = lyapunov_V(last.x, last.v);
    }
    return out;
}

} // namespace topoflock
