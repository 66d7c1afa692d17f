// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion, exit 1 if any fails
//   acceptance --only N   run criterion N alone

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "topoflock/dynamics.hpp"
#include "topoflock/error.hpp"
#include "topoflock/estimator.hpp"
#include "topoflock/metric.hpp"
#include "topoflock/orchestrator.hpp"
#include "topoflock/spectral.hpp"
#include "topoflock/switching.hpp"

using namespace topoflock;
using namespace topoflock::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> check;
};

std::string fmt(const char* pattern, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FluctuationState fluctuation_of(const Eigen::VectorXd& x, const Eigen::VectorXd& v)
{
    const SystemState s{0.0, x, v, 0};
    return to_fluctuations(s, s);
}

FluctuationState random_fluctuation(std::mt19937_64& rng, Eigen::Index n)
{
    return fluctuation_of(zero_mean(rng, n), zero_mean(rng, n));
}

double V_of(const FluctuationState& f) { return lyapunov_V(f.xt, f.vt); }

double relative_variance(const std::vector<double>& xs)
{
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs)
        var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return var / (mean * mean);
}

double cofactor_det(const Eigen::MatrixXd& m)
{
    const auto n = m.rows();
    if (n == 1)
        return m(0, 0);
    double det = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::MatrixXd minor(n - 1, n - 1);
        for (Eigen::Index r = 1; r < n; ++r)
            for (Eigen::Index k = 0, col = 0; k < n; ++k)
                if (k != c)
                    minor(r - 1, col++) = m(r, k);
        det += (c % 2 == 0 ? 1.0 : -1.0) * m(0, c) * cofactor_det(minor);
    }
    return det;
}

// State of the planned alternation at time t, propagated mode by mode.
FluctuationState alternate(const TopologySet& ts, const SwitchPlan& plan, FluctuationState f, double t_end)
{
    double t = 0.0;
    std::size_t mode = 0;
    while (t < t_end) {
        const double dt = std::min(plan.dwell[mode], t_end - t);
        f = closed_form_propagate(f, ts.spectra[mode], dt);
        t += dt;
        mode = (mode + 1) % ts.modes();
    }
    return f;
}

// 1 ------------------------------------------------------------------------
Outcome spectra()
{
    const std::vector<Topology> set = unit_star_set();
    const std::vector<Eigen::Vector4d> expected{{0, 1, 1, 4}, {0, 1, 4, 9}};
    double worst_err = 0.0, worst_ms = 0.0;
    for (std::size_t r = 0; r < 2; ++r) {
        constexpr int reps = 200;
        SpectralData sd;
        const auto t0 = std::chrono::steady_clock::now();
        for (int k = 0; k < reps; ++k)
            sd = eigendecompose(set[r]);
        worst_ms = std::max(worst_ms, 1e3 * seconds_since(t0) / reps);
        worst_err = std::max(worst_err, (sd.eigenvalues - expected[r]).cwiseAbs().maxCoeff());
    }
    return {worst_err <= 1e-9 && worst_ms < 1.0, fmt("max error %.3g, mean time %.4f ms", worst_err, worst_ms)};
}

// 2 ------------------------------------------------------------------------
Outcome periods()
{
    const TopologySet ts = validate_topology_set(unit_star_set());
    bool ok = true;
    std::string detail;
    for (const Period& p : ts.periods) {
        const double err = std::abs(p.value - 2 * std::numbers::pi);
        const bool integer = p.multiple.den == 1 && p.multiple.num == 1;
        ok = ok && integer && err <= 1e-12;
        detail += fmt("T = %lld/%lld x base, |T - 2pi| = %.3g; ", static_cast<long long>(p.multiple.num),
                      static_cast<long long>(p.multiple.den), err);
    }
    return {ok, detail};
}

// 3 ------------------------------------------------------------------------
Outcome fixed_topology_oscillation()
{
    const auto t0 = std::chrono::steady_clock::now();
    const TopologySet ts = validate_topology_set(heavy_star_set());
    const SpectralData& sd = ts.spectra[1];
    const double T = ts.periods[1].value;
    const FluctuationState f0 = fluctuation_of(reference_initial(), reference_initial());
    const double V0 = V_of(f0);

    double worst_rel = 0.0, min_V = V0;
    const double dt = 1e-3;
    for (int k = 0; k * dt <= 5.0; ++k) {
        const double t = k * dt;
        const double Vt = V_of(closed_form_propagate(f0, sd, t));
        min_V = std::min(min_V, Vt);
        if (t + T <= 5.0) {
            const double VT = V_of(closed_form_propagate(f0, sd, t + T));
            worst_rel = std::max(worst_rel, std::abs(VT - Vt) / Vt);
        }
    }
    const double secs = seconds_since(t0);
    return {worst_rel <= 1e-6 && min_V > 0.1 * V0 && secs < 5.0,
            fmt("period %.6f, max |V(t+T)-V(t)|/V(t) = %.3g, min V / V0 = %.4f, %.2f s", T, worst_rel, min_V / V0, secs)};
}

// 4 ------------------------------------------------------------------------
Outcome switched_consensus()
{
    const auto t0 = std::chrono::steady_clock::now();
    const TopologySet ts = validate_topology_set(unit_star_set());
    const SwitchPlan plan = plan_dwell(ts, search_params(ts, 0.5, 1));

    const FluctuationState ref = fluctuation_of(reference_initial(), reference_initial());
    const double ratio_ref = V_of(alternate(ts, plan, ref, 200.0)) / V_of(ref);

    std::mt19937_64 rng(2024);
    double worst_random = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const FluctuationState f = random_fluctuation(rng, 4);
        worst_random = std::max(worst_random, V_of(alternate(ts, plan, f, 200.0)) / V_of(f));
    }
    const double secs = seconds_since(t0);
    return {ratio_ref < 1e-3 && worst_random < 1e-2 && secs < 10.0,
            fmt("dwell %.6f; V(200)/V(0) = %.4g (reference), worst random %.4g; %.2f s", plan.tau_min, ratio_ref,
                worst_random, secs)};
}

// 5 ------------------------------------------------------------------------
Outcome delta_consensus()
{
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg;
    cfg.topology_set = validate_topology_set(unit_star_set());
    cfg.plan = plan_dwell(cfg.topology_set, search_params(cfg.topology_set, 0.5, 1));
    cfg.metric_cfg = MetricConfig{0.5, 0.2, 1e-9};
    cfg.estimator_cfg.comm_graph = complete_graph(4);
    cfg.x0 = reference_initial();
    cfg.v0 = reference_initial();
    cfg.t_max = 1e9;
    cfg.max_switches = 200;
    const RunResult res = run_algorithm1(cfg);
    double min_F = res.initial_F;
    for (const auto& d : res.decisions)
        min_F = std::min(min_F, d.F);
    const double secs = seconds_since(t0);
    const bool ok = res.verdict == Verdict::DeltaConsensus && res.final_F <= 0.2 && res.switch_count <= 200 && secs < 30.0;
    return {ok, fmt("verdict %s after %zu switches, final F %.4g, smallest F at a switch %.4g; %.2f s",
                    std::string(to_string(res.verdict)).c_str(), res.switch_count, res.final_F, min_F, secs)};
}

// 6 ------------------------------------------------------------------------
Outcome contradiction()
{
    bool ok = true;
    std::string detail;
    for (int kappa : {1, 2, 4, 8, 16}) {
        const ContradictionReport r = verify_contradiction(kappa, 10000, 1e-3, 0.999, 1e-3);
        ok = ok && r.passed;
        detail += fmt("k=%d max %.3g ends (%.3g, %.3g); ", kappa, r.max_value, r.g_low, r.g_high);
    }
    return {ok, detail};
}

// 7 ------------------------------------------------------------------------
Outcome certificates()
{
    const TopologySet ts = validate_topology_set(unit_star_set());
    std::size_t plans = 0, entries = 0;
    double worst = -1e300;
    bool ok = true;
    for (double tau_hat : {0.1, 0.5, 1.0, 2.0}) {
        for (int m : {1, 2, 3}) {
            const SwitchPlan plan = plan_dwell(ts, search_params(ts, tau_hat, m));
            const CertificateReport rep = check_certificate(ts, plan.params, plan.tau_min);
            ++plans;
            entries += rep.entries.size();
            for (const auto& e : rep.entries)
                worst = std::max(worst, e.slack);
            ok = ok && rep.passed();
        }
    }
    return {ok && worst < 0.0, fmt("%zu plans, %zu scalar inequalities, largest slack %.4g", plans, entries, worst)};
}

// 8 ------------------------------------------------------------------------
Outcome conservation()
{
    const TopologySet ts = validate_topology_set(unit_star_set());
    const SwitchPlan plan = plan_dwell(ts, search_params(ts, 0.5, 1));
    std::mt19937_64 rng(88);

    double drift_v = 0.0, sum_fluct = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
        const Eigen::VectorXd x0 = trial == 0 ? reference_initial() : normal_vector(rng, 4);
        const Eigen::VectorXd v0 = trial == 0 ? reference_initial() : normal_vector(rng, 4);
        const SystemState init{0.0, x0, v0, 0};
        for (Propagator prop : {Propagator::ClosedForm, Propagator::RungeKutta}) {
            SimulationOptions opts;
            opts.propagator = prop;
            opts.dt_sample = 0.05;
            const Trace trace = simulate_switched(ts, make_signal(plan, {0, 1}, 40.0), x0, v0, 40.0, opts);
            for (const auto& s : trace.samples) {
                drift_v = std::max(drift_v, std::abs(s.v.mean() - v0.mean()));
                const FluctuationState f = to_fluctuations(SystemState{s.t, s.x, s.v, s.mode}, init);
                sum_fluct = std::max({sum_fluct, std::abs(f.xt.sum()), std::abs(f.vt.sum())});
            }
        }
    }

    double drift_cf = 0.0, drift_rk = 0.0;
    for (std::size_t r = 0; r < 2; ++r) {
        const FluctuationState f0 = random_fluctuation(rng, 4);
        const double T = ts.periods[r].value;
        const double e0 = energy_metric(f0, ts.topologies[r]);
        for (int k = 1; k <= 100; ++k)
            drift_cf = std::max(drift_cf, std::abs(energy_metric(closed_form_propagate(f0, ts.spectra[r], T * k / 100), ts.topologies[r]) - e0) / e0);
        SystemState s{0.0, f0.xt, f0.vt, r};
        const int steps = static_cast<int>(std::ceil(T / 1e-3));
        for (int k = 0; k < steps; ++k) {
            s = integrate_step(s, ts.topologies[r], T / steps);
            drift_rk = std::max(drift_rk, std::abs(energy_metric(fluctuation_of(s.x, s.v), ts.topologies[r]) - e0) / e0);
        }
    }
    const bool ok = drift_v <= 1e-9 && sum_fluct <= 1e-8 && drift_cf <= 1e-8 && drift_rk <= 1e-5;
    return {ok, fmt("mean velocity drift %.3g, |1'xt|,|1'vt| <= %.3g, energy drift %.3g (closed form), %.3g (RK4)", drift_v,
                    sum_fluct, drift_cf, drift_rk)};
}

// 9 ------------------------------------------------------------------------
Outcome half_period_flip()
{
    const TopologySet ts = validate_topology_set(unit_star_set());
    std::mt19937_64 rng(99);
    double worst = 0.0;
    for (std::size_t r = 0; r < 2; ++r) {
        for (int trial = 0; trial < 10; ++trial) {
            const FluctuationState f0 = random_fluctuation(rng, 4);
            const double t = 0.37 * trial;
            const FluctuationState a = closed_form_propagate(f0, ts.spectra[r], t);
            const FluctuationState b = closed_form_propagate(f0, ts.spectra[r], t + ts.periods[r].value / 2);
            worst = std::max({worst, (a.xt + b.xt).cwiseAbs().maxCoeff(), (a.vt + b.vt).cwiseAbs().maxCoeff()});
        }
    }
    return {worst <= 1e-8, fmt("max |state(t + T/2) + state(t)| = %.4g", worst)};
}

// 10 -----------------------------------------------------------------------
Outcome oracles()
{
    std::mt19937_64 rng(1010);
    const TopologySet ts = validate_topology_set(unit_star_set());

    double traj = 0.0;
    for (std::size_t r = 0; r < 2; ++r) {
        const FluctuationState f0 = random_fluctuation(rng, 4);
        const double T = ts.periods[r].value;
        const int steps = static_cast<int>(std::ceil(T / 1e-3));
        const double h = T / steps;
        SystemState s{0.0, f0.xt, f0.vt, r};
        for (int k = 1; k <= steps; ++k) {
            s = integrate_step(s, ts.topologies[r], h);
            const FluctuationState exact = closed_form_propagate(f0, ts.spectra[r], k * h);
            traj = std::max({traj, (s.x - exact.xt).cwiseAbs().maxCoeff(), (s.v - exact.vt).cwiseAbs().maxCoeff()});
        }
    }

    double vander = 0.0;
    for (int n = 1; n <= 6; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::VectorXd a = normal_vector(rng, n);
            Eigen::MatrixXd v(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    v(i, j) = std::pow(a(j), i);
            const double brute = cofactor_det(v);
            vander = std::max(vander, std::abs(vandermonde_det(a) - brute) / std::max(1e-300, std::abs(brute)));
        }
    }

    double shares = 0.0, lyap = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 2 + trial % 7;
        const Eigen::VectorXd x = normal_vector(rng, n), v = normal_vector(rng, n);
        const FluctuationState f = fluctuation_of(x, v);
        const double F = metric_F(f, 0.5);
        shares = std::max(shares, std::abs(metric_F_locals(f, 0.5).sum() - F) / std::max(1.0, F));
        const double V = lyapunov_V(x, v);
        lyap = std::max(lyap, std::abs(V - static_cast<double>(n) * (f.xt.squaredNorm() + f.vt.squaredNorm())) / std::max(1.0, V));
    }
    const bool ok = traj <= 1e-6 && vander <= 1e-9 && shares <= 1e-12 && lyap <= 1e-12;
    return {ok, fmt("closed form vs RK4 %.3g, Vandermonde %.3g, sum F_i %.3g, V identity %.3g", traj, vander, shares, lyap)};
}

// 11 -----------------------------------------------------------------------
Outcome estimator()
{
    std::mt19937_64 rng(1111);
    double dev = 0.0, drift = 0.0;
    int graphs = 0;
    for (int n = 2; n <= 8; ++n) {
        for (int trial = 0; trial < 2; ++trial) {
            EstimatorConfig cfg;
            cfg.mode = EstimatorMode::Simulated;
            cfg.comm_graph = build_topology(random_connected_weights(rng, n, 0.35, 1, 1, true));
            const Eigen::VectorXd r0 = normal_vector(rng, n) * 3.0;
            const double bound = settling_time_bound(cfg, static_cast<std::size_t>(n));
            const EstimatorRun run = run_estimator(cfg, r0, bound, cfg.h);
            dev = std::max(dev, (run.r.array() - r0.mean()).abs().maxCoeff());
            drift = std::max(drift, run.max_mean_drift);
            ++graphs;
        }
    }
    return {dev <= 1e-6 && drift <= 1e-8, fmt("%d graphs, max deviation at the settling bound %.3g, mean drift %.3g", graphs, dev, drift)};
}

// 12 -----------------------------------------------------------------------
Outcome admissible_metric()
{
    const TopologySet ts = validate_topology_set(unit_star_set());
    const std::size_t r = 1;
    const double T = ts.periods[r].value;
    std::mt19937_64 rng(1212);
    double min_F = 1e300, max_E = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const FluctuationState f0 = random_fluctuation(rng, 4);
        std::vector<double> Fs, Es;
        for (int k = 0; k < 1000; ++k) {
            const FluctuationState f = closed_form_propagate(f0, ts.spectra[r], T * k / 1000);
            Fs.push_back(metric_F(f, 0.5));
            Es.push_back(energy_metric(f, ts.topologies[r]));
        }
        min_F = std::min(min_F, relative_variance(Fs));
        max_E = std::max(max_E, relative_variance(Es));
    }
    return {min_F > 1e-10 && max_E < 1e-12, fmt("smallest F relative variance %.3g, largest energy relative variance %.3g", min_F, max_E)};
}

const std::vector<Criterion>& criteria()
{
    static const std::vector<Criterion> all{
        {1, "Laplacian spectra of the unit-weight star pair", spectra},
        {2, "fixed-topology periods equal 2pi", periods},
        {3, "heavy-weight fixed topology oscillates without consensus", fixed_topology_oscillation},
        {4, "planned alternation drives V to consensus by t = 200", switched_consensus},
        {5, "switching loop reaches delta-consensus within 200 switches", delta_consensus},
        {6, "contradiction function negative on (0, 1)", contradiction},
        {7, "searched plans pass the scalar certificate", certificates},
        {8, "conservation along trajectories", conservation},
        {9, "half-period sign flip", half_period_flip},
        {10, "oracle equivalences", oracles},
        {11, "finite-time estimator settles by its bound", estimator},
        {12, "admissible metric varies while the energy metric is constant", admissible_metric},
    };
    return all;
}

bool run(const Criterion& c)
{
    Outcome out;
    try {
        out = c.check();
    } catch (const std::exception& e) {
        out = {false, std::string("threw ") + e.what()};
    }
    std::printf("%s criterion %2d: %s -- %s\n", out.pass ? "PASS" : "FAIL", c.id, c.title, out.detail.c_str());
    std::fflush(stdout);
    return out.pass;
}

} // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
            return 2;
        }
    }
    bool all = true;
    bool matched = false;
    for (const auto& c : criteria()) {
        if (only != 0 && c.id != only)
            continue;
        matched = true;
        all = run(c) && all;
    }
    if (!matched) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    return all ? 0 : 1;
}
