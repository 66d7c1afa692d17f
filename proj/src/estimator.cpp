#include "topoflock/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "topoflock/dynamics.hpp"
#include "topoflock/error.hpp"
#include "topoflock/spectral.hpp"

namespace topoflock {

namespace {

constexpr double kStepFraction = 0.2;
constexpr double kStepFloorRatio = 1e-8;
constexpr std::size_t kMaxSteps = 200'000'000;

// |u|^{num/den} for odd positive integers, avoiding pow() on the common cases.
struct OddPower {
    int num = 1;
    int den = 1;

    double magnitude(double a) const
    {
        if (den == 1) {
            double out = 1.0;
            for (int k = 0; k < num; ++k)
                out *= a;
            return out;
        }
        if (num == 1 && den == 3)
            return std::cbrt(a);
        return std::pow(a, static_cast<double>(num) / den);
    }
    double exponent() const { return static_cast<double>(num) / den; }
};

struct Edge {
    Eigen::Index i;
    Eigen::Index j;
};

class FiniteTimeFlow {
public:
    explicit FiniteTimeFlow(const EstimatorConfig& cfg)
        : fast_{cfg.mbar, cfg.nbar}, slow_{cfg.pbar, cfg.qbar}, alpha_(cfg.alpha_t), beta_(cfg.beta_t)
    {
        const auto n = static_cast<Eigen::Index>(cfg.comm_graph.size());
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                if (cfg.comm_graph.has_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j)))
                    edges_.push_back({i, j});
    }

    Eigen::VectorXd operator()(const Eigen::VectorXd& r) const
    {
        Eigen::VectorXd dr = Eigen::VectorXd::Zero(r.size());
        for (const auto& e : edges_) {
            const double u = r(e.j) - r(e.i);
            const double a = std::abs(u);
            double push = alpha_ * fast_.magnitude(a);
            if (a >= kSublinearCutoff)
                push += beta_ * slow_.magnitude(a);
            if (u < 0.0)
                push = -push;
            dr(e.i) += push;
            dr(e.j) -= push;
        }
        return dr;
    }

    // Largest per-agent secant rate sum_j b_ij (at |u|^{e1-1} + bt |u|^{e2-1}).
    double stiffness(const Eigen::VectorXd& r) const
    {
        Eigen::VectorXd rate = Eigen::VectorXd::Zero(r.size());
        for (const auto& e : edges_) {
            const double a = std::abs(r(e.j) - r(e.i));
            double s = alpha_ * std::pow(a, fast_.exponent() - 1.0);
            if (a >= kSublinearCutoff)
                s += beta_ * std::pow(a, slow_.exponent() - 1.0);
            rate(e.i) += s;
            rate(e.j) += s;
        }
        return rate.size() == 0 ? 0.0 : rate.maxCoeff();
    }

private:
    std::vector<Edge> edges_;
    OddPower fast_;
    OddPower slow_;
    double alpha_;
    double beta_;
};

double lambda2(const Topology& topo)
{
    const SpectralData sd = eigendecompose(topo);
    return sd.lambda(1);
}

} // namespace

Topology complete_graph(std::size_t n)
{
    const auto k = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd w = Eigen::MatrixXd::Ones(k, k);
    w.diagonal().setZero();
    return build_topology(w);
}

void validate(const EstimatorConfig& cfg)
{
    for (int e : {cfg.mbar, cfg.nbar, cfg.pbar, cfg.qbar})
        if (e <= 0 || e % 2 == 0)
            throw Error(ErrorCode::NonOddExponents, "estimator exponents must be odd positive integers");
    if (!(cfg.mbar > cfg.nbar) || !(cfg.pbar < cfg.qbar))
        throw Error(ErrorCode::NonOddExponents, "estimator exponents need mbar > nbar and pbar < qbar");
    if (!(cfg.alpha_t > 0.0) || !(cfg.beta_t > 0.0))
        throw Error(ErrorCode::InvalidParams, "estimator gains must be positive");
    if (cfg.comm_graph.size() < 2)
        throw Error(ErrorCode::InvalidParams, "estimator communication graph is missing");
    const auto& w = cfg.comm_graph.weights();
    if (((w.array() != 0.0) && (w.array() != 1.0)).any())
        throw Error(ErrorCode::InvalidParams, "estimator communication graph must be unweighted (0/1 entries)");
    if (!is_connected(cfg.comm_graph))
        throw Error(ErrorCode::Disconnected, "estimator communication graph is not connected");
}

double settling_time_bound(const EstimatorConfig& cfg, std::size_t n)
{
    validate(cfg);
    const double m = cfg.mbar, nb = cfg.nbar, p = cfg.pbar, q = cfg.qbar;
    const double fast = std::pow(static_cast<double>(n), (m - nb) / (2.0 * nb)) / cfg.alpha_t * nb / (m - nb);
    const double slow = 1.0 / cfg.beta_t * q / (q - p);
    return (fast + slow) / lambda2(cfg.comm_graph);
}

EstimatorConfig tune_gains(EstimatorConfig cfg, double tau_min, std::size_t n, double margin)
{
    if (!(tau_min > 0.0))
        throw Error(ErrorCode::InvalidParams, "tau_min must be positive");
    const double bound = settling_time_bound(cfg, n);
    const double factor = std::max(1.0, bound / tau_min) * (1.0 + margin);
    cfg.alpha_t *= factor;
    cfg.beta_t *= factor;
    return cfg;
}

EstimatorRun run_estimator(const EstimatorConfig& cfg, const Eigen::VectorXd& r0, double t_run, double h)
{
    validate(cfg);
    if (static_cast<std::size_t>(r0.size()) != cfg.comm_graph.size())
        throw Error(ErrorCode::DimensionMismatch, "estimator input size does not match the communication graph");
    if (!(h > 0.0))
        throw Error(ErrorCode::NonpositiveStep, "estimator step must be positive");

    const FiniteTimeFlow flow(cfg);
    const double mean0 = r0.mean();
    const double floor = h * kStepFloorRatio;

    EstimatorRun run;
    run.r = r0;
    double t = 0.0;
    while (t < t_run) {
        const double stiff = flow.stiffness(run.r);
        double step = std::min(h, t_run - t);
        if (stiff > 0.0)
            step = std::min(step, std::max(floor, kStepFraction / stiff));
        run.r = rk4_step(run.r, step, flow);
        t += step;
        run.max_mean_drift = std::max(run.max_mean_drift, std::abs(run.r.mean() - mean0));
        if (++run.steps > kMaxSteps)
            throw Error(ErrorCode::ConvergenceFailure, "estimator exceeded its step budget");
    }
    return run;
}

std::pair<double, double> estimate_global_metrics(const Eigen::VectorXd& F_locals, const Eigen::VectorXd& Fdot_locals,
                                                  const EstimatorConfig& cfg, double tau_min)
{
    if (F_locals.size() != Fdot_locals.size())
        throw Error(ErrorCode::DimensionMismatch, "F and Fdot share vectors differ in length");
    if (cfg.mode == EstimatorMode::Ideal)
        return {F_locals.sum(), Fdot_locals.sum()};

    const auto n = static_cast<double>(F_locals.size());
    const EstimatorRun f = run_estimator(cfg, F_locals, tau_min, cfg.h);
    const EstimatorRun fd = run_estimator(cfg, Fdot_locals, tau_min, cfg.h);
    return {n * f.r(0), n * fd.r(0)};
}

EstimatorConfig estimator_from_json(const nlohmann::json& j, std::size_t n)
{
    EstimatorConfig cfg;
    try {
        cfg.alpha_t = j.value("alpha_t", cfg.alpha_t);
        cfg.beta_t = j.value("beta_t", cfg.beta_t);
        cfg.mbar = j.value("mbar", cfg.mbar);
        cfg.nbar = j.value("nbar", cfg.nbar);
        cfg.pbar = j.value("pbar", cfg.pbar);
        cfg.qbar = j.value("qbar", cfg.qbar);
        cfg.h = j.value("h", cfg.h);
        const std::string mode = j.value("mode", std::string("ideal"));
        if (mode == "ideal")
            cfg.mode = EstimatorMode::Ideal;
        else if (mode == "simulated")
            cfg.mode = EstimatorMode::Simulated;
        else
            throw Error(ErrorCode::ParseError, "estimator mode must be \"ideal\" or \"simulated\"");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("estimator: ") + e.what());
    }
    cfg.comm_graph = j.contains("comm_graph") ? topology_from_json(j.at("comm_graph")) : complete_graph(n);
    validate(cfg);
    return cfg;
}

nlohmann::json to_json(const EstimatorConfig& cfg)
{
    return {
        {"alpha_t", cfg.alpha_t}, {"beta_t", cfg.beta_t}, {"mbar", cfg.mbar}, {"nbar", cfg.nbar},
        {"pbar", cfg.pbar},       {"qbar", cfg.qbar},     {"h", cfg.h},
        {"mode", cfg.mode == EstimatorMode::Ideal ? "ideal" : "simulated"},
        {"comm_graph", to_json(cfg.comm_graph)},
    };
}

} // namespace topoflock
