#include "topoflock/switching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "topoflock/error.hpp"

namespace topoflock {

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require_basic(const SwitchParams& p)
{
    if (!(p.alpha > 0.0))
        throw Error(ErrorCode::InvalidParams, "alpha must be positive");
    if (!(p.beta > 0.0 && p.beta < 1.0))
        throw Error(ErrorCode::InvalidParams, "beta must lie in (0, 1), got " + fmt(p.beta));
    if (p.kappa < 1)
        throw Error(ErrorCode::InvalidParams, "kappa must be a positive integer");
    if (p.m < 0)
        throw Error(ErrorCode::InvalidParams, "m must be a nonnegative integer");
}

std::vector<double> dwell_times(const TopologySet& ts, double tau_hat, int m)
{
    std::vector<double> dwell;
    for (const auto& period : ts.periods)
        dwell.push_back(tau_hat + m * period.value / 2.0);
    return dwell;
}

} // namespace

double compute_xi(const TopologySet& ts)
{
    double xi = -std::numeric_limits<double>::infinity();
    for (const auto& sd : ts.spectra)
        for (std::size_t i = 0; i < sd.size(); ++i)
            xi = std::max({xi, 1.0 - sd.lambda(i), sd.lambda(i) - 1.0});
    return xi;
}

double dwell_lower_bound(const SwitchParams& p)
{
    // beta^{-1/kappa} - 1 via expm1 keeps precision when beta is close to 1.
    const double growth = std::expm1(-std::log(p.beta) / p.kappa);
    return growth * p.kappa / (p.alpha - p.xi);
}

SwitchPlan plan_dwell(const TopologySet& ts, const SwitchParams& params)
{
    require_basic(params);

    SwitchPlan plan;
    plan.params = params;

    const Inequality rate_margin{"xi < alpha", params.xi - params.alpha};
    plan.inequalities.push_back(rate_margin);
    if (!rate_margin.holds())
        throw Error(ErrorCode::AlphaBelowXi, "xi = " + fmt(params.xi) + " must be below alpha = "
                                                        + fmt(params.alpha) + " (slack " + fmt(rate_margin.slack) + ")");

    const Inequality window_low{"0 < tau_hat_max", -params.tau_hat_max};
    const Inequality window_high{"tau_hat_max < -ln(beta)/alpha",
                              params.tau_hat_max + std::log(params.beta) / params.alpha};
    plan.inequalities.push_back(window_low);
    plan.inequalities.push_back(window_high);
    for (const auto& c : {window_low, window_high})
        if (!c.holds())
            throw Error(ErrorCode::DecayWindowViolated, c.name + " fails (slack " + fmt(c.slack) + ")");

    plan.dwell = dwell_times(ts, params.tau_hat_max, params.m);
    const double bound = dwell_lower_bound(params);
    for (std::size_t r = 0; r < plan.dwell.size(); ++r) {
        const Inequality dwell_check{"dwell lower bound < tau_" + std::to_string(r + 1), bound - plan.dwell[r]};
        plan.inequalities.push_back(dwell_check);
        if (!dwell_check.holds())
            throw Error(ErrorCode::DwellBoundViolated, "tau_" + std::to_string(r + 1) + " = " + fmt(plan.dwell[r])
                                                            + " must exceed " + fmt(bound) + " (slack " + fmt(dwell_check.slack) + ")");
    }

    plan.tau_min = *std::min_element(plan.dwell.begin(), plan.dwell.end());
    plan.tau_max = *std::max_element(plan.dwell.begin(), plan.dwell.end());
    return plan;
}

SwitchParams search_params(const TopologySet& ts, double target_tau_hat, int m, const SearchOptions& opts)
{
    if (!(target_tau_hat > 0.0))
        throw Error(ErrorCode::InvalidParams, "target tau_hat_max must be positive");

    const double xi = compute_xi(ts);
    const auto dwell = dwell_times(ts, target_tau_hat, m);
    const double tau_min = *std::min_element(dwell.begin(), dwell.end());

    double tightest = std::numeric_limits<double>::infinity();
    double alpha = std::max(xi, 0.0) * (1.0 + opts.margin);
    if (!(alpha > 0.0))
        alpha = opts.margin;

    for (int step = 0; step < opts.alpha_steps; ++step, alpha *= opts.alpha_growth) {
        const double beta = std::exp(-alpha * target_tau_hat * (1.0 + opts.margin));
        if (!(beta > 0.0))
            break; // underflow: every larger alpha underflows too
        for (int kappa = 1; kappa <= opts.max_kappa; ++kappa) {
            SwitchParams p{alpha, beta, kappa, target_tau_hat, m, xi};
            const double slack = dwell_lower_bound(p) - tau_min;
            tightest = std::min(tightest, slack);
            if (slack < -kStrictSlack) {
                try {
                    plan_dwell(ts, p);
                    return p;
                } catch (const Error&) {
                    // Boundary rounding; keep sweeping.
                }
            }
        }
    }
    if (std::isinf(tightest)) {
        const double alpha0 = std::max(xi, 0.0) * (1.0 + opts.margin);
        throw Error(ErrorCode::NoFeasibleParams,
                    "beta = exp(-alpha tau_hat_max (1 + margin)) underflows already at alpha = " + fmt(alpha0)
                        + " (ln beta = " + fmt(-alpha0 * target_tau_hat * (1.0 + opts.margin))
                        + "); no representable (alpha, beta) for tau_hat_max = " + fmt(target_tau_hat));
    }
    throw Error(ErrorCode::NoFeasibleParams, "no (alpha, beta, kappa) satisfies the dwell inequalities for tau_hat_max = "
                                                 + fmt(target_tau_hat) + "; tightest dwell slack " + fmt(tightest));
}

bool CertificateReport::passed() const
{
    return std::all_of(entries.begin(), entries.end(), [](const CertificateEntry& e) { return e.holds(); });
}

std::vector<CertificateEntry> CertificateReport::failures() const
{
    std::vector<CertificateEntry> out;
    std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
                 [](const CertificateEntry& e) { return !e.holds(); });
    return out;
}

void CertificateReport::require() const
{
    const auto bad = failures();
    if (bad.empty())
        return;
    std::string msg;
    for (const auto& e : bad) {
        msg += "(" + e.form + ") mode " + std::to_string(e.mode + 1) + " lambda_" + std::to_string(e.eigen_index + 1)
               + (e.sign > 0 ? " +" : " -") + " slack " + fmt(e.slack) + "; ";
    }
    throw Error(ErrorCode::CertificateFailed, msg);
}

CertificateReport check_certificate(const TopologySet& ts, const SwitchParams& p, double tau_min)
{
    require_basic(p);
    if (!(tau_min > 0.0))
        throw Error(ErrorCode::InvalidParams, "tau_min must be positive");

    const double up = std::expm1(-std::log(p.beta) / p.kappa);  // beta^{-1/kappa} - 1
    const double down = -std::expm1(std::log(p.beta) / p.kappa); // 1 - beta^{1/kappa}
    const double rate = p.kappa / tau_min;

    CertificateReport report;
    for (std::size_t r = 0; r < ts.modes(); ++r) {
        const auto& sd = ts.spectra[r];
        for (std::size_t i = 0; i < sd.size(); ++i) {
            for (int sign : {1, -1}) {
                const double coupling = sign * (1.0 - sd.lambda(i));
                report.entries.push_back({"ramp-growth", r, i, sign, rate * up - p.alpha + coupling});
                report.entries.push_back({"ramp-decay", r, i, sign, rate * down - p.alpha + coupling});
                report.entries.push_back({"steady", r, i, sign, -p.alpha + coupling});
            }
        }
    }
    report.entries.push_back({"jump", 0, 0, 1, std::log(p.beta) + p.alpha * p.tau_hat_max});
    return report;
}

double contradiction_function(int kappa, double beta)
{
    return std::exp(kappa * (1.0 - std::pow(beta, -1.0 / kappa))) - beta;
}

ContradictionReport verify_contradiction(int kappa, std::size_t grid, double lo, double hi, double end_tol)
{
    if (kappa < 1 || grid < 2 || !(lo > 0.0 && lo < hi && hi < 1.0))
        throw Error(ErrorCode::InvalidParams, "verify_contradiction needs kappa >= 1, grid >= 2 and 0 < lo < hi < 1");

    ContradictionReport rep;
    rep.kappa = kappa;
    rep.samples = grid;
    rep.max_value = -std::numeric_limits<double>::infinity();
    rep.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid; ++k) {
        const double beta = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid - 1);
        const double g = contradiction_function(kappa, beta);
        rep.max_value = std::max(rep.max_value, g);
        rep.min_value = std::min(rep.min_value, g);
    }
    rep.g_low = contradiction_function(kappa, lo);
    rep.g_high = contradiction_function(kappa, hi);

    // The derivative of g has the sign of
    // phi(beta) = kappa (1 - beta^{-1/kappa}) - (1 + 1/kappa) ln beta,
    // negative near 0 and positive just below 1.
    auto phi = [kappa](double beta) {
        return kappa * (1.0 - std::pow(beta, -1.0 / kappa)) - (1.0 + 1.0 / kappa) * std::log(beta);
    };
    double a = 1e-300;
    double b = 1.0 - 1e-6;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        (phi(mid) < 0.0 ? a : b) = mid;
    }
    rep.beta_star = 0.5 * (a + b);
    rep.g_star = contradiction_function(kappa, rep.beta_star);
    rep.g_star_closed = rep.beta_star * (std::pow(rep.beta_star, 1.0 / kappa) - 1.0);

    rep.passed = rep.max_value < 0.0 && rep.g_star < 0.0 && std::abs(rep.g_low) <= end_tol
                 && std::abs(rep.g_high) <= end_tol;
    return rep;
}

SwitchingSignal make_signal(const SwitchPlan& plan, const std::vector<std::size_t>& mode_order, double t_end)
{
    if (mode_order.empty())
        throw Error(ErrorCode::InvalidParams, "mode order is empty");
    if (!(t_end > 0.0))
        throw Error(ErrorCode::InvalidParams, "t_end must be positive");
    for (std::size_t k = 0; k < mode_order.size(); ++k) {
        if (mode_order[k] >= plan.dwell.size())
            throw Error(ErrorCode::UnknownMode, "mode " + std::to_string(mode_order[k] + 1) + " not in the plan");
        const std::size_t next = mode_order[(k + 1) % mode_order.size()];
        if (next == mode_order[k])
            throw Error(ErrorCode::RepeatedConsecutiveMode, "mode " + std::to_string(next + 1) + " repeats consecutively");
    }
    for (double d : plan.dwell)
        if (!(d > 0.0))
            throw Error(ErrorCode::InvalidParams, "dwell times must be positive");

    SwitchingSignal sigma;
    double t = 0.0;
    for (std::size_t k = 0; t < t_end; ++k) {
        const std::size_t mode = mode_order[k % mode_order.size()];
        sigma.push_back({t, mode});
        t += plan.dwell[mode];
    }
    return sigma;
}

nlohmann::json to_json(const SwitchPlan& plan)
{
    nlohmann::json dwell = nlohmann::json::object();
    for (std::size_t r = 0; r < plan.dwell.size(); ++r)
        dwell[std::to_string(r + 1)] = plan.dwell[r];
    nlohmann::json slacks = nlohmann::json::object();
    for (const auto& c : plan.inequalities)
        slacks[c.name] = c.slack;
    const auto& p = plan.params;
    return {
        {"alpha", p.alpha},   {"beta", p.beta}, {"kappa", p.kappa},         {"tau_hat_max", p.tau_hat_max},
        {"m", p.m},           {"xi", p.xi},     {"dwell", std::move(dwell)}, {"tau_min", plan.tau_min},
        {"tau_max", plan.tau_max}, {"inequality_slacks", std::move(slacks)},
    };
}

SwitchParams params_from_json(const nlohmann::json& j)
{
    try {
        SwitchParams p;
        p.alpha = j.at("alpha").get<double>();
        p.beta = j.at("beta").get<double>();
        p.kappa = j.at("kappa").get<int>();
        p.tau_hat_max = j.at("tau_hat_max").get<double>();
        p.m = j.at("m").get<int>();
        p.xi = j.at("xi").get<double>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("plan: ") + e.what());
    }
}

} // namespace topoflock
