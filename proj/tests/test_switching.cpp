#include <doctest.h>

#include <numbers>

#include "fixtures.hpp"
#include "topoflock/error.hpp"
#include "topoflock/switching.hpp"

using namespace topoflock;
using namespace topoflock::testing;

namespace {

ErrorCode plan_code(const TopologySet& ts, const SwitchParams& p)
{
    try {
        plan_dwell(ts, p);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected plan_dwell to throw");
    return ErrorCode::ValidationError;
}

} // namespace

TEST_CASE("xi of the unit star pair")
{
    CHECK(compute_xi(validate_topology_set(unit_star_set())) == doctest::Approx(8.0));
}

TEST_CASE("searched plan dwells a half period plus tau_hat")
{
    const TopologySet ts = validate_topology_set(unit_star_set());
    const SwitchParams p = search_params(ts, 0.5, 1);
    CHECK(p.alpha > p.xi);
    const SwitchPlan plan = plan_dwell(ts, p);
    for (double d : plan.dwell)
        CHECK(std::abs(d - (std::numbers::pi + 0.5)) <= 1e-12);
    for (const auto& ineq : plan.inequalities)
        CHECK(ineq.holds());
    CHECK(check_certificate(ts, p, plan.tau_min).passed());

    const SwitchPlan twice = plan_dwell(ts, search_params(ts, 0.5, 2));
    CHECK(std::abs(twice.tau_min - (2 * std::numbers::pi + 0.5)) <= 1e-12);
}

TEST_CASE("unreachable tau_hat reports infeasibility")
{
    const TopologySet ts = validate_topology_set(unit_star_set());
    try {
        search_params(ts, 1e6, 1);
        FAIL("expected NoFeasibleParams");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoFeasibleParams);
    }
}

TEST_CASE("dwell inequalities are checked in order")
{
    const TopologySet ts = validate_topology_set(unit_star_set());
    SwitchParams good = search_params(ts, 0.5, 1);

    SwitchParams p = good;
    p.alpha = p.xi;
    CHECK(plan_code(ts, p) == ErrorCode::AlphaBelowXi);

    p = good;
    p.tau_hat_max = -std::log(p.beta) / p.alpha * 1.01;
    CHECK(plan_code(ts, p) == ErrorCode::DecayWindowViolated);

    p = good;
    p.kappa = 1;
    p.beta = 1e-300;
    p.alpha = p.xi + 1e-3;
    p.tau_hat_max = 0.5;
    CHECK(plan_code(ts, p) == ErrorCode::DwellBoundViolated);

    p = good;
    p.beta = 1.5;
    CHECK(plan_code(ts, p) == ErrorCode::InvalidParams);
}

TEST_CASE("dwell lower bound is the stated expression")
{
    const SwitchParams p{10.0, 0.01, 3, 0.4, 1, 8.0};
    CHECK(dwell_lower_bound(p) == doctest::Approx((std::pow(0.01, -1.0 / 3) - 1) * 3 / 2.0).epsilon(1e-14));
}

TEST_CASE("tampered certificate fails the steady form")
{
    const TopologySet ts = validate_topology_set(unit_star_set());
    SwitchParams p = search_params(ts, 0.5, 1);
    const double tau_min = plan_dwell(ts, p).tau_min;
    p.alpha = p.xi;
    const CertificateReport rep = check_certificate(ts, p, tau_min);
    CHECK_FALSE(rep.passed());
    const auto fails = rep.failures();
    CHECK(std::any_of(fails.begin(), fails.end(), [](const CertificateEntry& e) { return e.form == "steady"; }));
    CHECK_THROWS_AS(rep.require(), Error);
}

TEST_CASE("certificate enumerates every mode, eigenvalue and sign")
{
    const TopologySet ts = validate_topology_set(unit_star_set());
    const SwitchParams p = search_params(ts, 0.5, 1);
    const CertificateReport rep = check_certificate(ts, p, plan_dwell(ts, p).tau_min);
    CHECK(rep.entries.size() == 2 * 4 * 2 * 3 + 1);
}

TEST_CASE("contradiction function stays negative")
{
    CHECK(contradiction_function(1, 0.5) == doctest::Approx(-0.1321).epsilon(1e-3));
    for (int kappa : {1, 2, 4, 8, 16}) {
        const ContradictionReport r = verify_contradiction(kappa, 10000);
        CHECK(r.passed);
        CHECK(r.max_value < 0.0);
        CHECK(r.g_star == doctest::Approx(r.g_star_closed).epsilon(1e-9));
        CHECK(r.g_star <= r.min_value + 1e-12);
    }
    CHECK_THROWS_AS(verify_contradiction(0, 10), Error);
}

TEST_CASE("cyclic switching signal")
{
    const TopologySet ts = validate_topology_set(unit_star_set());
    const SwitchPlan plan = plan_dwell(ts, search_params(ts, 0.5, 1));
    const SwitchingSignal sigma = make_signal(plan, {1, 0}, 20.0);
    REQUIRE(sigma.size() == 6);
    CHECK(sigma[0].mode == 1);
    CHECK(sigma[1].mode == 0);
    for (std::size_t k = 1; k < sigma.size(); ++k)
        CHECK(sigma[k].t - sigma[k - 1].t == doctest::Approx(std::numbers::pi + 0.5));
    CHECK_THROWS_AS(make_signal(plan, {0, 0}, 10.0), Error);
    CHECK_THROWS_AS(make_signal(plan, {0, 1, 0}, 10.0), Error);
    CHECK_THROWS_AS(make_signal(plan, {0, 7}, 10.0), Error);
}

TEST_CASE("plan JSON round trip")
{
    const TopologySet ts = validate_topology_set(unit_star_set());
    const SwitchPlan plan = plan_dwell(ts, search_params(ts, 0.5, 1));
    const SwitchParams back = params_from_json(to_json(plan));
    CHECK(back.alpha == plan.params.alpha);
    CHECK(back.beta == plan.params.beta);
    CHECK(back.kappa == plan.params.kappa);
    CHECK_THROWS_AS(params_from_json(nlohmann::json{{"alpha", 1.0}}), Error);
}
