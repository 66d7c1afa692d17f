#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "topoflock/dynamics.hpp"
#include "topoflock/error.hpp"
#include "topoflock/orchestrator.hpp"
#include "topoflock/scenario.hpp"
#include "topoflock/spectral.hpp"
#include "topoflock/switching.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace topoflock;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kNoProgress = 2 };

enum class LogLevel { Error, Info, Debug };

LogLevel log_level()
{
    static const LogLevel level = [] {
        const char* env = std::getenv("TOPOFLOCK_LOG");
        const std::string v = env ? env : "";
        if (v == "debug")
            return LogLevel::Debug;
        if (v == "info")
            return LogLevel::Info;
        return LogLevel::Error;
    }();
    return level;
}

std::mutex log_mutex;

void log(LogLevel level, const std::string& msg)
{
    if (level > log_level())
        return;
    static constexpr const char* names[] = {"error", "info", "debug"};
    std::lock_guard lock(log_mutex);
    std::cerr << "[" << names[static_cast<int>(level)] << "] " << msg << '\n';
}

std::string fmt17(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// JSON with every float printed to 17 significant digits.
std::string dump17(const json& j, int indent = 2, int depth = 0)
{
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    if (j.is_number_float())
        return fmt17(j.get<double>());
    if (j.is_object()) {
        if (j.empty())
            return "{}";
        std::string out = "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            out += (first ? "" : ",\n") + pad + json(it.key()).dump() + ": " + dump17(it.value(), indent, depth + 1);
            first = false;
        }
        return out + "\n" + close + "}";
    }
    if (j.is_array()) {
        if (j.empty())
            return "[]";
        std::string out = "[\n";
        for (std::size_t i = 0; i < j.size(); ++i)
            out += (i ? ",\n" : "") + pad + dump17(j[i], indent, depth + 1);
        return out + "\n" + close + "]";
    }
    return j.dump();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::ParseError, "cannot write " + path.string());
    out << text;
}

void write_trace(const fs::path& path, const Trace& trace)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::ParseError, "cannot write " + path.string());
    write_trace_csv(out, trace);
}

json read_json(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; returns the largest exit code.
template <typename Fn>
int for_each_job(std::size_t count, int jobs, Fn fn)
{
    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{kOk};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            const int code = fn(i);
            int seen = worst.load();
            while (code > seen && !worst.compare_exchange_weak(seen, code)) {
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(count, 1))));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    return worst.load();
}

void print(const json& j)
{
    std::lock_guard lock(log_mutex);
    std::cout << dump17(j) << '\n';
}

int report_error(const std::string& where, const Error& e)
{
    log(LogLevel::Error, where + ": " + e.what());
    print({{"source", where}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}});
    return kConfigError;
}

// validate -----------------------------------------------------------------

int cmd_validate(const std::string& path)
{
    try {
        const Scenario s = load_scenario(path);
        const TopologySet ts = validate_topology_set(s.topologies);
        json report = to_json(ts);
        report["scenario"] = s.name;
        report["condition_a"] = "satisfied";
        report["condition_b"] = "satisfied";
        report["valid"] = true;
        print(report);
        log(LogLevel::Info, path + ": valid");
        return kOk;
    } catch (const Error& e) {
        return report_error(path, e);
    }
}

// plan ---------------------------------------------------------------------

json plan_report(const TopologySet& ts, const SwitchPlan& plan)
{
    json out = to_json(plan);
    const CertificateReport cert = check_certificate(ts, plan.params, plan.tau_min);
    json entries = json::array();
    for (const auto& e : cert.entries)
        entries.push_back({{"form", e.form}, {"mode", e.mode + 1}, {"eigen_index", e.eigen_index + 1},
                           {"sign", e.sign}, {"slack", e.slack}, {"holds", e.holds()}});
    out["certificate"] = {{"passed", cert.passed()}, {"entries", std::move(entries)}};
    return out;
}

int cmd_plan(const std::string& path, std::optional<double> tau_hat, std::optional<int> m, const std::string& out_path)
{
    try {
        Scenario s = load_scenario(path);
        if (tau_hat || m)
            s.plan.params.reset();
        if (tau_hat)
            s.plan.tau_hat = *tau_hat;
        if (m)
            s.plan.m = *m;
        const TopologySet ts = validate_topology_set(s.topologies);
        const SwitchPlan plan = plan_for(s, ts);
        const json report = plan_report(ts, plan);
        if (!out_path.empty())
            write_text(out_path, dump17(report) + "\n");
        print(report);
        return kOk;
    } catch (const Error& e) {
        return report_error(path, e);
    }
}

// simulate -----------------------------------------------------------------

SwitchPlan plan_from_file(const fs::path& path, const TopologySet& ts)
{
    const json j = read_json(path);
    return plan_dwell(ts, params_from_json(j));
}

int cmd_simulate(const std::string& path, std::optional<int> fixed_mode, std::optional<std::string> plan_path,
                 std::optional<double> t_end_opt, const std::string& propagator, const std::string& csv_path,
                 const std::string& summary_path)
{
    try {
        const Scenario s = load_scenario(path);
        const TopologySet ts = validate_topology_set(s.topologies);
        const double t_end = t_end_opt.value_or(s.t_max);

        SimulationOptions opts;
        opts.dt_sample = s.dt_sample;
        opts.varpi = s.metric.varpi;
        if (propagator == "rk4")
            opts.propagator = Propagator::RungeKutta;
        else if (propagator != "closed")
            throw Error(ErrorCode::ParseError, "propagator must be closed or rk4");

        SwitchingSignal sigma;
        if (fixed_mode) {
            if (*fixed_mode < 1 || static_cast<std::size_t>(*fixed_mode) > ts.modes())
                throw Error(ErrorCode::UnknownMode, "--fixed-mode must be between 1 and " + std::to_string(ts.modes()));
            sigma.push_back({0.0, static_cast<std::size_t>(*fixed_mode - 1)});
        } else {
            const SwitchPlan plan = plan_path && !plan_path->empty() ? plan_from_file(*plan_path, ts) : plan_for(s, ts);
            std::vector<std::size_t> order;
            for (std::size_t k = 0; k < ts.modes(); ++k)
                order.push_back((s.initial_mode + k) % ts.modes());
            sigma = make_signal(plan, order, t_end);
        }

        const Trace trace = simulate_switched(ts, sigma, s.x0, s.v0, t_end, opts);
        if (csv_path.empty()) {
            std::lock_guard lock(log_mutex);
            write_trace_csv(std::cout, trace);
        } else {
            write_trace(csv_path, trace);
        }

        const auto& last = trace.samples.back();
        const json summary = {{"scenario", s.name},
                              {"t_end", last.t},
                              {"final_V", lyapunov_V(last.x, last.v)},
                              {"initial_V", lyapunov_V(s.x0, s.v0)},
                              {"final_F", last.F},
                              {"switch_count", sigma.size() - 1}};
        if (!summary_path.empty())
            write_text(summary_path, dump17(summary) + "\n");
        if (!csv_path.empty())
            print(summary);
        return kOk;
    } catch (const Error& e) {
        return report_error(path, e);
    }
}

// run ----------------------------------------------------------------------

int cmd_run(const std::string& path, const fs::path& out_dir, bool write_csv)
{
    try {
        const Scenario s = load_scenario(path);
        const RunConfig cfg = make_run_config(s);
        log(LogLevel::Debug, path + ": tau_min " + fmt17(cfg.plan.tau_min));
        const RunResult result = run_algorithm1(cfg);

        json summary = to_json(result);
        summary["scenario"] = s.name;
        if (write_csv) {
            const fs::path csv = out_dir / (s.name + "_trace.csv");
            write_trace(csv, result.trace);
            write_text(out_dir / (s.name + "_result.json"), dump17(summary) + "\n");
            summary["trace_csv"] = csv.string();
        }
        print(summary);
        log(LogLevel::Info, path + ": " + std::string(to_string(result.verdict)) + " after " +
                                std::to_string(result.switch_count) + " switches");
        return result.verdict == Verdict::HorizonReached ? kNoProgress : kOk;
    } catch (const Error& e) {
        return report_error(path, e);
    }
}

// verify -------------------------------------------------------------------

int cmd_verify_contradiction(const std::vector<int>& kappas, std::size_t samples)
{
    bool all = true;
    json rows = json::array();
    for (int k : kappas) {
        const ContradictionReport r = verify_contradiction(k, samples);
        all = all && r.passed;
        rows.push_back({{"kappa", r.kappa},
                        {"samples", r.samples},
                        {"max_g", r.max_value},
                        {"min_g", r.min_value},
                        {"beta_star", r.beta_star},
                        {"g_star", r.g_star},
                        {"g_star_closed", r.g_star_closed},
                        {"g_low", r.g_low},
                        {"g_high", r.g_high},
                        {"passed", r.passed}});
    }
    print({{"prop1", std::move(rows)}, {"passed", all}});
    return all ? kOk : kConfigError;
}

int cmd_verify_certificate(const std::string& plan_path, const std::string& scenario_path)
{
    try {
        const Scenario s = load_scenario(scenario_path);
        const TopologySet ts = validate_topology_set(s.topologies);
        const json pj = read_json(plan_path);
        const SwitchParams params = params_from_json(pj);
        double tau_min = 0.0;
        if (pj.contains("tau_min")) {
            tau_min = pj.at("tau_min").get<double>();
        } else {
            tau_min = params.tau_hat_max + params.m * ts.periods.front().value / 2.0;
            for (const auto& p : ts.periods)
                tau_min = std::min(tau_min, params.tau_hat_max + params.m * p.value / 2.0);
        }
        const CertificateReport cert = check_certificate(ts, params, tau_min);
        json failures = json::array();
        for (const auto& e : cert.failures())
            failures.push_back({{"form", e.form}, {"mode", e.mode + 1}, {"eigen_index", e.eigen_index + 1},
                                {"sign", e.sign}, {"slack", e.slack}});
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& e : cert.entries)
            worst = std::max(worst, e.slack);
        print({{"passed", cert.passed()}, {"entries", cert.entries.size()}, {"max_slack", worst},
               {"failures", std::move(failures)}});
        return cert.passed() ? kOk : kConfigError;
    } catch (const Error& e) {
        return report_error(plan_path, e);
    } catch (const json::exception& e) {
        return report_error(plan_path, Error(ErrorCode::ParseError, e.what()));
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Strategic topology switching for second-order multi-agent consensus"};
    app.require_subcommand(1);
    app.fallthrough();
    int jobs = 1;
    app.add_option("--jobs,-j", jobs, "Scenarios processed in parallel")->check(CLI::PositiveNumber);

    std::vector<std::string> scenarios;

    auto* validate = app.add_subcommand("validate", "Check the topology-set conditions of scenarios");
    validate->add_option("scenario", scenarios, "Scenario JSON files")->required()->check(CLI::ExistingFile);

    auto* plan = app.add_subcommand("plan", "Search switching parameters and emit a dwell plan");
    std::string plan_scenario, plan_out;
    std::optional<double> tau_hat;
    std::optional<int> plan_m;
    plan->add_option("scenario", plan_scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    plan->add_option("--tau-hat", tau_hat, "Target tau_hat_max");
    plan->add_option("--m", plan_m, "Half-period multiple in every dwell");
    plan->add_option("--output,-o", plan_out, "Also write the plan JSON here");

    auto* simulate = app.add_subcommand("simulate", "Simulate a fixed topology or a planned switching signal");
    std::string sim_scenario, sim_csv, sim_summary, sim_propagator = "closed";
    std::optional<int> fixed_mode;
    std::optional<std::string> sim_plan;
    std::optional<double> sim_t_end;
    simulate->add_option("scenario", sim_scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    auto* fixed_opt = simulate->add_option("--fixed-mode", fixed_mode, "Hold topology r (1-based)");
    auto* plan_opt = simulate->add_option("--plan", sim_plan, "Plan JSON; without a value the scenario's plan is used")
                         ->expected(0, 1)
                         ->default_str("");
    fixed_opt->excludes(plan_opt);
    simulate->add_option("--t-end", sim_t_end, "Simulation horizon (default: scenario t_max)");
    simulate->add_option("--propagator", sim_propagator, "closed or rk4");
    simulate->add_option("--csv", sim_csv, "Trace CSV path (default: stdout)");
    simulate->add_option("--summary", sim_summary, "Summary JSON path");

    auto* run = app.add_subcommand("run", "Run the decentralized switching loop");
    std::string out_dir;
    run->add_option("scenario", scenarios, "Scenario JSON files")->required()->check(CLI::ExistingFile);
    run->add_option("--out-dir", out_dir, "Write <name>_trace.csv and <name>_result.json here");

    auto* verify = app.add_subcommand("verify", "Check the contradiction function or a plan certificate");
    bool prop1 = false;
    std::vector<int> kappas{1};
    std::size_t samples = 10000;
    std::vector<std::string> cert_files;
    auto* prop1_flag = verify->add_flag("--prop1", prop1, "Sample g(beta) on (0, 1)");
    verify->add_option("--kappa", kappas, "kappa values for --prop1")->check(CLI::PositiveNumber);
    verify->add_option("--samples", samples, "Grid size for --prop1");
    auto* cert_opt = verify->add_option("--certificate", cert_files, "plan.json scenario.json")->expected(2);
    prop1_flag->excludes(cert_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (*validate)
        return for_each_job(scenarios.size(), jobs, [&](std::size_t i) { return cmd_validate(scenarios[i]); });
    if (*plan)
        return cmd_plan(plan_scenario, tau_hat, plan_m, plan_out);
    if (*simulate) {
        if (!fixed_mode && !plan_opt->count()) {
            log(LogLevel::Error, "simulate needs --fixed-mode or --plan");
            return kConfigError;
        }
        return cmd_simulate(sim_scenario, fixed_mode, sim_plan, sim_t_end, sim_propagator, sim_csv, sim_summary);
    }
    if (*run) {
        if (!out_dir.empty())
            fs::create_directories(out_dir);
        return for_each_job(scenarios.size(), jobs,
                            [&](std::size_t i) { return cmd_run(scenarios[i], out_dir, !out_dir.empty()); });
    }
    if (*verify) {
        if (prop1)
            return cmd_verify_contradiction(kappas, samples);
        if (cert_files.size() == 2)
            return cmd_verify_certificate(cert_files[0], cert_files[1]);
        log(LogLevel::Error, "verify needs --prop1 or --certificate plan.json scenario.json");
        return kConfigError;
    }
    return kConfigError;
}
