#include "topoflock/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "topoflock/error.hpp"
#include "topoflock/metric.hpp"

namespace topoflock {

namespace {

void require_same_size(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const char* what)
{
    if (a.size() != b.size())
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": sizes " + std::to_string(a.size())
                                                     + " and " + std::to_string(b.size()));
}

double zero_mean_tolerance(const Eigen::VectorXd& v)
{
    const double scale = v.size() == 0 ? 1.0 : std::max(1.0, v.cwiseAbs().maxCoeff());
    return 1e-10 * static_cast<double>(v.size()) * scale;
}

// RK4 on the stacked state [x; v] of x' = v, v' = -L x.
Eigen::VectorXd rk4_physical(const Eigen::VectorXd& y, const Eigen::MatrixXd& lap, double h)
{
    const Eigen::Index n = lap.rows();
    return rk4_step(y, h, [&lap, n](const Eigen::VectorXd& z) {
        Eigen::VectorXd dz(2 * n);
        dz.head(n) = z.tail(n);
        dz.tail(n).noalias() = -lap * z.head(n);
        return dz;
    });
}

// Integrates [x; v] from t0 to t1 in equal substeps no longer than h.
Eigen::VectorXd integrate_span(Eigen::VectorXd y, const Eigen::MatrixXd& lap, double t0, double t1, double h)
{
    const double span = t1 - t0;
    if (span <= 0.0)
        return y;
    const auto steps = static_cast<long>(std::ceil(span / h - 1e-9));
    const double sub = span / static_cast<double>(std::max(1L, steps));
    for (long k = 0; k < std::max(1L, steps); ++k)
        y = rk4_physical(y, lap, sub);
    return y;
}

std::string format17(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

} // namespace

FluctuationState to_fluctuations(const SystemState& s, const SystemState& initial)
{
    require_same_size(s.x, s.v, "state x/v");
    require_same_size(initial.x, initial.v, "initial x/v");
    require_same_size(s.x, initial.x, "state vs initial");

    FluctuationState f;
    f.t = s.t;
    f.vbar = initial.v.mean();
    f.xbar = initial.x.mean() + f.vbar * (s.t - initial.t);
    f.xt = s.x.array() - f.xbar;
    f.vt = s.v.array() - f.vbar;
    return f;
}

SystemState from_fluctuations(const FluctuationState& f, std::size_t mode)
{
    SystemState s;
    s.t = f.t;
    s.x = f.xt.array() + f.xbar;
    s.v = f.vt.array() + f.vbar;
    s.mode = mode;
    return s;
}

FluctuationState closed_form_propagate(const FluctuationState& f0, const SpectralData& sd, double dt)
{
    require_same_size(f0.xt, f0.vt, "fluctuation xt/vt");
    if (static_cast<std::size_t>(f0.xt.size()) != sd.size())
        throw Error(ErrorCode::DimensionMismatch, "fluctuation size does not match the spectrum");
    if (std::abs(f0.xt.sum()) > zero_mean_tolerance(f0.xt) || std::abs(f0.vt.sum()) > zero_mean_tolerance(f0.vt))
        throw Error(ErrorCode::NonzeroMeanInput, "fluctuations must sum to zero");
    const double scale = std::max(1.0, std::abs(sd.eigenvalues(sd.eigenvalues.size() - 1)));
    if (sd.size() < 2 || sd.lambda(1) <= kDistinctRelTol * scale)
        throw Error(ErrorCode::Disconnected, "closed form needs lambda_2 > 0");

    const Eigen::MatrixXd& q = sd.eigenvectors;
    const Eigen::VectorXd c = q.transpose() * f0.xt;
    const Eigen::VectorXd d = q.transpose() * f0.vt;
    Eigen::VectorXd cx = Eigen::VectorXd::Zero(c.size());
    Eigen::VectorXd cv = Eigen::VectorXd::Zero(c.size());
    for (Eigen::Index l = 1; l < c.size(); ++l) {
        const double w = std::sqrt(sd.eigenvalues(l));
        const double cs = std::cos(w * dt);
        const double sn = std::sin(w * dt);
        cx(l) = c(l) * cs + d(l) * sn / w;
        cv(l) = -c(l) * w * sn + d(l) * cs;
    }

    FluctuationState f;
    f.t = f0.t + dt;
    f.xt = q * cx;
    f.vt = q * cv;
    f.vbar = f0.vbar;
    f.xbar = f0.xbar + f0.vbar * dt;
    return f;
}

SystemState integrate_step(const SystemState& s, const Topology& topo, double h)
{
    if (!(h > 0.0))
        throw Error(ErrorCode::NonpositiveStep, "step must be positive, got " + std::to_string(h));
    require_same_size(s.x, s.v, "state x/v");
    if (static_cast<std::size_t>(s.x.size()) != topo.size())
        throw Error(ErrorCode::DimensionMismatch, "state size does not match the topology");

    const Eigen::Index n = s.x.size();
    Eigen::VectorXd y(2 * n);
    y << s.x, s.v;
    y = rk4_physical(y, topo.laplacian(), h);

    SystemState out{s.t + h, y.head(n), y.tail(n), s.mode};
    return out;
}

double subsystem_energy(const FluctuationState& f, const Topology& topo)
{
    return energy_metric(f, topo);
}

Trace simulate_switched(const TopologySet& ts, const SwitchingSignal& sigma, const Eigen::VectorXd& x0,
                        const Eigen::VectorXd& v0, double t_end, const SimulationOptions& opts)
{
    require_same_size(x0, v0, "initial x/v");
    if (static_cast<std::size_t>(x0.size()) != ts.agents())
        throw Error(ErrorCode::DimensionMismatch, "initial state size does not match the topology set");
    if (sigma.empty() || sigma.front().t != 0.0)
        throw Error(ErrorCode::UnorderedSwitchTimes, "switching signal must start at t = 0");
    for (std::size_t k = 0; k < sigma.size(); ++k) {
        if (sigma[k].mode >= ts.modes())
            throw Error(ErrorCode::UnknownMode, "mode " + std::to_string(sigma[k].mode + 1) + " not in the set");
        if (k > 0 && !(sigma[k].t > sigma[k - 1].t))
            throw Error(ErrorCode::UnorderedSwitchTimes, "switch times must be strictly increasing");
    }
    if (!(opts.dt_sample > 0.0) || !(opts.h > 0.0))
        throw Error(ErrorCode::NonpositiveStep, "sampling interval and step must be positive");

    const SystemState initial{0.0, x0, v0, sigma.front().mode};
    const Eigen::Index n = x0.size();

    Trace trace;
    trace.dt = opts.dt_sample;
    auto record = [&](const FluctuationState& f, std::size_t mode) {
        SystemState s = from_fluctuations(f, mode);
        trace.samples.push_back({f.t, std::move(s.x), std::move(s.v), mode, metric_F(f, opts.varpi)});
    };

    const auto last_grid = static_cast<long>(std::floor(t_end / opts.dt_sample + 1e-9));
    long grid = 0;

    FluctuationState seg_start = to_fluctuations(initial, initial);
    for (std::size_t k = 0; k < sigma.size() && sigma[k].t <= t_end; ++k) {
        const double t0 = sigma[k].t;
        const double t1 = (k + 1 < sigma.size()) ? std::min(sigma[k + 1].t, t_end) : t_end;
        const bool last = (k + 1 >= sigma.size()) || sigma[k + 1].t > t_end;
        const std::size_t mode = sigma[k].mode;
        const SpectralData& sd = ts.spectra[mode];
        const Eigen::MatrixXd& lap = ts.topologies[mode].laplacian();

        seg_start.t = t0;
        trace.switch_times.push_back(t0);
        record(seg_start, mode);

        // RK4 carries [x; v] from sample to sample within the segment.
        Eigen::VectorXd y(2 * n);
        double y_t = t0;
        if (opts.propagator == Propagator::RungeKutta) {
            const SystemState s = from_fluctuations(seg_start, mode);
            y << s.x, s.v;
        }
        auto state_at = [&](double t) {
            if (opts.propagator == Propagator::ClosedForm)
                return closed_form_propagate(seg_start, sd, t - t0);
            y = integrate_span(y, lap, y_t, t, opts.h);
            y_t = t;
            SystemState s{t, y.head(n), y.tail(n), mode};
            return to_fluctuations(s, initial);
        };

        for (; grid <= last_grid; ++grid) {
            const double tg = static_cast<double>(grid) * opts.dt_sample;
            if (tg <= t0)
                continue;
            if (last ? tg > t1 : tg >= t1)
                break;
            record(state_at(tg), mode);
        }
        if (!last) {
            seg_start = state_at(t1);
            seg_start.t = t1;
        }
    }
    return trace;
}

void write_trace_csv(std::ostream& out, const Trace& trace)
{
    const Eigen::Index n = trace.samples.empty() ? 0 : trace.samples.front().x.size();
    out << "t";
    for (Eigen::Index i = 0; i < n; ++i)
        out << ",x" << (i + 1);
    for (Eigen::Index i = 0; i < n; ++i)
        out << ",v" << (i + 1);
    out << ",sigma,F\n";
    for (const auto& s : trace.samples) {
        out << format17(s.t);
        for (Eigen::Index i = 0; i < n; ++i)
            out << ',' << format17(s.x(i));
        for (Eigen::Index i = 0; i < n; ++i)
            out << ',' << format17(s.v(i));
        out << ',' << (s.mode + 1) << ',' << format17(s.F) << '\n';
    }
}

} // namespace topoflock
