#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "topoflock/graph.hpp"
#include "topoflock/spectral.hpp"
#include "topoflock/state.hpp"

namespace topoflock {

/// Classical fourth-order Runge-Kutta step for y' = f(y).
template <typename Vector, typename Rhs>
Vector rk4_step(const Vector& y, double h, Rhs&& f)
{
    const Vector k1 = f(y);
    const Vector k2 = f(Vector(y + 0.5 * h * k1));
    const Vector k3 = f(Vector(y + 0.5 * h * k2));
    const Vector k4 = f(Vector(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Fluctuations of s relative to the averages fixed by the initial state.
/// Throws DimensionMismatch.
FluctuationState to_fluctuations(const SystemState& s, const SystemState& initial);

/// Recombines fluctuations with the average motion.
SystemState from_fluctuations(const FluctuationState& f, std::size_t mode);

/// Exact propagation of the fixed-mode fluctuation dynamics over dt via the
/// modal expansion over eigenpairs 2..n.
/// Throws NonzeroMeanInput, Disconnected.
FluctuationState closed_form_propagate(const FluctuationState& f0, const SpectralData& sd, double dt);

/// One RK4 step of x' = v, v' = -L x. Throws NonpositiveStep.
SystemState integrate_step(const SystemState& s, const Topology& topo, double h);

/// Half-energy of the active subsystem: xt' L xt / 2 + vt' vt / 2.
double subsystem_energy(const FluctuationState& f, const Topology& topo);

struct SwitchEvent {
    double t = 0.0;
    std::size_t mode = 0;
};

using SwitchingSignal = std::vector<SwitchEvent>;

enum class Propagator { ClosedForm, RungeKutta };

struct SimulationOptions {
    double h = 1e-3;
    double dt_sample = 1e-2;
    Propagator propagator = Propagator::ClosedForm;
    /// Weight of the position term in the recorded metric F.
    double varpi = 0.5;
};

/// Piecewise propagation of the switched system. Samples every dt_sample plus
/// one row at every switch instant; state is continuous across switches.
/// Throws UnorderedSwitchTimes, UnknownMode, DimensionMismatch.
Trace simulate_switched(const TopologySet& ts, const SwitchingSignal& sigma, const Eigen::VectorXd& x0,
                        const Eigen::VectorXd& v0, double t_end, const SimulationOptions& opts = {});

/// Trace CSV with header t,x1..xn,v1..vn,sigma,F; modes are written 1-based
/// and floats with 17 significant digits.
void write_trace_csv(std::ostream& out, const Trace& trace);

} // namespace topoflock
