#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "topoflock/graph.hpp"
#include "topoflock/spectral.hpp"
#include "topoflock/state.hpp"

namespace topoflock {

struct MetricConfig {
    double varpi = 0.5;
    double delta = 0.2;
    /// Fdot counts as zero when |Fdot| <= fdot_tol * max(1, F).
    double fdot_tol = 1e-9;
};

/// Minimum absolute separation between varpi and any nonzero eigenvalue.
inline constexpr double kVarpiSeparation = 1e-6;

/// F = varpi |xt|^2 / 2 + |vt|^2 / 2.
inline double metric_F(const FluctuationState& f, double varpi)
{
    return 0.5 * varpi * f.xt.squaredNorm() + 0.5 * f.vt.squaredNorm();
}

/// Agent i's share varpi xt_i^2 / 2 + vt_i^2 / 2. Throws IndexOutOfRange.
double metric_F_local(std::size_t i, const FluctuationState& f, double varpi);

/// All local shares at once; sums to metric_F.
Eigen::VectorXd metric_F_locals(const FluctuationState& f, double varpi);

/// Time derivative of F along the active mode: vt' (varpi I - L) xt.
double metric_Fdot(const FluctuationState& f, const Topology& topo, double varpi);

/// Agent i's share of Fdot: vt_i (varpi xt_i - (L xt)_i).
Eigen::VectorXd metric_Fdot_locals(const FluctuationState& f, const Topology& topo, double varpi);

/// varpi = margin * min_r lambda_2(L_r), pushed away from any eigenvalue it
/// lands within kVarpiSeparation of. Throws DegenerateSpectrum.
double choose_varpi(const TopologySet& ts, double margin = 0.5);

/// True when varpi > 0 and it is separated from lambda_2..lambda_n of every
/// distinct-eigenvalue mode.
bool varpi_admissible(const TopologySet& ts, double varpi);

/// The Laplacian-energy functional xt' L xt / 2 + vt' vt / 2, which is
/// constant along every fixed-mode flow.
double energy_metric(const FluctuationState& f, const Topology& topo);

} // namespace topoflock
