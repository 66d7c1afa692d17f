#include "topoflock/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "topoflock/error.hpp"

namespace topoflock {

double metric_F_local(std::size_t i, const FluctuationState& f, double varpi)
{
    if (i >= static_cast<std::size_t>(f.xt.size()))
        throw Error(ErrorCode::IndexOutOfRange, "agent " + std::to_string(i) + " out of range");
    const auto k = static_cast<Eigen::Index>(i);
    return 0.5 * varpi * f.xt(k) * f.xt(k) + 0.5 * f.vt(k) * f.vt(k);
}

Eigen::VectorXd metric_F_locals(const FluctuationState& f, double varpi)
{
    return 0.5 * varpi * f.xt.array().square() + 0.5 * f.vt.array().square();
}

double metric_Fdot(const FluctuationState& f, const Topology& topo, double varpi)
{
    return f.vt.dot(varpi * f.xt - topo.laplacian() * f.xt);
}

Eigen::VectorXd metric_Fdot_locals(const FluctuationState& f, const Topology& topo, double varpi)
{
    const Eigen::VectorXd drift = varpi * f.xt - topo.laplacian() * f.xt;
    return f.vt.cwiseProduct(drift);
}

bool varpi_admissible(const TopologySet& ts, double varpi)
{
    if (!(varpi > 0.0))
        return false;
    for (std::size_t r = 0; r < ts.modes(); ++r) {
        if (!ts.distinct[r])
            continue;
        const auto& sd = ts.spectra[r];
        for (std::size_t i = 1; i < sd.size(); ++i)
            if (std::abs(varpi - sd.lambda(i)) < kVarpiSeparation)
                return false;
    }
    return true;
}

double choose_varpi(const TopologySet& ts, double margin)
{
    double min_l2 = std::numeric_limits<double>::infinity();
    for (const auto& sd : ts.spectra) {
        if (sd.size() < 2 || !(sd.lambda(1) > 0.0))
            throw Error(ErrorCode::DegenerateSpectrum, "lambda_2 must be positive in every mode");
        min_l2 = std::min(min_l2, sd.lambda(1));
    }
    if (!(margin > 0.0))
        throw Error(ErrorCode::InvalidParams, "varpi margin must be positive");

    double varpi = margin * min_l2;
    // Nudge downwards until clear of every eigenvalue in every mode.
    for (int guard = 0; guard < 1000; ++guard) {
        bool moved = false;
        for (const auto& sd : ts.spectra) {
            for (std::size_t i = 1; i < sd.size(); ++i) {
                if (std::abs(varpi - sd.lambda(i)) < kVarpiSeparation) {
                    varpi = sd.lambda(i) - 10.0 * kVarpiSeparation;
                    moved = true;
                }
            }
        }
        if (!moved)
            break;
    }
    if (!(varpi > 0.0))
        throw Error(ErrorCode::DegenerateSpectrum, "no positive varpi separated from the spectrum");
    return varpi;
}

double energy_metric(const FluctuationState& f, const Topology& topo)
{
    return 0.5 * f.xt.dot(topo.laplacian() * f.xt) + 0.5 * f.vt.squaredNorm();
}

} // namespace topoflock
