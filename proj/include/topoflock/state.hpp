#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace topoflock {

/// Physical state of the network: positions, velocities and the active mode
/// (0-based index into the topology set).
struct SystemState {
    double t = 0.0;
    Eigen::VectorXd x;
    Eigen::VectorXd v;
    std::size_t mode = 0;
};

/// Deviations from the moving average position xbar(t) = mean(x0) + mean(v0) t
/// and the conserved average velocity vbar. Both xt and vt sum to zero.
struct FluctuationState {
    double t = 0.0;
    Eigen::VectorXd xt;
    Eigen::VectorXd vt;
    double xbar = 0.0;
    double vbar = 0.0;
};

struct TraceSample {
    double t = 0.0;
    Eigen::VectorXd x;
    Eigen::VectorXd v;
    std::size_t mode = 0;
    double F = 0.0;
};

/// Time-ordered simulation record. Samples have strictly increasing t; the
/// mode is constant between consecutive switch times.
struct Trace {
    std::vector<TraceSample> samples;
    std::vector<double> switch_times;
    double dt = 0.0;
};

} // namespace topoflock
