#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "topoflock/graph.hpp"

namespace topoflock::testing {

/// Weights for the four-agent star a12 = a13 = a14 = hub plus an optional a23.
inline Eigen::MatrixXd star_weights(double hub, double a23)
{
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(4, 4);
    w(0, 1) = w(1, 0) = hub;
    w(0, 2) = w(2, 0) = hub;
    w(0, 3) = w(3, 0) = hub;
    w(1, 2) = w(2, 1) = a23;
    return w;
}

inline std::vector<Topology> unit_star_set() { return {build_topology(star_weights(1, 0)), build_topology(star_weights(1, 4))}; }
inline std::vector<Topology> heavy_star_set()
{
    return {build_topology(star_weights(400, 0)), build_topology(star_weights(400, 1600))};
}

inline Eigen::VectorXd reference_initial() { return (Eigen::VectorXd(4) << 4, 2, 3, 4).finished(); }

inline Eigen::VectorXd normal_vector(std::mt19937_64& rng, Eigen::Index n)
{
    std::normal_distribution<double> nd;
    Eigen::VectorXd v(n);
    for (auto& x : v)
        x = nd(rng);
    return v;
}

inline Eigen::VectorXd zero_mean(std::mt19937_64& rng, Eigen::Index n)
{
    Eigen::VectorXd v = normal_vector(rng, n);
    return v.array() - v.mean();
}

/// Random connected weighted graph; weights uniform in [lo, hi] on a
/// spanning path plus each other pair with probability p.
inline Eigen::MatrixXd random_connected_weights(std::mt19937_64& rng, int n, double p = 0.4, double lo = 0.5,
                                                double hi = 3.0, bool unit = false)
{
    std::uniform_real_distribution<double> weight(lo, hi);
    std::bernoulli_distribution edge(p);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    auto set = [&](int i, int j) { w(i, j) = w(j, i) = unit ? 1.0 : weight(rng); };
    for (int k = 0; k + 1 < n; ++k)
        set(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k + 1)]);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (w(i, j) == 0.0 && edge(rng))
                set(i, j);
    return w;
}

} // namespace topoflock::testing
