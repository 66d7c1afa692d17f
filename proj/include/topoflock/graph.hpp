#pragma once

#include <cstddef>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace topoflock {

/// Weighted undirected interaction graph together with its Laplacian.
///
/// Immutable once built. The Laplacian is assembled from the symmetrized
/// weights so that l_ii = sum_j a_ij and l_ij = -a_ij.
class Topology {
public:
    std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
    const Eigen::MatrixXd& weights() const noexcept { return weights_; }
    const Eigen::MatrixXd& laplacian() const noexcept { return laplacian_; }

    /// Edge (i, j) exists iff a_ij > 0 strictly.
    bool has_edge(std::size_t i, std::size_t j) const
    {
        return weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0;
    }

private:
    friend Topology build_topology(const Eigen::MatrixXd& weights);

    Eigen::MatrixXd weights_;
    Eigen::MatrixXd laplacian_;
};

inline constexpr double kSymmetryTolerance = 1e-12;

/// Validates a weight matrix and assembles the Laplacian.
/// Throws TooFewAgents, NonzeroDiagonal, NegativeWeight or AsymmetricWeights.
Topology build_topology(const Eigen::MatrixXd& weights);

bool is_connected(const Topology& topo);

/// Longest shortest unweighted path. Throws Disconnected.
int diameter(const Topology& topo);

/// Lower bound on the number of distinct Laplacian eigenvalues of a connected
/// graph: diameter + 1.
int min_distinct_eigenvalue_bound(const Topology& topo);

nlohmann::json to_json(const Topology& topo);

/// Accepts {"n": int, "weights": [[...], ...]}; "n" is optional but must
/// match when present. Throws ParseError on shape problems.
Topology topology_from_json(const nlohmann::json& j);

} // namespace topoflock
