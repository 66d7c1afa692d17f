#include "topoflock/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "topoflock/error.hpp"

namespace topoflock {

namespace {

std::string cell(Eigen::Index i, Eigen::Index j)
{
    return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

// Unweighted BFS distances from a source; -1 marks unreachable vertices.
std::vector<int> bfs_distances(const Topology& topo, std::size_t source)
{
    const std::size_t n = topo.size();
    std::vector<int> dist(n, -1);
    std::deque<std::size_t> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t w = 0; w < n; ++w) {
            if (dist[w] < 0 && topo.has_edge(u, w)) {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

} // namespace

Topology build_topology(const Eigen::MatrixXd& weights)
{
    if (weights.rows() != weights.cols())
        throw Error(ErrorCode::DimensionMismatch, "weight matrix must be square");
    const Eigen::Index n = weights.rows();
    if (n < 2)
        throw Error(ErrorCode::TooFewAgents, "need at least 2 agents, got " + std::to_string(n));

    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(weights(i, i)) || weights(i, i) != 0.0)
            throw Error(ErrorCode::NonzeroDiagonal, "self-loop at " + cell(i, i));
        for (Eigen::Index j = 0; j < n; ++j) {
            const double a = weights(i, j);
            if (!std::isfinite(a) || a < 0.0)
                throw Error(ErrorCode::NegativeWeight, "weight at " + cell(i, j) + " is " + std::to_string(a));
            if (std::abs(a - weights(j, i)) > kSymmetryTolerance)
                throw Error(ErrorCode::AsymmetricWeights, "a" + cell(i, j) + " != a" + cell(j, i));
        }
    }

    Topology topo;
    topo.weights_ = 0.5 * (weights + weights.transpose());
    topo.laplacian_ = -topo.weights_;
    for (Eigen::Index i = 0; i < n; ++i) {
        double degree = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            degree += topo.weights_(i, j);
        topo.laplacian_(i, i) = degree;
    }
    return topo;
}

bool is_connected(const Topology& topo)
{
    const auto dist = bfs_distances(topo, 0);
    return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

int diameter(const Topology& topo)
{
    int best = 0;
    for (std::size_t s = 0; s < topo.size(); ++s) {
        for (int d : bfs_distances(topo, s)) {
            if (d < 0)
                throw Error(ErrorCode::Disconnected, "diameter undefined for a disconnected graph");
            best = std::max(best, d);
        }
    }
    return best;
}

int min_distinct_eigenvalue_bound(const Topology& topo)
{
    return diameter(topo) + 1;
}

nlohmann::json to_json(const Topology& topo)
{
    const auto& w = topo.weights();
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            row.push_back(w(i, j));
        rows.push_back(std::move(row));
    }
    return {{"n", topo.size()}, {"weights", std::move(rows)}};
}

Topology topology_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("weights") || !j.at("weights").is_array())
        throw Error(ErrorCode::ParseError, "topology needs a \"weights\" array");
    const auto& rows = j.at("weights");
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (j.contains("n") && j.at("n").get<Eigen::Index>() != n)
        throw Error(ErrorCode::ParseError, "\"n\" does not match the weight matrix size");

    Eigen::MatrixXd w(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = rows.at(static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw Error(ErrorCode::ParseError, "weight matrix row " + std::to_string(r + 1) + " has wrong length");
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto& v = row.at(static_cast<std::size_t>(c));
            if (!v.is_number())
                throw Error(ErrorCode::ParseError, "non-numeric weight at " + cell(r, c));
            w(r, c) = v.get<double>();
        }
    }
    return build_topology(w);
}

} // namespace topoflock
