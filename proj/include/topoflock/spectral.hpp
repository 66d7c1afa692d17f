#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "topoflock/graph.hpp"
#include "topoflock/rational.hpp"

namespace topoflock {

/// Ascending eigenvalues and matching orthonormal eigenvectors (columns) of a
/// Laplacian. Each eigenvector is sign-normalized so its first entry with
/// magnitude above 1e-12 is positive.
struct SpectralData {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;

    std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
    double lambda(std::size_t i) const { return eigenvalues(static_cast<Eigen::Index>(i)); }
};

struct JacobiOptions {
    double rel_tol = 1e-13;
    int max_sweeps = 100;
};

/// Throws ConvergenceFailure if the sweep cap is exceeded.
SpectralData eigendecompose(const Topology& topo, const JacobiOptions& opts = {});

/// Relative clustering tolerance used for eigenvalue distinctness:
/// lambda_i and lambda_j are distinct iff |lambda_i - lambda_j| > 1e-9 * max(1, |lambda_n|).
inline constexpr double kDistinctRelTol = 1e-9;

bool has_distinct_eigenvalues(const SpectralData& sd);
std::size_t count_distinct_eigenvalues(const SpectralData& sd);

struct RationalOptions {
    double tol = 1e-9;
    std::int64_t max_den = 1000;
};

/// sqrt(lambda_i / lambda_j) ~= ratio for 0-based eigenvalue indices i < j.
struct RatioCertificate {
    std::size_t i = 0;
    std::size_t j = 0;
    Fraction ratio;
};

/// Certificates for every pair among eigenvalues 2..n (0-based 1..n-1).
/// Throws DegenerateSpectrum when lambda_2 <= 0 and RatioNotRational naming
/// the first pair without a bounded-denominator approximation.
std::vector<RatioCertificate> check_rational_ratios(const SpectralData& sd, const RationalOptions& opts = {});

/// Fixed-topology period T = (multiple.num / multiple.den) * base, where
/// base = 2*pi / sqrt(lambda_2).
struct Period {
    Fraction multiple;
    double base = 0.0;
    double value = 0.0;
};

/// lcm of the modal periods 2*pi/sqrt(lambda_i), i = 2..n, computed over the
/// integer certificates. Throws MissingRatioCertificate when a pair (2, i) is
/// absent, ArithmeticOverflow on integer overflow.
Period period(const SpectralData& sd, const std::vector<RatioCertificate>& certs);

/// A validated mode set: every topology connected, common n, rational
/// eigenvalue-root ratios in every mode, and at least one mode with
/// all-distinct eigenvalues.
struct TopologySet {
    std::vector<Topology> topologies;
    std::vector<SpectralData> spectra;
    std::vector<std::vector<RatioCertificate>> certificates;
    std::vector<Period> periods;
    std::vector<bool> distinct;
    std::vector<int> diameters;

    std::size_t modes() const noexcept { return topologies.size(); }
    std::size_t agents() const noexcept { return topologies.empty() ? 0 : topologies.front().size(); }
};

/// Throws SizeMismatch (fewer than two modes or unequal n), Disconnected,
/// ConditionAViolated or ConditionBViolated.
TopologySet validate_topology_set(const std::vector<Topology>& topologies, const RationalOptions& opts = {});

/// Report body for a validated set; eigenvalues carry 17 significant digits.
nlohmann::json to_json(const TopologySet& ts);

/// Determinant of the Vandermonde matrix with rows a^0, a^1, ..., a^{n-1}:
/// (-1)^{(n^2-n)/2} * prod_{i<j} (a_i - a_j).
template <typename Derived>
typename Derived::Scalar vandermonde_det(const Eigen::MatrixBase<Derived>& a)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = a.size();
    Scalar prod(1);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            prod *= a(i) - a(j);
    return ((n * n - n) / 2) % 2 == 0 ? prod : -prod;
}

} // namespace topoflock
