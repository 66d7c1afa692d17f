#include "topoflock/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "topoflock/error.hpp"
#include "topoflock/jacobi.hpp"

namespace topoflock {

namespace {

double cluster_tolerance(const SpectralData& sd)
{
    const double top = sd.size() == 0 ? 0.0 : std::abs(sd.eigenvalues(sd.eigenvalues.size() - 1));
    return kDistinctRelTol * std::max(1.0, top);
}

void normalize_sign(Eigen::Ref<Eigen::VectorXd> q)
{
    for (Eigen::Index k = 0; k < q.size(); ++k) {
        if (std::abs(q(k)) > 1e-12) {
            if (q(k) < 0.0)
                q = -q;
            return;
        }
    }
}

bool lexicographic_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

} // namespace

SpectralData eigendecompose(const Topology& topo, const JacobiOptions& opts)
{
    const auto result = jacobi_eigen(topo.laplacian(), opts.rel_tol, opts.max_sweeps);
    if (!result)
        throw Error(ErrorCode::ConvergenceFailure,
                    "Jacobi did not converge within " + std::to_string(opts.max_sweeps) + " sweeps");

    const Eigen::Index n = result->eigenvalues.size();
    Eigen::MatrixXd vectors = result->eigenvectors;
    for (Eigen::Index k = 0; k < n; ++k)
        normalize_sign(vectors.col(k));

    const double top = result->eigenvalues.cwiseAbs().maxCoeff();
    const double tol = kDistinctRelTol * std::max(1.0, top);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double la = result->eigenvalues(a);
        const double lb = result->eigenvalues(b);
        if (std::abs(la - lb) > tol)
            return la < lb;
        return lexicographic_less(vectors.col(a), vectors.col(b));
    });

    SpectralData sd;
    sd.eigenvalues.resize(n);
    sd.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        sd.eigenvalues(k) = result->eigenvalues(src);
        sd.eigenvectors.col(k) = vectors.col(src);
    }
    return sd;
}

std::size_t count_distinct_eigenvalues(const SpectralData& sd)
{
    if (sd.size() == 0)
        return 0;
    const double tol = cluster_tolerance(sd);
    std::size_t count = 1;
    for (std::size_t i = 1; i < sd.size(); ++i)
        if (std::abs(sd.lambda(i) - sd.lambda(i - 1)) > tol)
            ++count;
    return count;
}

bool has_distinct_eigenvalues(const SpectralData& sd)
{
    return count_distinct_eigenvalues(sd) == sd.size();
}

std::vector<RatioCertificate> check_rational_ratios(const SpectralData& sd, const RationalOptions& opts)
{
    const std::size_t n = sd.size();
    if (n < 2 || sd.lambda(1) <= cluster_tolerance(sd))
        throw Error(ErrorCode::DegenerateSpectrum, "lambda_2 must be positive (connected graph)");

    std::vector<RatioCertificate> certs;
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double ratio = std::sqrt(sd.lambda(i) / sd.lambda(j));
            const auto frac = rational_within(ratio, opts.tol, opts.max_den);
            if (!frac)
                throw Error(ErrorCode::RatioNotRational,
                            "sqrt(lambda_" + std::to_string(i + 1) + "/lambda_" + std::to_string(j + 1)
                                + ") = " + std::to_string(ratio) + " has no approximation with denominator <= "
                                + std::to_string(opts.max_den));
            certs.push_back({i, j, *frac});
        }
    }
    return certs;
}

Period period(const SpectralData& sd, const std::vector<RatioCertificate>& certs)
{
    const std::size_t n = sd.size();
    if (n < 2 || !(sd.lambda(1) > 0.0))
        throw Error(ErrorCode::DegenerateSpectrum, "lambda_2 must be positive (connected graph)");

    // Modal period of lambda_i in units of base: sqrt(lambda_2 / lambda_i) = p_i / q_i.
    std::int64_t lcm_num = 1;
    std::int64_t gcd_den = 1;
    for (std::size_t i = 2; i < n; ++i) {
        const auto it = std::find_if(certs.begin(), certs.end(),
                                     [i](const RatioCertificate& c) { return c.i == 1 && c.j == i; });
        if (it == certs.end())
            throw Error(ErrorCode::MissingRatioCertificate, "no certificate for pair (2, " + std::to_string(i + 1) + ")");
        lcm_num = checked_lcm(lcm_num, it->ratio.num);
        gcd_den = std::gcd(gcd_den, it->ratio.den);
    }

    Period p;
    const std::int64_t g = std::gcd(lcm_num, gcd_den);
    p.multiple = {lcm_num / g, gcd_den / g};
    p.base = 2.0 * std::numbers::pi / std::sqrt(sd.lambda(1));
    p.value = p.base * static_cast<double>(p.multiple.num) / static_cast<double>(p.multiple.den);
    return p;
}

TopologySet validate_topology_set(const std::vector<Topology>& topologies, const RationalOptions& opts)
{
    if (topologies.size() < 2)
        throw Error(ErrorCode::SizeMismatch, "switching needs at least 2 topologies, got " + std::to_string(topologies.size()));
    const std::size_t n = topologies.front().size();

    TopologySet ts;
    for (std::size_t r = 0; r < topologies.size(); ++r) {
        const Topology& topo = topologies[r];
        const std::string label = "topology " + std::to_string(r + 1);
        if (topo.size() != n)
            throw Error(ErrorCode::SizeMismatch, label + " has " + std::to_string(topo.size()) + " agents, expected " + std::to_string(n));
        if (!is_connected(topo))
            throw Error(ErrorCode::Disconnected, label + " is not connected");

        SpectralData sd = eigendecompose(topo);
        std::vector<RatioCertificate> certs;
        try {
            certs = check_rational_ratios(sd, opts);
        } catch (const Error& e) {
            throw Error(ErrorCode::ConditionAViolated, label + ": " + e.what());
        }
        ts.periods.push_back(period(sd, certs));
        ts.distinct.push_back(has_distinct_eigenvalues(sd));
        ts.diameters.push_back(diameter(topo));
        ts.topologies.push_back(topo);
        ts.spectra.push_back(std::move(sd));
        ts.certificates.push_back(std::move(certs));
    }

    if (std::none_of(ts.distinct.begin(), ts.distinct.end(), [](bool d) { return d; }))
        throw Error(ErrorCode::ConditionBViolated, "no topology has all-distinct Laplacian eigenvalues");
    return ts;
}

nlohmann::json to_json(const TopologySet& ts)
{
    nlohmann::json modes = nlohmann::json::array();
    for (std::size_t r = 0; r < ts.modes(); ++r) {
        nlohmann::json eig = nlohmann::json::array();
        for (Eigen::Index k = 0; k < ts.spectra[r].eigenvalues.size(); ++k)
            eig.push_back(ts.spectra[r].eigenvalues(k));
        nlohmann::json certs = nlohmann::json::array();
        for (const auto& c : ts.certificates[r])
            certs.push_back({{"i", c.i + 1}, {"j", c.j + 1}, {"num", c.ratio.num}, {"den", c.ratio.den}});
        const Period& p = ts.periods[r];
        modes.push_back({
            {"mode", r + 1},
            {"eigenvalues", std::move(eig)},
            {"ratio_certificates", std::move(certs)},
            {"period", {{"multiple_num", p.multiple.num}, {"multiple_den", p.multiple.den}, {"base", p.base}, {"value", p.value}}},
            {"distinct_eigenvalues", static_cast<bool>(ts.distinct[r])},
            {"diameter", ts.diameters[r]},
        });
    }
    return {{"agents", ts.agents()}, {"modes", std::move(modes)}};
}

} // namespace topoflock
