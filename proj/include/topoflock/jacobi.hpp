#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include <Eigen/Dense>

namespace topoflock {

template <typename Scalar>
struct JacobiResult {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eigenvalues;               // unsorted diagonal
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> eigenvectors; // columns
    int sweeps = 0;
};

/// Cyclic Jacobi rotations for a symmetric matrix.
///
/// Stops once the off-diagonal Frobenius norm drops to rel_tol * ||A||_F.
/// Returns nullopt when max_sweeps is exhausted first.
template <typename Derived>
std::optional<JacobiResult<typename Derived::Scalar>>
jacobi_eigen(const Eigen::MatrixBase<Derived>& input, typename Derived::Scalar rel_tol, int max_sweeps)
{
    using Scalar = typename Derived::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Mat a = input;
    const Eigen::Index n = a.rows();
    Mat v = Mat::Identity(n, n);
    const Scalar threshold = rel_tol * a.norm();

    auto off_norm = [&a, n] {
        Scalar s(0);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j)
                    s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
        if (off_norm() <= threshold)
            return JacobiResult<Scalar>{a.diagonal(), v, sweep};
        if (sweep == max_sweeps)
            break;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Scalar apq = a(p, q);
                if (apq == Scalar(0))
                    continue;
                // Rotation angle chosen to zero a(p,q); the smaller root keeps |t| <= 1.
                const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
                const Scalar t = (theta >= Scalar(0) ? Scalar(1) : Scalar(-1))
                                 / (std::abs(theta) + std::sqrt(theta * theta + Scalar(1)));
                const Scalar c = Scalar(1) / std::sqrt(t * t + Scalar(1));
                const Scalar s = t * c;

                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar akp = a(k, p);
                    const Scalar akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar apk = a(p, k);
                    const Scalar aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = Scalar(0);
                a(q, p) = Scalar(0);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Scalar vkp = v(k, p);
                    const Scalar vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    return std::nullopt;
}

} // namespace topoflock
