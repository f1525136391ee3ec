#pragma once

// Real roots of a dense polynomial via Eigen's balanced companion-matrix solver,
// followed by Newton polishing in the working precision.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/Polynomials>

namespace ptdp {

/// Horner evaluation; coefficients in descending order.
template <typename Derived>
typename Derived::Scalar horner(const Eigen::MatrixBase<Derived>& desc, typename Derived::Scalar x)
{
    using Scalar = typename Derived::Scalar;
    Scalar acc(0);
    for (Eigen::Index i = 0; i < desc.size(); ++i) acc = acc * x + desc(i);
    return acc;
}

/// Real roots sorted ascending. A root is kept when its imaginary part is
/// below `imag_tol` relative to its modulus.
template <typename Derived>
std::vector<typename Derived::Scalar> real_roots(const Eigen::MatrixBase<Derived>& desc,
                                                 typename Derived::Scalar imag_tol = typename Derived::Scalar(1e-7))
{
    using Scalar = typename Derived::Scalar;
    using std::abs;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Eigen::Index lead = 0;
    while (lead < desc.size() && desc(lead) == Scalar(0)) ++lead;
    const Eigen::Index degree = desc.size() - lead - 1;
    if (degree < 1) return {};

    Vec trimmed = desc.segment(lead, degree + 1);
    Vec ascending = trimmed.reverse();
    Vec derivative(degree);
    for (Eigen::Index i = 0; i < degree; ++i) derivative(i) = trimmed(i) * Scalar(degree - i);

    Eigen::PolynomialSolver<Scalar, Eigen::Dynamic> solver(ascending);
    std::vector<Scalar> out;
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
        const auto z = solver.roots()(i);
        if (abs(z.imag()) > imag_tol * std::max(Scalar(1), abs(z))) continue;
        Scalar x = z.real();
        for (int it = 0; it < 8; ++it) {
            const Scalar d = horner(derivative, x);
            if (d == Scalar(0)) break;
            const Scalar step = horner(trimmed, x) / d;
            x -= step;
            if (abs(step) <= std::numeric_limits<Scalar>::epsilon() * abs(x)) break;
        }
        out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace ptdp
