#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cd = std::complex<double>;

/// e^{-iHt} v through the Pade scaling-and-squaring matrix exponential.
inline Eigen::VectorXcd expm_propagate(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& v, double t) {
    const Eigen::MatrixXcd a = cd(0.0, -t) * h;
    return a.exp() * v;
}

/// Solves (z - H) x = e_source for an open tridiagonal chain with hopping xi (Thomas algorithm).
inline std::vector<cd> chain_resolvent_column(double xi, cd z, int sites, int source) {
    const auto n = static_cast<std::size_t>(sites);
    std::vector<cd> c(n), d(n, cd(0.0));
    d[static_cast<std::size_t>(source)] = 1.0;
    const cd off = -xi;
    c[0] = off / z;
    d[0] = d[0] / z;
    for (std::size_t i = 1; i < n; ++i) {
        const cd m = z - off * c[i - 1];
        c[i] = off / m;
        d[i] = (d[i] - off * d[i - 1]) / m;
    }
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
    return d;
}

/// <center + d|(omega + i eta - H)^{-1}|center> for d = 0..max_d on a finite chain, Richardson-extrapolated
/// to eta -> 0+ from eta, eta/2 and eta/4. The chain must be long enough that sites * eta / v_g >> 1.
inline std::vector<cd> finite_chain_green(double xi, double omega, int max_d, int sites = 200001,
                                          double eta_over_xi = 4e-3) {
    const int center = sites / 2;
    const double eta = eta_over_xi * xi;
    const auto g1 = chain_resolvent_column(xi, cd(omega, eta), sites, center);
    const auto g2 = chain_resolvent_column(xi, cd(omega, eta / 2), sites, center);
    const auto g4 = chain_resolvent_column(xi, cd(omega, eta / 4), sites, center);
    std::vector<cd> out;
    for (int d = 0; d <= max_d; ++d) {
        const auto i = static_cast<std::size_t>(center + d);
        const cd r1 = 2.0 * g2[i] - g1[i];
        const cd r2 = 2.0 * g4[i] - g2[i];
        out.push_back((4.0 * r2 - r1) / 3.0);
    }
    return out;
}

/// Number of eigenvalues below x of an open chain with hopping xi (Sturm sequence count).
inline long eigenvalues_below(double xi, double x, int sites) {
    long count = 0;
    double q = -x;
    for (int i = 0; i < sites; ++i) {
        if (i > 0) q = -x - xi * xi / q;
        if (q == 0.0) q = -1e-300;
        if (q < 0.0) ++count;
    }
    return count;
}

/// Eigenvalue count of an open chain in [omega - w/2, omega + w/2) divided by sites * w.
inline double histogram_dos(double xi, double omega, int sites, double width) {
    const long count = eigenvalues_below(xi, omega + width / 2, sites) - eigenvalues_below(xi, omega - width / 2, sites);
    return static_cast<double>(count) / (sites * width);
}

}  // namespace oracle
