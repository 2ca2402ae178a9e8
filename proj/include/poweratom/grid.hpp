#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "poweratom/errors.hpp"

namespace poweratom {

enum class Spacing { Uniform, Log };

inline std::string to_string(Spacing s) {
    return s == Spacing::Uniform ? "uniform" : "log";
}

inline Spacing spacing_from_string(const std::string& s) {
    if (s == "uniform") return Spacing::Uniform;
    if (s == "log") return Spacing::Log;
    throw ParameterError("unknown spacing kind: " + s);
}

// Radial discretization of (0, r_max] with quadrature weights for
// integrals over [0, r_max]. Nodes are strictly inside the domain; the
// reduced radial functions satisfy Dirichlet conditions at r = 0 and
// r = r_max.
//
// Weighted representation convention: every operator/kernel matrix B
// stores B_ij = sqrt(w_i) * b(r_i, r_j) * sqrt(w_j), so that matrix
// trace = operator trace, matrix product = operator composition and
// matrix eigenvalue constraints = operator spectral constraints.
struct RadialGrid {
    std::vector<double> r;   // nodes, strictly increasing, all > 0
    std::vector<double> w;   // quadrature weights, all > 0, sum = r_max
    std::vector<double> sw;  // sqrt(w)
    Spacing kind = Spacing::Uniform;
    double r_min = 0.0;  // first node
    double r_max = 0.0;  // Dirichlet wall (beyond the last node)
    std::size_t n = 0;

    Eigen::Index size() const { return static_cast<Eigen::Index>(n); }

    // Stable identifier used for provenance in output files.
    std::string id() const {
        // FNV-1a over the defining parameters.
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t v) {
            for (int i = 0; i < 8; ++i) {
                h ^= (v >> (8 * i)) & 0xff;
                h *= 1099511628211ull;
            }
        };
        auto mixd = [&](double d) {
            std::uint64_t v;
            static_assert(sizeof(v) == sizeof(d));
            std::memcpy(&v, &d, 8);
            mix(v);
        };
        mixd(r_min);
        mixd(r_max);
        mix(n);
        mix(kind == Spacing::Uniform ? 0u : 1u);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "g%016llx",
                      static_cast<unsigned long long>(h));
        return buf;
    }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Builds the grid. Uniform: n nodes r_i = r_min + i*h with
// h = (r_max - r_min)/n, so the Dirichlet wall at r_max sits one
// spacing beyond the last node. Log: the same construction on
// t = log r; each node owns the cell between the midpoints of its
// neighbours (in the spacing parameter), the first cell is closed at
// r = 0 and the last at r_max, so the weights sum to r_max exactly.
inline RadialGrid build_grid(double r_min, double r_max, std::size_t n,
                             Spacing kind) {
    if (!(r_min > 0.0) || !(r_min < r_max))
        throw ParameterError("build_grid: need 0 < r_min < r_max");
    if (n < 16) throw ParameterError("build_grid: need n >= 16");

    RadialGrid g;
    g.kind = kind;
    g.r_min = r_min;
    g.r_max = r_max;
    g.n = n;
    g.r.resize(n);
    g.w.resize(n);
    g.sw.resize(n);

    if (kind == Spacing::Uniform) {
        const double h = (r_max - r_min) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            g.r[i] = r_min + static_cast<double>(i) * h;
    } else {
        const double t0 = std::log(r_min);
        const double ht = (std::log(r_max) - t0) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i)
            g.r[i] = std::exp(t0 + static_cast<double>(i) * ht);
    }

    // Trapezoid rule in the spacing parameter (Jacobian r_i for log),
    // closed at both ends by rectangles covering [0, r_0] and
    // [r_{n-1}, r_max]. Sums to exactly r_max on uniform grids.
    for (std::size_t i = 0; i < n; ++i) {
        const double jac = (kind == Spacing::Uniform) ? 1.0 : g.r[i];
        const double h = (kind == Spacing::Uniform)
                             ? (r_max - r_min) / static_cast<double>(n)
                             : (std::log(r_max) - std::log(r_min)) /
                                   static_cast<double>(n);
        g.w[i] = h * jac;
        if (i == 0 || i + 1 == n) g.w[i] *= 0.5;
    }
    g.w[0] += g.r[0];
    g.w[n - 1] += r_max - g.r[n - 1];
    for (std::size_t i = 0; i < n; ++i) {
        if (!(g.w[i] > 0.0)) throw NumericError("build_grid: bad weight");
        g.sw[i] = std::sqrt(g.w[i]);
    }
    return g;
}

// Reduced radial kinetic operator -d^2/dr^2 + l(l+1)/r^2 in the
// weighted representation, Dirichlet at r = 0 and r = r_max. The
// second-difference part is the P1 stiffness form
//   sum_edges (f_{i+1} - f_i)^2 / d_edge
// including the two boundary edges, conjugated by W^{-1/2}; the
// centrifugal term is exactly diag(l(l+1)/r_i^2).
struct ChannelOperator {
    int ell = 0;
    Eigen::MatrixXd H;
};

inline ChannelOperator channel_kinetic(const RadialGrid& grid, int ell) {
    if (ell < 0) throw ParameterError("channel_kinetic: need ell >= 0");
    const Eigen::Index n = grid.size();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);

    // Edge lengths: boundary edges reach r = 0 and r = r_max.
    auto edge = [&](Eigen::Index i) -> double {
        if (i < 0) return grid.r[0];
        if (i + 1 >= n) return grid.r_max - grid.r[n - 1];
        return grid.r[i + 1] - grid.r[i];
    };

    for (Eigen::Index i = 0; i < n; ++i) {
        double diag = 1.0 / edge(i - 1) + 1.0 / edge(i);
        H(i, i) = diag / grid.w[i];
        if (i + 1 < n) {
            const double off =
                -1.0 / (edge(i) * grid.sw[i] * grid.sw[i + 1]);
            H(i, i + 1) = off;
            H(i + 1, i) = off;
        }
    }
    const double ll1 = static_cast<double>(ell) * (ell + 1);
    for (Eigen::Index i = 0; i < n; ++i)
        H(i, i) += ll1 / (grid.r[i] * grid.r[i]);
    return ChannelOperator{ell, std::move(H)};
}

// Raw multipole kernel values m_k(r, s) = min^k / max^{k+1}; k = 0 is
// the radial Coulomb kernel 1/max(r, s).
inline Eigen::MatrixXd multipole_kernel_raw(const RadialGrid& grid, int k) {
    if (k < 0) throw ParameterError("multipole_kernel: need k >= 0");
    const Eigen::Index n = grid.size();
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double lo = grid.r[j], hi = grid.r[i];
            double v = 1.0 / hi;
            if (k > 0) v *= std::pow(lo / hi, k);
            M(i, j) = v;
            M(j, i) = v;
        }
    }
    return M;
}

// Weighted multipole kernel sqrt(w_i) m_k(r_i, r_j) sqrt(w_j).
inline Eigen::MatrixXd multipole_kernel(const RadialGrid& grid, int k) {
    Eigen::MatrixXd M = multipole_kernel_raw(grid, k);
    const Eigen::Index n = grid.size();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) M(i, j) *= grid.sw[i] * grid.sw[j];
    return M;
}

inline Eigen::MatrixXd hartree_kernel(const RadialGrid& grid) {
    return multipole_kernel(grid, 0);
}

}  // namespace poweratom
