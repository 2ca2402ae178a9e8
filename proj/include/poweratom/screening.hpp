#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "poweratom/density_matrix.hpp"
#include "poweratom/errors.hpp"
#include "poweratom/minimizer.hpp"
#include "poweratom/thomas_fermi.hpp"

namespace poweratom {

namespace detail {

// Cumulative charge C(r) = int_{s < r} u(s) ds from the quadrature
// cells. Weight w_i is the width of the cell around node r_i, so the
// running sum through cell i is the charge up to that cell's *right
// edge*; interpolating at the node positions instead would bias every
// radius by half a cell. The density is treated as constant over each
// cell, which reproduces the quadrature exactly at the cell edges.
class CumulativeCharge {
   public:
    explicit CumulativeCharge(const RadialDensity& d) : grid_(d.grid) {
        const std::size_t n = grid_->size();
        cum_.resize(n);
        edge_.resize(n);
        dens_.resize(n);
        double acc = 0.0, e = std::max(
            0.0, grid_->r[0] - 0.5 * grid_->w[0]);
        edge0_ = e;
        for (std::size_t i = 0; i < n; ++i) {
            acc += grid_->w[i] * d.u[static_cast<Eigen::Index>(i)];
            e += grid_->w[i];
            cum_[i] = acc;
            edge_[i] = e;
            dens_[i] = d.u[static_cast<Eigen::Index>(i)];
        }
    }

    double total() const { return cum_.back(); }

    double enclosed(double r) const {
        if (r <= edge0_) return 0.0;
        if (r >= edge_.back()) return cum_.back();
        const auto it = std::upper_bound(edge_.begin(), edge_.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - edge_.begin());
        const double left = (i == 0) ? edge0_ : edge_[i - 1];
        const double below = (i == 0) ? 0.0 : cum_[i - 1];
        return below + dens_[i] * (r - left);
    }

   private:
    GridPtr grid_;
    std::vector<double> cum_;
    std::vector<double> edge_;
    std::vector<double> dens_;
    double edge0_ = 0.0;
};

}  // namespace detail

// Phi_r(R) = Z/R - int_{s < r} u(s) / max(R, s) ds.
inline double screened_potential(const RadialDensity& u, double Z, double r,
                                 double R) {
    if (R <= 0.0) throw ParameterError("screened_potential: R must be > 0");
    if (r < 0.0) throw ParameterError("screened_potential: r must be >= 0");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.grid->size(); ++i) {
        const double s = u.grid->r[i];
        if (s >= r) break;
        acc += u.grid->w[i] * u.u[static_cast<Eigen::Index>(i)] /
               std::max(R, s);
    }
    return Z / R - acc;
}

// Newton form of Phi_r(r): all screened charge sits inside r, so the
// kernel integral collapses to (Z - enclosed) / r.
inline double screened_potential_newton(const RadialDensity& u, double Z,
                                        double r) {
    if (r <= 0.0)
        throw ParameterError("screened_potential_newton: r must be > 0");
    double enclosed = 0.0;
    for (std::size_t i = 0; i < u.grid->size() && u.grid->r[i] < r; ++i)
        enclosed += u.grid->w[i] * u.u[static_cast<Eigen::Index>(i)];
    return (Z - enclosed) / r;
}

struct ScreenedProfile {
    std::vector<double> r;
    std::vector<double> phi;           // Phi_r(r) from the input density
    std::vector<double> phi_tf;        // Phi_r^TF(r)
    std::vector<double> dev;           // phi - phi_tf
    std::vector<double> weighted_dev;  // dev * min(r^{4 - eps}, 1)
    double eps = 0.5;
    double D_cut = 0.5;
    double max_weighted_inner = 0.0;  // over r <= D_cut
    double max_weighted_outer = 0.0;  // over r > D_cut
};

inline ScreenedProfile deviation_profile(const RadialDensity& u, double Z,
                                         const TFAtom& tf,
                                         const std::vector<double>& r_list,
                                         double eps = 0.5,
                                         double D_cut = 0.5) {
    if (eps <= 0.0) throw ParameterError("deviation_profile: eps must be > 0");
    detail::CumulativeCharge cum(u);
    ScreenedProfile p;
    p.eps = eps;
    p.D_cut = D_cut;
    for (double r : r_list) {
        if (r <= 0.0)
            throw ParameterError("deviation_profile: radii must be > 0");
        const double phi = (Z - cum.enclosed(r)) / r;
        const double phi_tf = tf.screened_potential(r, r);
        const double d = phi - phi_tf;
        const double wd = d * std::min(std::pow(r, 4.0 - eps), 1.0);
        p.r.push_back(r);
        p.phi.push_back(phi);
        p.phi_tf.push_back(phi_tf);
        p.dev.push_back(d);
        p.weighted_dev.push_back(wd);
        auto& slot = (r <= D_cut) ? p.max_weighted_inner : p.max_weighted_outer;
        slot = std::max(slot, std::abs(wd));
    }
    return p;
}

// Largest R with int_{s >= R} u = kappa; the tail integral is
// continuous and non-increasing, inverted by linear interpolation.
inline double radius(const RadialDensity& u, double kappa) {
    detail::CumulativeCharge cum(u);
    const double N = cum.total();
    if (kappa <= 0.0 || kappa > N * (1.0 + 1e-12))
        throw ParameterError("radius: kappa must lie in (0, integral of u]");
    if (kappa >= N) return 0.0;

    // tail(R) = N - enclosed(R); find tail = kappa by bisection on the
    // monotone piecewise-linear enclosed charge.
    double lo = 0.0, hi = u.grid->r_max;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((N - cum.enclosed(mid)) > kappa ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct ScanRecord {
    double Z = 0.0;
    double p = 1.0;
    double N_c = 0.0;
    double excess = 0.0;
    bool converged = false;
    std::uint64_t seed = 0;
    std::string grid_id;
    std::string error;  // empty unless the cell failed
};

inline std::vector<ScanRecord> ionization_scan(
    const std::vector<double>& Z_list, const std::vector<double>& p_list,
    MinimizerConfig base, double delta = 1e-4, double dN = 0.25) {
    std::vector<ScanRecord> rows;
    for (double Z : Z_list) {
        for (double p : p_list) {
            MinimizerConfig cfg = base;
            cfg.Z = Z;
            cfg.p = p;
            cfg.N = 1.0;  // placeholder; critical_charge drives N itself
            ScanRecord rec;
            rec.Z = Z;
            rec.p = p;
            rec.seed = cfg.seed;
            try {
                GridPtr grid = std::make_shared<const RadialGrid>(build_grid(
                    cfg.effective_r_min(), cfg.r_max, cfg.grid_n, cfg.spacing));
                rec.grid_id = grid->id();
                EnergyModel model(grid, cfg.L_max, Z, p);
                const CriticalChargeResult cc =
                    critical_charge(model, cfg, delta, dN);
                rec.N_c = cc.N_c;
                rec.excess = cc.N_c - Z;
                rec.converged = !cc.any_unconverged;
            } catch (const std::exception& e) {
                rec.error = e.what();
            }
            rows.push_back(std::move(rec));
        }
    }
    return rows;
}

}  // namespace poweratom
