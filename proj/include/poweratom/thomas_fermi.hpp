#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "poweratom/density_matrix.hpp"
#include "poweratom/errors.hpp"
#include "poweratom/grid.hpp"

namespace poweratom {

struct TFConstants {
    double L_sc;   // semiclassical constant, 1/(15 pi^2)
    double c_tf;   // kinetic coefficient in the density functional
    double B_tf;   // radius law coefficient
    double A_tf;   // potential tail coefficient: phi -> A_tf / r^4
    double b0;     // length scale: b(Z) = b0 * Z^{-1/3}
    double gamma;  // density-potential coefficient: rho = gamma * phi^{3/2}

    static TFConstants make() {
        using std::numbers::pi;
        TFConstants k;
        k.L_sc = 1.0 / (15.0 * pi * pi);
        k.c_tf = 0.6 * std::pow(6.0 * pi * pi, 2.0 / 3.0);
        k.B_tf = 5.0 * k.c_tf * std::cbrt(4.0 / (3.0 * pi * pi));
        k.A_tf = std::pow(5.0 * k.c_tf, 3.0) / (3.0 * pi * pi);
        k.gamma = std::pow(3.0 / (5.0 * k.c_tf), 1.5);
        k.b0 = std::pow(4.0 * pi * k.gamma, -2.0 / 3.0);
        return k;
    }
};

// Universal function of the dimensionless equation
//   y'' = y^{3/2} / sqrt(x),  y(0) = 1,  y(inf) = 0.
//
// The connecting orbit is unstable under forward integration (the
// linearization around the 144/x^3 tail has a growing mode ~ x^{4.772}),
// so single shooting degrades beyond x ~ 30. We therefore shoot forward
// only to a junction point, and construct the tail by integrating
// backward from x_far with the one-parameter asymptotic ansatz
//   y = 144 x^{-3} (1 + beta x^{-lambda}),  lambda = (sqrt(73) - 7)/2,
// fitting beta so the backward pass meets the forward value at the
// junction. Backward integration damps the unstable mode, so the
// combined solution tracks the connecting orbit over the whole range.
class TFSolution {
   public:
    static constexpr double kSeriesEdge = 1e-6;
    static constexpr double kJunction = 5.0;
    static constexpr double kFar = 1e4;
    static constexpr double kLambda = 0.77200187265876171;  // (sqrt(73)-7)/2

    static TFSolution solve(double tol = 1e-12) {
        if (tol <= 0.0) throw ParameterError("TFSolution: tol must be > 0");
        TFSolution u;
        u.tol_ = tol;

        // Bisection on the initial slope. Too-steep slopes drive y
        // through zero; too-shallow ones make y turn back upward.
        double lo = -2.0, hi = -1.0;
        if (classify(lo, tol) != -1 || classify(hi, tol) != +1)
            throw NumericError("TFSolution: shooting bracket failed");
        for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            (classify(mid, tol) == -1 ? lo : hi) = mid;
        }
        u.slope0_ = 0.5 * (lo + hi);

        u.build_samples(2400);
        u.accumulate_integrals();
        return u;
    }

    double slope0() const { return slope0_; }
    double beta() const { return beta_; }
    std::size_t sample_count() const { return x_.size(); }
    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& ys() const { return y_; }
    const std::vector<double>& yps() const { return yp_; }

    double y(double x) const { return eval(x).first; }
    double yp(double x) const { return eval(x).second; }

    // Integral of x^{-1/2} y^{5/2} over (0, inf); cumulative over the
    // samples, closed by the fitted power-law tail.
    double int_y52() const {
        const double xm = x_.back();
        const double q = std::pow(xm, -kLambda);
        const double c = std::pow(144.0, 2.5);
        const double tail =
            c * (std::pow(xm, -7.0) / 7.0 +
                 2.5 * beta_ * q * std::pow(xm, -7.0) / (7.0 + kLambda) +
                 1.875 * beta_ * beta_ * q * q * std::pow(xm, -7.0) /
                     (7.0 + 2.0 * kLambda));
        return i1_.back() + tail;
    }

    // Enclosed dimensionless charge q(x) = integral of sqrt(t) y^{3/2}
    // over (0, x); closed form via integration by parts of t y''.
    double enclosed(double x) const {
        auto [yx, ypx] = eval(x);
        return x * ypx - yx + 1.0;
    }

    // q(inf) through the fitted tail; equals 1 analytically, so the
    // defect measures the quality of the construction.
    double total_charge() const {
        const double xm = x_.back();
        const double q = std::pow(xm, -kLambda);
        const double tail =
            1728.0 * (std::pow(xm, -3.0) / 3.0 +
                      1.5 * beta_ * q * std::pow(xm, -3.0) / (3.0 + kLambda) +
                      0.375 * beta_ * beta_ * q * q * std::pow(xm, -3.0) /
                          (3.0 + 2.0 * kLambda));
        return enclosed(xm) + tail;
    }

    // Local consistency of the stored samples with the equation:
    // Simpson closure of y'_{i+1} - y'_i against y^{3/2}/sqrt(x), with
    // the midpoint supplied by Hermite interpolation.
    double max_ode_residual() const {
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
            const double h = x_[i + 1] - x_[i];
            const double xm = x_[i] + 0.5 * h;
            const double ym = eval(xm).first;
            const double res = yp_[i + 1] - yp_[i] -
                               h / 6.0 *
                                   (rhs(x_[i], y_[i]) + 4.0 * rhs(xm, ym) +
                                    rhs(x_[i + 1], y_[i + 1]));
            worst = std::max(worst, std::abs(res));
        }
        return worst;
    }

   private:
    double slope0_ = 0.0;
    double beta_ = 0.0;
    double tol_ = 1e-12;
    std::vector<double> x_, y_, yp_, i1_;

    static double rhs(double x, double y) {
        const double yc = std::max(y, 0.0);
        return yc * std::sqrt(yc / x);
    }

    // Series start at small x:
    // y = 1 + s x + (4/3) x^{3/2} + (2/5) s x^{5/2} + x^3/3 + ...
    static void series(double s, double x, double& y, double& dy) {
        const double sx = std::sqrt(x);
        y = 1.0 + s * x + (4.0 / 3.0) * x * sx + 0.4 * s * x * x * sx +
            x * x * x / 3.0;
        dy = s + 2.0 * sx + s * x * sx + x * x;
    }

    static void tail_state(double beta, double x, double& y, double& dy) {
        const double q = beta * std::pow(x, -kLambda);
        const double x3 = x * x * x;
        y = 144.0 / x3 * (1.0 + q);
        dy = -144.0 / (x3 * x) * (3.0 + (3.0 + kLambda) * q);
    }

    struct State {
        double y, dy;
    };

    static std::array<double, 2> deriv(double x, const State& s) {
        return {s.dy, rhs(x, s.y)};
    }

    // One adaptive Dormand-Prince (RK45) step toward x_end; h carries
    // the direction sign. Returns false if the controller stalls.
    static bool dp_step(double& x, State& s, double& h, double x_end,
                        double tol) {
        static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                            c5 = 8.0 / 9;
        static const double a21 = 1.0 / 5;
        static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
        static const double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
        static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                            e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

        if (h > 0.0)
            h = std::min(h, x_end - x);
        else
            h = std::max(h, x_end - x);

        auto add = [](const State& s0, double hh,
                      std::initializer_list<std::pair<double,
                                                      std::array<double, 2>>>
                          terms) {
            State r = s0;
            for (const auto& [w, k] : terms) {
                r.y += hh * w * k[0];
                r.dy += hh * w * k[1];
            }
            return r;
        };

        for (int attempt = 0; attempt < 60; ++attempt) {
            const auto k1 = deriv(x, s);
            const auto k2 = deriv(x + c2 * h, add(s, h, {{a21, k1}}));
            const auto k3 =
                deriv(x + c3 * h, add(s, h, {{a31, k1}, {a32, k2}}));
            const auto k4 = deriv(x + c4 * h,
                                  add(s, h, {{a41, k1}, {a42, k2}, {a43, k3}}));
            const auto k5 =
                deriv(x + c5 * h,
                      add(s, h, {{a51, k1}, {a52, k2}, {a53, k3}, {a54, k4}}));
            const auto k6 = deriv(
                x + h, add(s, h, {{a61, k1}, {a62, k2}, {a63, k3}, {a64, k4},
                                  {a65, k5}}));
            const State nxt = add(
                s, h, {{b1, k1}, {b3, k3}, {b4, k4}, {b5, k5}, {b6, k6}});
            const auto k7 = deriv(x + h, nxt);

            double err = 0.0;
            const std::array<double, 2> errv = {
                h * (e1 * k1[0] + e3 * k3[0] + e4 * k4[0] + e5 * k5[0] +
                     e6 * k6[0] + e7 * k7[0]),
                h * (e1 * k1[1] + e3 * k3[1] + e4 * k4[1] + e5 * k5[1] +
                     e6 * k6[1] + e7 * k7[1])};
            // Purely relative control: y spans ten orders of magnitude
            // and absolute slack in the tail would be amplified by the
            // backward-growing mode.
            const std::array<double, 2> ref = {
                0.5 * (std::abs(s.y) + std::abs(nxt.y)),
                0.5 * (std::abs(s.dy) + std::abs(nxt.dy))};
            for (int j = 0; j < 2; ++j)
                err = std::max(err, std::abs(errv[j]) /
                                        (tol * (1e-300 + ref[j])));

            if (err <= 1.0) {
                x += h;
                s = nxt;
                h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
                return true;
            }
            h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
            if (std::abs(h) < 1e-16 * std::max(1.0, std::abs(x))) break;
        }
        return false;
    }

    // Integrate a trial slope far enough that the instability forces a
    // sign event: -1 if y crosses zero (too steep), +1 if y turns back
    // upward (too shallow).
    static int classify(double s0, double tol) {
        double x = kSeriesEdge;
        State s;
        series(s0, x, s.y, s.dy);
        double h = 1e-4;
        while (x < 200.0) {
            if (!dp_step(x, s, h, 200.0, tol))
                throw NumericError("TFSolution: integrator stalled");
            if (s.y <= 0.0) return -1;
            if (s.dy >= 0.0) return +1;
        }
        return 0;
    }

    void build_samples(std::size_t n) {
        x_.resize(n);
        y_.resize(n);
        yp_.resize(n);
        const double lx0 = std::log(kSeriesEdge), lx1 = std::log(kFar);
        for (std::size_t i = 0; i < n; ++i)
            x_[i] = std::exp(lx0 + (lx1 - lx0) * static_cast<double>(i) /
                                       static_cast<double>(n - 1));
        x_.back() = kFar;
        std::size_t j = 0;
        while (j + 1 < n && x_[j + 1] <= kJunction) ++j;
        const double xj = x_[j];

        // Forward sweep up to the junction.
        double x = x_[0];
        State s;
        series(slope0_, x, s.y, s.dy);
        y_[0] = s.y;
        yp_[0] = s.dy;
        double h = 1e-4;
        for (std::size_t i = 1; i <= j; ++i) {
            while (x < x_[i] - 1e-300)
                if (!dp_step(x, s, h, x_[i], tol_))
                    throw NumericError("TFSolution: integrator stalled");
            x = x_[i];
            y_[i] = s.y;
            yp_[i] = s.dy;
        }
        const double y_target = y_[j];

        // Secant iteration on the tail coefficient: backward pass from
        // kFar must reproduce the forward value at the junction.
        auto backward_y = [&](double beta) {
            double xb = kFar;
            State sb;
            tail_state(beta, xb, sb.y, sb.dy);
            double hb = -1.0;
            while (xb > xj + 1e-300)
                if (!dp_step(xb, sb, hb, xj, tol_))
                    throw NumericError("TFSolution: integrator stalled");
            return sb.y;
        };
        double b0 = -10.0, b1 = -16.0;
        double g0 = backward_y(b0) - y_target;
        double g1 = backward_y(b1) - y_target;
        for (int it = 0; it < 60 && std::abs(g1) > 1e-17; ++it) {
            if (g1 == g0) break;
            const double b2 = b1 - g1 * (b1 - b0) / (g1 - g0);
            b0 = b1;
            g0 = g1;
            b1 = b2;
            g1 = backward_y(b1) - y_target;
        }
        beta_ = b1;

        // Final backward sweep storing the tail-side samples.
        double xb = kFar;
        State sb;
        tail_state(beta_, xb, sb.y, sb.dy);
        y_[n - 1] = sb.y;
        yp_[n - 1] = sb.dy;
        double hb = -1.0;
        for (std::size_t i = n - 1; i-- > j + 1;) {
            while (xb > x_[i] + 1e-300)
                if (!dp_step(xb, sb, hb, x_[i], tol_))
                    throw NumericError("TFSolution: integrator stalled");
            xb = x_[i];
            y_[i] = sb.y;
            yp_[i] = sb.dy;
        }
    }

    void accumulate_integrals() {
        const std::size_t n = x_.size();
        i1_.resize(n);
        const double x0 = x_[0];
        i1_[0] = 2.0 * std::sqrt(x0) +
                 (5.0 / 3.0) * slope0_ * x0 * std::sqrt(x0);
        auto g = [this](double x, double y) {
            return std::pow(std::max(y, 0.0), 2.5) / std::sqrt(x);
        };
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double h = x_[i + 1] - x_[i];
            const double xm = x_[i] + 0.5 * h;
            i1_[i + 1] = i1_[i] + h / 6.0 *
                                      (g(x_[i], y_[i]) +
                                       4.0 * g(xm, eval(xm).first) +
                                       g(x_[i + 1], y_[i + 1]));
        }
    }

    std::pair<double, double> eval(double x) const {
        if (x <= kSeriesEdge) {
            double y, dy;
            series(slope0_, std::max(x, 0.0), y, dy);
            return {y, x > 0.0 ? dy : slope0_};
        }
        if (x >= kFar) {
            double y, dy;
            tail_state(beta_, x, y, dy);
            return {y, dy};
        }
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i =
            std::min<std::size_t>(x_.size() - 2,
                                  static_cast<std::size_t>(it - x_.begin()) - 1);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double y = (2 * t3 - 3 * t2 + 1) * y_[i] +
                         (t3 - 2 * t2 + t) * h * yp_[i] +
                         (-2 * t3 + 3 * t2) * y_[i + 1] +
                         (t3 - t2) * h * yp_[i + 1];
        const double dy = ((6 * t2 - 6 * t) * y_[i] +
                           (3 * t2 - 4 * t + 1) * h * yp_[i] +
                           (-6 * t2 + 6 * t) * y_[i + 1] +
                           (3 * t2 - 2 * t) * h * yp_[i + 1]) /
                          h;
        return {y, dy};
    }
};

inline std::shared_ptr<const TFSolution> shared_tf_solution() {
    static const auto sol =
        std::make_shared<const TFSolution>(TFSolution::solve());
    return sol;
}

// Z-scaled neutral Thomas-Fermi atom built on the universal function.
class TFAtom {
   public:
    explicit TFAtom(double Z,
                    std::shared_ptr<const TFSolution> u = shared_tf_solution())
        : Z_(Z), u_(std::move(u)), k_(TFConstants::make()) {
        if (Z <= 0.0) throw ParameterError("TFAtom: Z must be > 0");
        b_ = k_.b0 * std::pow(Z, -1.0 / 3.0);
    }

    double Z() const { return Z_; }
    double b() const { return b_; }
    const TFConstants& constants() const { return k_; }
    const TFSolution& universal() const { return *u_; }

    double potential(double r) const {
        if (r <= 0.0) throw ParameterError("TFAtom: r must be > 0");
        return Z_ / r * u_->y(r / b_);
    }

    // Volume density rho(r) = gamma * phi(r)^{3/2}.
    double density(double r) const {
        return k_.gamma * std::pow(std::max(potential(r), 0.0), 1.5);
    }

    // Radial density u(r) = 4 pi r^2 rho(r).
    double radial_density(double r) const {
        const double x = r / b_;
        return Z_ / b_ * std::sqrt(x) * std::pow(u_->y(x), 1.5);
    }

    RadialDensity density_on(GridPtr grid) const {
        RadialDensity d;
        d.grid = grid;
        d.u.resize(static_cast<Eigen::Index>(grid->size()));
        for (std::size_t i = 0; i < grid->size(); ++i)
            d.u[static_cast<Eigen::Index>(i)] = radial_density(grid->r[i]);
        return d;
    }

    double enclosed_charge(double r) const { return Z_ * u_->enclosed(r / b_); }

    // Full-space integral of the density, via the matched tail; equals
    // Z up to the accuracy of the universal solution.
    double total_charge() const { return Z_ * u_->total_charge(); }

    // E^TF = -L_sc * int phi^{5/2} - D[rho]; both reduce to universal
    // integrals after scaling, so E^TF(Z) = e0 * Z^{7/3} exactly here.
    double energy() const {
        using std::numbers::pi;
        const double I1 = u_->int_y52();
        const double I2 = -u_->slope0() - I1;  // int x^{-1/2} y^{3/2} (1 - y)
        const double e0 = -std::sqrt(k_.b0) *
                          (4.0 * pi * k_.L_sc * I1 + 2.0 * pi * k_.gamma * I2);
        return e0 * std::pow(Z_, 7.0 / 3.0);
    }

    // Phi_r(R) = Z/R - int_{s < r} u(s) / max(R, s) ds.
    double screened_potential(double r, double R) const {
        if (R <= 0.0) throw ParameterError("TFAtom: R must be > 0");
        if (r < 0.0) throw ParameterError("TFAtom: r must be >= 0");
        if (r <= R) return (Z_ - enclosed_charge(r)) / R;
        const double xr = r / b_, xR = R / b_;
        return Z_ / R - enclosed_charge(R) / R -
               Z_ / b_ * (u_->yp(xr) - u_->yp(xR));
    }

   private:
    double Z_;
    std::shared_ptr<const TFSolution> u_;
    TFConstants k_;
    double b_;
};

}  // namespace poweratom
