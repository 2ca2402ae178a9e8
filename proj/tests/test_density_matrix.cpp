#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "poweratom/density_matrix.hpp"
#include "poweratom/random.hpp"

using namespace poweratom;

namespace {

GridPtr small_grid() {
    static GridPtr g = std::make_shared<const RadialGrid>(
        build_grid(1e-2, 20.0, 40, Spacing::Log));
    return g;
}

// Rank-one feasible block from a raw radial function f(r): the
// weighted representation stores sqrt(w_i) f(r_i), normalized.
Eigen::VectorXd weighted_orbital(const RadialGrid& g,
                                 double (*f)(double)) {
    Eigen::VectorXd v(g.size());
    for (std::size_t i = 0; i < g.n; ++i)
        v[static_cast<Eigen::Index>(i)] = g.sw[i] * f(g.r[i]);
    return v / v.norm();
}

double orb_1s(double r) { return r * std::exp(-r / 2.0); }
double orb_2s(double r) { return r * (1.0 - r / 4.0) * std::exp(-r / 4.0); }

}  // namespace

TEST_CASE("trace_total with degeneracies") {
    GridPtr g = small_grid();
    DensityMatrixState st = zero_state(g, 1);
    const Eigen::VectorXd v = weighted_orbital(*g, orb_1s);
    st.blocks[0].G = v * v.transpose();
    CHECK(trace_total(st) == doctest::Approx(1.0).epsilon(1e-12));

    // half-occupied rank-2 projector in channel 0
    const Eigen::VectorXd w = weighted_orbital(*g, orb_2s);
    const Eigen::VectorXd w_perp =
        (w - v * v.dot(w)).normalized();
    st.blocks[0].G = 0.5 * (v * v.transpose() + w_perp * w_perp.transpose());
    CHECK(trace_total(st) == doctest::Approx(1.0).epsilon(1e-12));

    // rank-one projector in channel 1 counts (2l+1) = 3
    st = zero_state(g, 1);
    st.blocks[1].G = v * v.transpose();
    CHECK(trace_total(st) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("density: 1s projector reproduces the analytic shell density") {
    GridPtr g = std::make_shared<const RadialGrid>(
        build_grid(1e-3, 40.0, 800, Spacing::Log));
    DensityMatrixState st = zero_state(g, 0);
    const Eigen::VectorXd v = weighted_orbital(*g, orb_1s);
    st.blocks[0].G = v * v.transpose();
    const RadialDensity d = density(st);
    for (std::size_t i = 0; i < g->n; i += 37) {
        const double r = g->r[i];
        // u(r) = |u_1s(r)|^2 normalized: r^2 e^{-r} / 2 ... normalization
        // int r^2 e^{-r} = 2, so u = r^2 e^{-r} / 2.
        const double exact = r * r * std::exp(-r) / 2.0;
        CHECK(std::abs(d.u[static_cast<Eigen::Index>(i)] - exact) < 1e-3);
    }
    CHECK(d.integral() == doctest::Approx(trace_total(st)).epsilon(1e-10));
}

TEST_CASE("density: zero state and additivity") {
    GridPtr g = small_grid();
    CHECK(density(zero_state(g, 1)).u.norm() == 0.0);

    DensityMatrixState a = zero_state(g, 0), b = zero_state(g, 0);
    const Eigen::VectorXd v = weighted_orbital(*g, orb_1s);
    Eigen::VectorXd w = weighted_orbital(*g, orb_2s);
    w = (w - v * v.dot(w)).normalized();
    a.blocks[0].G = v * v.transpose();
    b.blocks[0].G = w * w.transpose();
    DensityMatrixState ab = a;
    ab.blocks[0].G += b.blocks[0].G;
    CHECK((density(ab).u - density(a).u - density(b).u).norm() <= 1e-12);
}

TEST_CASE("fractional_power basics") {
    GridPtr g = small_grid();
    const Eigen::VectorXd v = weighted_orbital(*g, orb_1s);
    ChannelBlock blk{0, v * v.transpose()};
    // projector is a fixed point for every p
    for (double p : {0.5, 0.7, 1.0})
        CHECK((fractional_power(blk, p).G - blk.G).norm() < 1e-12);
    // diag(0.25) at p = 1/2 -> diag(0.5)
    ChannelBlock d{0, 0.25 * Eigen::MatrixXd::Identity(4, 4)};
    CHECK((fractional_power(d, 0.5).G -
           0.5 * Eigen::MatrixXd::Identity(4, 4))
              .norm() < 1e-12);
    CHECK_THROWS_AS(fractional_power(d, -1.0), ParameterError);
}

TEST_CASE("fractional_power: composition and eigenvalue monotonicity") {
    Rng rng(11);
    const Eigen::MatrixXd C = random_psd_contraction(rng, 8);
    ChannelBlock blk{0, C};
    const Eigen::MatrixXd pq = fractional_power(
        ChannelBlock{0, fractional_power(blk, 0.8).G}, 0.75).G;
    const Eigen::MatrixXd direct = fractional_power(blk, 0.6).G;
    CHECK((pq - direct).norm() < 1e-10);

    // sorted eigenvalues of the output are exactly lambda^p
    BlockEigen e_in = eigen_decompose(C);
    BlockEigen e_out = eigen_decompose(fractional_power(blk, 0.7).G);
    for (Eigen::Index i = 0; i < e_in.lambda.size(); ++i)
        CHECK(e_out.lambda[i] ==
              doctest::Approx(std::pow(std::clamp(e_in.lambda[i], 0.0, 1.0),
                                       0.7))
                  .epsilon(1e-12));
}

TEST_CASE("project_feasible: idempotence and clipping") {
    GridPtr g = small_grid();
    Rng rng(5);
    DensityMatrixState st = random_feasible_state(rng, g, 1, 3);
    const double N = trace_total(st);
    const DensityMatrixState again = project_feasible(st, N, TraceMode::Exact);
    double diff = 0.0;
    for (std::size_t l = 0; l < st.blocks.size(); ++l)
        diff = std::max(diff, (again.blocks[l].G - st.blocks[l].G).norm());
    CHECK(diff < 1e-10);

    // diag(2, -1) with N = 1 clips to diag(1, 0)
    DensityMatrixState d = zero_state(g, 0);
    d.blocks[0].G.setZero();
    d.blocks[0].G(0, 0) = 2.0;
    d.blocks[0].G(1, 1) = -1.0;
    const DensityMatrixState pd = project_feasible(d, 1.0, TraceMode::Exact);
    CHECK(pd.blocks[0].G(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(pd.blocks[0].G(1, 1)) < 1e-10);
    CHECK(trace_total(pd) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("project_feasible vs brute-force capped-simplex oracle") {
    GridPtr g = small_grid();
    Rng rng(7);
    DensityMatrixState st = zero_state(g, 1);
    for (auto& b : st.blocks)
        b.G = random_symmetric(rng, static_cast<int>(g->size()));

    const double N = 3.0;
    const ProjectedState ps = project_feasible_eig(st, N, TraceMode::Exact);

    // Brute force: grid-search the shift mu on the same eigenvalues
    // (coarse pass over the full spectral range, then a fine pass around
    // the coarse optimum); the projected eigenvalues must match.
    std::vector<BlockEigen> eigs;
    for (const auto& b : st.blocks) eigs.push_back(eigen_decompose(b.G));
    double lam_lo = 1e300, lam_hi = -1e300;
    for (const auto& e : eigs) {
        lam_lo = std::min(lam_lo, e.lambda.minCoeff());
        lam_hi = std::max(lam_hi, e.lambda.maxCoeff());
    }
    auto shifted = [&](double mu) {
        double t = 0.0;
        for (std::size_t b = 0; b < eigs.size(); ++b) {
            const int deg = 2 * static_cast<int>(b) + 1;
            for (Eigen::Index i = 0; i < eigs[b].lambda.size(); ++i)
                t += deg * std::clamp(eigs[b].lambda[i] - mu, 0.0, 1.0);
        }
        return t;
    };
    auto scan = [&](double lo, double hi, double step) {
        double best = lo, best_gap = 1e300;
        for (double mu = lo; mu <= hi; mu += step) {
            const double gap = std::abs(shifted(mu) - N);
            if (gap < best_gap) {
                best_gap = gap;
                best = mu;
            }
        }
        return best;
    };
    double best_mu = scan(lam_lo - 1.5, lam_hi + 0.5, 1e-3);
    best_mu = scan(best_mu - 2e-3, best_mu + 2e-3, 1e-7);
    for (std::size_t b = 0; b < eigs.size(); ++b)
        for (Eigen::Index i = 0; i < eigs[b].lambda.size(); ++i) {
            const double oracle =
                std::clamp(eigs[b].lambda[i] - best_mu, 0.0, 1.0);
            CHECK(std::abs(ps.eigs[b].lambda[i] - oracle) < 1e-5);
        }
}

TEST_CASE("project_feasible: at-most mode and error paths") {
    GridPtr g = small_grid();
    Rng rng(9);
    DensityMatrixState st = random_feasible_state(rng, g, 1, 3);
    const double N = trace_total(st);
    // already feasible below the bound: unchanged
    const DensityMatrixState pd =
        project_feasible(st, N + 5.0, TraceMode::AtMost);
    double diff = 0.0;
    for (std::size_t l = 0; l < st.blocks.size(); ++l)
        diff = std::max(diff, (pd.blocks[l].G - st.blocks[l].G).norm());
    CHECK(diff < 1e-10);
    CHECK_THROWS_AS(project_feasible(st, -1.0, TraceMode::Exact),
                    ParameterError);
    CHECK_THROWS_AS(project_feasible(st, 1e9, TraceMode::Exact),
                    ParameterError);
}

TEST_CASE("density integrates to the trace for random feasible states") {
    GridPtr g = small_grid();
    Rng rng(3);
    for (int t = 0; t < 5; ++t) {
        const DensityMatrixState st = random_feasible_state(rng, g, 2, 4);
        CHECK(density(st).integral() ==
              doctest::Approx(trace_total(st)).epsilon(1e-10));
    }
}
