#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "meanrev/oracle.hpp"
#include "meanrev/spectral.hpp"
#include "support.hpp"

using namespace meanrev;
using namespace meanrev::oracle;
using spectral::Complex;
using spectral::Direction;
using spectral::GridFunction;
using spectral::grid_node;
using spectral::make_config;
using spectral::sample_grid;
using testsupport::kPi;
using testsupport::standard_burgers_fd_residual;
using testsupport::trajectory_from_modes;

TEST_CASE("time_reversal_map: constants map to constants") {
    const double sigma = 0.7, c = 1.3;
    const auto traj = trajectory_from_modes(2, sigma, 1.0, 4, Direction::paper_forward,
                                            [c](int k, double) {
                                                return k == 0 ? Complex{c, 0.0} : Complex{0.0, 0.0};
                                            });
    const auto v = time_reversal_map(traj, 1.0);
    REQUIRE(v.states.size() == 5);
    for (int j = 0; j <= 4; ++j) {
        CHECK(v.states[static_cast<std::size_t>(j)].coeff(0).real() ==
              doctest::Approx(-sigma * c).epsilon(1e-15));
        CHECK(v.states[static_cast<std::size_t>(j)].time() == j * traj.config.delta);
    }
}

TEST_CASE("time_reversal_map: endpoint relabeling per direction tag") {
    // distinct states so ordering mistakes are visible: a^(1, t) = t
    const auto fwd = trajectory_from_modes(1, 2.0, 1.0, 4, Direction::paper_forward,
                                           [](int k, double t) {
                                               return k == 1 || k == -1 ? Complex{t, 0.0}
                                                                        : Complex{0.0, 0.0};
                                           });
    const auto v = time_reversal_map(fwd, 1.0);
    // paper_forward input: v(., 0) = -sigma * a(., T)
    CHECK(v.states.front().coeff(1).real() == doctest::Approx(-2.0 * 1.0));
    CHECK(v.states.back().coeff(1).real() == doctest::Approx(0.0));

    const auto rev = trajectory_from_modes(1, 2.0, 1.0, 4, Direction::well_posed_reverse,
                                           [](int k, double t) {
                                               return k == 1 || k == -1 ? Complex{t, 0.0}
                                                                        : Complex{0.0, 0.0};
                                           });
    // well_posed_reverse input already stores the solution reversed: no flip
    const auto w = time_reversal_map(rev, 1.0);
    CHECK(w.states.front().coeff(1).real() == doctest::Approx(0.0));
    CHECK(w.states.back().coeff(1).real() == doctest::Approx(-2.0 * 1.0));
}

TEST_CASE("time_reversal_map: mapped solver field satisfies the standard form") {
    // substitution check: v_s + v v_x - nu v_xx ~ 0 by finite differences,
    // with sigma != 1 so the scale factors in the mapping are exercised
    for (const double sigma : {1.0, 1.4}) {
        const double T = 0.25;
        const int n = 2048;
        auto cfg = make_config(16, sigma, T, n, Direction::well_posed_reverse);
        const auto initial = sample_grid(cfg.M, [](double x) { return std::sin(x); });
        const auto traj = spectral::evolve(spectral::init_coeffs(initial, cfg), cfg);
        const auto v = time_reversal_map(traj, T);

        const double nu = 0.5 * sigma * sigma;
        const double res = standard_burgers_fd_residual(v, nu, 64);
        CHECK(res <= 5e-3);  // O(delta) from the solver + O(dt^2) from the check

        // sanity: the same states mislabeled as the other orientation are far off
        auto mislabeled = traj;
        mislabeled.config.direction = Direction::paper_forward;
        const double res_bad =
            standard_burgers_fd_residual(time_reversal_map(mislabeled, T), nu, 64);
        CHECK(res_bad >= 100.0 * res);
    }
}

TEST_CASE("time_reversal_map: rejects horizons the trajectory cannot cover") {
    const auto traj = trajectory_from_modes(1, 1.0, 1.0, 4, Direction::paper_forward,
                                            [](int, double) { return Complex{0.0, 0.0}; });
    CHECK_THROWS_AS(time_reversal_map(traj, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(time_reversal_map(traj, 0.33), std::invalid_argument);
    CHECK(time_reversal_map(traj, 0.5).states.size() == 3);  // sub-horizon multiple is fine
}

TEST_CASE("hopf_cole_solve: zero data stays zero") {
    ViscousParams vp{0.5, 1.0};
    const auto sol = hopf_cole_solve(sample_grid(64, [](double) { return 0.0; }), 1.0, vp);
    for (double v : sol.grid.values) CHECK(std::abs(v) <= 1e-14);
    CHECK(sol.est_error >= 0.0);
}

TEST_CASE("hopf_cole_solve: small data follows linearized heat decay") {
    const double eps = 1e-4, nu = 0.5, t = 1.0;
    ViscousParams vp{nu, t};
    const auto sol =
        hopf_cole_solve(sample_grid(128, [eps](double x) { return eps * std::sin(x); }), t, vp);
    double err = 0.0;
    for (int m = 0; m < 128; ++m)
        err = std::max(err, std::abs(sol.grid.values[static_cast<std::size_t>(m)] -
                                     eps * std::exp(-nu * t) * std::sin(grid_node(m, 128))));
    CHECK(err <= 100.0 * eps * eps);  // O(eps^2) from the neglected nonlinearity
    CHECK(err >= 1e-12);              // and genuinely nonlinear, not exact
}

TEST_CASE("hopf_cole_solve: t = 0 reproduces the initial data") {
    ViscousParams vp{0.5, 0.0};
    const auto initial =
        sample_grid(128, [](double x) { return std::sin(x) - 0.3 * std::sin(2 * x); });
    const auto sol = hopf_cole_solve(initial, 0.0, vp);
    double err = 0.0;
    for (int m = 0; m < 128; ++m)
        err = std::max(err, std::abs(sol.grid.values[static_cast<std::size_t>(m)] -
                                     initial.values[static_cast<std::size_t>(m)]));
    CHECK(err <= 1e-10);  // exp/log round trip through the phi substitution
}

TEST_CASE("hopf_cole_solve: extreme |integral u0| / nu is a resolution error") {
    // amplitude / (2 nu) beyond exp range: phi under/overflows, refuse
    ViscousParams vp{1e-4, 1.0};
    CHECK_THROWS_WITH_AS(
        hopf_cole_solve(sample_grid(64, [](double x) { return 0.1 * std::sin(x); }), 0.5, vp),
        doctest::Contains("phi"), std::runtime_error);
}

TEST_CASE("hopf_cole_solve rejects non-zero-mean data with guidance") {
    ViscousParams vp{0.5, 1.0};
    CHECK_THROWS_WITH_AS(
        hopf_cole_solve(sample_grid(64, [](double x) { return std::sin(x) + 0.5; }), 1.0, vp),
        doctest::Contains("zero-mean"), std::invalid_argument);
}

TEST_CASE("reference_fd_solve: constant state is translation invariant") {
    ViscousParams vp{0.5, 1.0};
    const auto sol =
        reference_fd_solve(sample_grid(64, [](double) { return 0.7; }), 0.3, vp, 128);
    for (double v : sol.grid.values) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(sol.dt_used > 0.0);
}

TEST_CASE("reference_fd_solve: spatial mean is conserved") {
    ViscousParams vp{0.5, 1.0};
    const auto initial = sample_grid(256, [](double x) { return std::sin(x) + 0.3 * std::cos(2 * x); });
    const auto sol = reference_fd_solve(initial, 0.5, vp, 256);
    double m0 = 0.0, m1 = 0.0;
    for (double v : initial.values) m0 += v;
    for (double v : sol.grid.values) m1 += v;
    CHECK(std::abs(m1 / 256 - m0 / 256) <= 1e-12);
}

TEST_CASE("reference_fd_solve: self-convergence is second order") {
    ViscousParams vp{0.5, 1.0};
    const auto initial = [](int M) { return sample_grid(M, [](double x) { return std::sin(x); }); };
    const double t = 0.5;
    const auto u128 = reference_fd_solve(initial(128), t, vp, 128);
    const auto u256 = reference_fd_solve(initial(256), t, vp, 256);
    const auto u512 = reference_fd_solve(initial(512), t, vp, 512);
    // restrict finer grids to the coarse nodes
    double d1 = 0.0, d2 = 0.0;
    for (int m = 0; m < 128; ++m) {
        d1 = std::max(d1, std::abs(u256.grid.values[static_cast<std::size_t>(2 * m)] -
                                   u128.grid.values[static_cast<std::size_t>(m)]));
    }
    for (int m = 0; m < 256; ++m) {
        d2 = std::max(d2, std::abs(u512.grid.values[static_cast<std::size_t>(2 * m)] -
                                   u256.grid.values[static_cast<std::size_t>(m)]));
    }
    CHECK(d1 / d2 >= 3.5);
}

TEST_CASE("reference_fd_solve: input validation and step refusal") {
    ViscousParams vp{0.5, 1.0};
    const auto g = sample_grid(64, [](double x) { return std::sin(x); });
    CHECK_THROWS_AS(reference_fd_solve(g, 0.1, vp, 32), std::invalid_argument);
    CHECK_THROWS_AS(reference_fd_solve(g, 0.1, vp, 65), std::invalid_argument);
    // 4096 points -> dt ~ 1.2e-6: t = 100 demands ~8.6e7 steps, over the cap
    CHECK_THROWS_WITH_AS(reference_fd_solve(g, 100.0, vp, 4096), doctest::Contains("refusing"),
                         std::runtime_error);
}

TEST_CASE("cross-oracle: Hopf-Cole vs reference FD at 8x resolution") {
    const double nu = 0.5, t = 0.5;
    ViscousParams vp{nu, t};
    const int M = 256;
    const auto initial = sample_grid(M, [](double x) { return std::sin(x); });
    const auto hc = hopf_cole_solve(initial, t, vp);
    const auto fd = reference_fd_solve(sample_grid(8 * M, [](double x) { return std::sin(x); }), t,
                                       vp, 8 * M);
    double err = 0.0;
    for (int m = 0; m < M; ++m)
        err = std::max(err, std::abs(hc.grid.values[static_cast<std::size_t>(m)] -
                                     fd.grid.values[static_cast<std::size_t>(8 * m)]));
    CHECK(err <= 1e-6);
}

TEST_CASE("maximum principle for the dissipative orientation") {
    const double t = 0.4;
    ViscousParams vp{0.5, t};
    const auto initial = sample_grid(128, [](double x) { return std::sin(x) - 0.2 * std::sin(3 * x); });
    double m0 = 0.0;
    for (double v : initial.values) m0 = std::max(m0, std::abs(v));

    const auto hc = hopf_cole_solve(initial, t, vp);
    const auto fd = reference_fd_solve(initial, t, vp, 256);
    for (double v : hc.grid.values) CHECK(std::abs(v) <= m0 + 1e-10);
    for (double v : fd.grid.values) CHECK(std::abs(v) <= m0 + 1e-10);
}

TEST_CASE("well-posed spectral solve + reversal map agrees with Hopf-Cole") {
    const double sigma = 1.0, T = 0.25, nu = 0.5;
    auto cfg = make_config(16, sigma, T, 1000, Direction::well_posed_reverse);
    const auto a0 = sample_grid(cfg.M, [](double x) { return std::sin(x); });
    const auto traj = spectral::evolve(spectral::init_coeffs(a0, cfg), cfg);
    const auto v = time_reversal_map(traj, T);

    // v solves the standard form from v(., 0) = -sigma * a(., 0)
    const auto u0 = sample_grid(128, [sigma](double x) { return -sigma * std::sin(x); });
    const auto hc = hopf_cole_solve(u0, T, ViscousParams{nu, T});
    const auto vg = spectral::synthesize(v.back(), 128).grid;
    double err = 0.0;
    for (int m = 0; m < 128; ++m)
        err = std::max(err, std::abs(vg.values[static_cast<std::size_t>(m)] -
                                     hc.grid.values[static_cast<std::size_t>(m)]));
    CHECK(err <= 2e-3);  // first order in the solver step
}
