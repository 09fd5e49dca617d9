// Shared fixtures for the test binaries: random Hermitian states, the
// independent brute-force oracles the implementation is checked against,
// quadrature, synthetic trajectories and small statistics helpers. Oracles
// here are written from scratch against the formulas, not by calling the
// library, so that agreement is evidence.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "meanrev/spectral.hpp"

namespace testsupport {

using meanrev::spectral::Complex;
using meanrev::spectral::CoeffTrajectory;
using meanrev::spectral::FourierState;
using meanrev::spectral::GridFunction;

inline constexpr double kPi = std::numbers::pi;

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

inline FourierState random_hermitian(int N, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    FourierState s(N, 0.0);
    s.set_coeff(0, Complex{g(rng), 0.0});
    for (int k = 1; k <= N; ++k) {
        const Complex c{g(rng), g(rng)};
        s.set_coeff(k, c);
        s.set_coeff(-k, std::conj(c));
    }
    return s;
}

/// Band convolution straight from the definition: full double loop with an
/// in-band test per term (structurally unlike the clamped production loop).
inline FourierState brute_convolution(const FourierState& a, const FourierState& b) {
    const int N = a.order();
    FourierState out(N, a.time());
    for (int k = -N; k <= N; ++k) {
        Complex sum{0.0, 0.0};
        for (int p = -N; p <= N; ++p) {
            const int q = k - p;
            if (q < -N || q > N) continue;  // outside the band contributes zero
            sum += a.coeff(p) * b.coeff(q);
        }
        out.set_coeff(k, sum);
    }
    return out;
}

/// From-scratch transcription of the explicit step
///   a'(k) = (d s^2 k^2/2 + 1) a(k) - (d s i k/2) sum_p a(p) a(k-p),
/// sign = +1 for the ill-posed-forward orientation, -1 for both right-hand
/// side signs flipped.
inline FourierState brute_recurrence_step(const FourierState& a, double delta, double sigma,
                                          double sign) {
    const int N = a.order();
    FourierState out(N, a.time() + delta);
    for (int k = -N; k <= N; ++k) {
        Complex conv{0.0, 0.0};
        for (int p = -N; p <= N; ++p) {
            const int q = k - p;
            if (q < -N || q > N) continue;
            conv += a.coeff(p) * a.coeff(q);
        }
        const double kk = k;
        const Complex lin = (sign * 0.5 * delta * sigma * sigma * kk * kk + 1.0) * a.coeff(k);
        const Complex nonlin = sign * 0.5 * delta * sigma * Complex{0.0, kk} * conv;
        out.set_coeff(k, lin - nonlin);
    }
    return out;
}

/// (1/2pi) integral over [-pi, pi] of f(x) e^{-ikx} dx by the composite
/// trapezoid rule with `panels` panels.
inline Complex quadrature_coeff(const std::function<double(double)>& f, int k, int panels) {
    const double h = 2.0 * kPi / panels;
    Complex sum = 0.5 * (f(-kPi) * std::polar(1.0, -k * -kPi) + f(kPi) * std::polar(1.0, -k * kPi));
    for (int m = 1; m < panels; ++m) {
        const double x = -kPi + h * m;
        sum += f(x) * std::polar(1.0, -k * x);
    }
    return sum * h / (2.0 * kPi);
}

inline double max_coeff_diff(const FourierState& a, const FourierState& b) {
    double d = 0.0;
    for (int k = -a.order(); k <= a.order(); ++k)
        d = std::max(d, std::abs(a.coeff(k) - b.coeff(k)));
    return d;
}

/// Synthetic trajectory with modes given in closed form as fn(k, t).
inline CoeffTrajectory trajectory_from_modes(int N, double sigma, double T, int n_steps,
                                             meanrev::spectral::Direction direction,
                                             const std::function<Complex(int, double)>& fn) {
    CoeffTrajectory traj;
    traj.config =
        meanrev::spectral::make_config(N, sigma, T, n_steps, direction);
    for (int j = 0; j <= n_steps; ++j) {
        const double t = j * traj.config.delta;
        FourierState s(N, t);
        for (int k = -N; k <= N; ++k) s.set_coeff(k, fn(k, t));
        traj.max_abs.push_back(s.max_abs());
        traj.states.push_back(std::move(s));
    }
    return traj;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    int n = 0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe r;
    r.n = static_cast<int>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / r.n;
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / std::max(1, r.n - 1) / r.n);
    return r;
}

/// Max-norm residual of the standard dissipative form u_s + u u_x = nu u_xx
/// over a trajectory's interior steps: time derivative by centered
/// differences of the stored states, spatial derivatives exact in modes.
inline double standard_burgers_fd_residual(const CoeffTrajectory& v, double nu, int grid) {
    const int n = v.steps();
    const double dt = v.config.delta;
    double worst = 0.0;
    for (int j = 1; j < n; ++j) {
        const auto& s = v.states[static_cast<std::size_t>(j)];
        const int N = s.order();
        for (int m = 0; m < grid; ++m) {
            const double x = meanrev::spectral::grid_node(m, grid);
            double u = s.coeff(0).real(), ux = 0.0, uxx = 0.0, us = 0.0;
            us += (v.states[static_cast<std::size_t>(j + 1)].coeff(0).real() -
                   v.states[static_cast<std::size_t>(j - 1)].coeff(0).real()) /
                  (2.0 * dt);
            for (int k = 1; k <= N; ++k) {
                const Complex phase = std::polar(1.0, k * x);
                const Complex ck = s.coeff(k);
                u += 2.0 * (ck * phase).real();
                ux += 2.0 * (Complex{0.0, double(k)} * ck * phase).real();
                uxx += -2.0 * double(k) * double(k) * (ck * phase).real();
                const Complex dck = (v.states[static_cast<std::size_t>(j + 1)].coeff(k) -
                                     v.states[static_cast<std::size_t>(j - 1)].coeff(k)) /
                                    (2.0 * dt);
                us += 2.0 * (dck * phase).real();
            }
            worst = std::max(worst, std::abs(us + u * ux - nu * uxx));
        }
    }
    return worst;
}

}  // namespace testsupport
