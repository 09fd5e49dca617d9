#include "meanrev/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace meanrev::oracle {

namespace {

using spectral::Complex;
using spectral::GridFunction;
using spectral::grid_node;

constexpr double kPi = std::numbers::pi;

// Direct DFT analysis of real samples to modes k = -K..K (K < M/2).
// Same rectangle rule as the solver's coefficient formula; sizes here are
// small enough that O(M*K) direct sums stay cheap.
std::vector<Complex> analyze(const GridFunction& g, int K) {
    const int M = g.size();
    std::vector<Complex> modes(static_cast<std::size_t>(2 * K + 1));
    for (int k = 0; k <= K; ++k) {
        Complex sum{0.0, 0.0};
        for (int m = 0; m < M; ++m)
            sum += g.values[static_cast<std::size_t>(m)] * std::polar(1.0, -k * grid_node(m, M));
        sum /= static_cast<double>(M);
        modes[static_cast<std::size_t>(K + k)] = sum;
        modes[static_cast<std::size_t>(K - k)] = std::conj(sum);
    }
    modes[static_cast<std::size_t>(K)] = Complex{modes[static_cast<std::size_t>(K)].real(), 0.0};
    return modes;
}

double eval_modes(const std::vector<Complex>& modes, int K, double x) {
    Complex sum = modes[static_cast<std::size_t>(K)];
    for (int k = 1; k <= K; ++k) {
        const Complex phase = std::polar(1.0, k * x);
        sum += modes[static_cast<std::size_t>(K + k)] * phase +
               modes[static_cast<std::size_t>(K - k)] * std::conj(phase);
    }
    return sum.real();
}

// Trig-interpolant resampling onto an R-point grid (exact for band-limited data).
GridFunction resample(const GridFunction& g, int R) {
    if (g.size() == R) return g;
    const int K = g.size() / 2 - 1;
    const auto modes = analyze(g, K);
    GridFunction out;
    out.values.resize(static_cast<std::size_t>(R));
    for (int m = 0; m < R; ++m)
        out.values[static_cast<std::size_t>(m)] = eval_modes(modes, K, grid_node(m, R));
    return out;
}

double spatial_mean(const GridFunction& g) {
    double s = 0.0;
    for (double v : g.values) s += v;
    return s / g.size();
}

spectral::FourierState scaled_state(const spectral::FourierState& s, double factor, double t) {
    spectral::FourierState out(s.order(), t);
    for (int k = -s.order(); k <= s.order(); ++k) out.set_coeff(k, factor * s.coeff(k));
    return out;
}

struct HopfColeResult {
    GridFunction grid;
    int resolution;
};

HopfColeResult hopf_cole_at(const GridFunction& initial, double t, double nu, int fine) {
    const int M = initial.size();
    const int K = M / 2 - 1;
    const auto u_modes = analyze(initial, K);

    // U(x) = integral_0^x u0, from the modes of the trig interpolant;
    // the k = 0 mode is dropped (zero-mean precondition already checked)
    std::vector<double> U(static_cast<std::size_t>(fine));
    double max_arg = 0.0;
    for (int m = 0; m < fine; ++m) {
        const double x = grid_node(m, fine);
        Complex sum{0.0, 0.0};
        for (int k = 1; k <= K; ++k) {
            const Complex phase = std::polar(1.0, k * x);
            const Complex ik{0.0, static_cast<double>(k)};
            sum += u_modes[static_cast<std::size_t>(K + k)] * (phase - 1.0) / ik +
                   u_modes[static_cast<std::size_t>(K - k)] * (std::conj(phase) - 1.0) / (-ik);
        }
        U[static_cast<std::size_t>(m)] = sum.real();
        max_arg = std::max(max_arg, std::abs(sum.real()) / (2.0 * nu));
    }
    if (max_arg > 700.0)
        throw std::runtime_error(
            "hopf_cole_solve: phi under/overflows (|integral u0|/(2 nu) too large); "
            "increase nu or rescale the data");

    GridFunction phi0;
    phi0.values.resize(static_cast<std::size_t>(fine));
    for (int m = 0; m < fine; ++m)
        phi0.values[static_cast<std::size_t>(m)] =
            std::exp(-U[static_cast<std::size_t>(m)] / (2.0 * nu));

    // phi through the heat equation: mode q decays by exp(-nu q^2 t)
    const int Kf = fine / 2 - 1;
    const auto phi_modes = analyze(phi0, Kf);

    HopfColeResult res;
    res.resolution = fine;
    res.grid.values.resize(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) {
        const double x = grid_node(m, M);
        double phi = phi_modes[static_cast<std::size_t>(Kf)].real();
        double phi_x = 0.0;
        for (int q = 1; q <= Kf; ++q) {
            const double decay = std::exp(-nu * static_cast<double>(q) * q * t);
            if (decay == 0.0) break;
            const Complex cq = phi_modes[static_cast<std::size_t>(Kf + q)] * decay;
            const Complex phase = std::polar(1.0, q * x);
            const Complex term = cq * phase;
            phi += 2.0 * term.real();
            phi_x += 2.0 * (Complex{0.0, static_cast<double>(q)} * term).real();
        }
        if (!(phi > 1e-280))
            throw std::runtime_error("hopf_cole_solve: phi lost positivity at the working resolution");
        res.grid.values[static_cast<std::size_t>(m)] = -2.0 * nu * phi_x / phi;
    }
    return res;
}

struct FdResult {
    GridFunction grid;
    double dt;
    long long steps;
};

// Heun steps of u_t = -d/dx(u^2/2) + nu u_xx on an R-point periodic grid.
FdResult fd_advance(const GridFunction& initial, double t, double nu, int R,
                    long long max_steps) {
    const double h = 2.0 * kPi / R;
    std::vector<double> u = resample(initial, R).values;

    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::abs(v));
    const double dt_diff = h * h / (4.0 * nu);
    const double dt_adv = h / (4.0 * (umax + 1e-12));
    const double dt0 = std::min(dt_diff, dt_adv);

    FdResult res;
    if (t == 0.0) {
        res.grid.values = std::move(u);
        res.dt = 0.0;
        res.steps = 0;
        return res;
    }
    const long long steps = static_cast<long long>(std::ceil(t / dt0));
    if (steps > max_steps)
        throw std::runtime_error("reference_fd_solve: refusing request needing " +
                                 std::to_string(steps) + " steps (> " +
                                 std::to_string(max_steps) + "); lower the resolution or t");
    const double dt = t / static_cast<double>(steps);

    std::vector<double> rhs(u.size()), ustar(u.size()), rhs2(u.size());
    auto eval_rhs = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (int i = 0; i < R; ++i) {
            const int ip = i + 1 == R ? 0 : i + 1;
            const int im = i == 0 ? R - 1 : i - 1;
            const double flux = (v[static_cast<std::size_t>(ip)] * v[static_cast<std::size_t>(ip)] -
                                 v[static_cast<std::size_t>(im)] * v[static_cast<std::size_t>(im)]) /
                                (4.0 * h);
            const double diff = nu *
                                (v[static_cast<std::size_t>(ip)] - 2.0 * v[static_cast<std::size_t>(i)] +
                                 v[static_cast<std::size_t>(im)]) /
                                (h * h);
            out[static_cast<std::size_t>(i)] = -flux + diff;
        }
    };

    for (long long s = 0; s < steps; ++s) {
        eval_rhs(u, rhs);
        for (std::size_t i = 0; i < u.size(); ++i) ustar[i] = u[i] + dt * rhs[i];
        eval_rhs(ustar, rhs2);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += 0.5 * dt * (rhs[i] + rhs2[i]);
    }
    res.grid.values = std::move(u);
    res.dt = dt;
    res.steps = steps;
    return res;
}

}  // namespace

void ViscousParams::validate() const {
    if (!(nu > 0.0) || !std::isfinite(nu))
        throw std::invalid_argument("nu: viscosity must be finite and > 0");
    if (!(T >= 0.0) || !std::isfinite(T))
        throw std::invalid_argument("T: horizon must be finite and >= 0");
}

std::string to_string(Method m) {
    return m == Method::hopf_cole ? "hopf_cole" : "reference_fd";
}

spectral::CoeffTrajectory time_reversal_map(const spectral::CoeffTrajectory& traj, double T) {
    const double delta = traj.config.delta;
    const double sigma = traj.config.sigma;
    if (traj.states.empty()) throw std::invalid_argument("time_reversal_map: empty trajectory");
    const long long m = std::llround(T / delta);
    if (std::abs(static_cast<double>(m) * delta - T) > 1e-9 * std::max(1.0, std::abs(T)) ||
        m < 0)
        throw std::invalid_argument("time_reversal_map: T must be a step multiple");
    if (m > traj.steps())
        throw std::invalid_argument("time_reversal_map: trajectory too short for T");

    const bool flip = traj.config.direction == spectral::Direction::paper_forward;

    spectral::CoeffTrajectory out;
    out.config = traj.config;
    out.config.n_steps = static_cast<int>(m);
    out.config.T = static_cast<double>(m) * delta;
    out.config.direction = spectral::Direction::well_posed_reverse;  // standard orientation
    out.states.reserve(static_cast<std::size_t>(m) + 1);
    out.max_abs.reserve(static_cast<std::size_t>(m) + 1);
    for (long long j = 0; j <= m; ++j) {
        const std::size_t src = flip ? static_cast<std::size_t>(m - j) : static_cast<std::size_t>(j);
        out.states.push_back(scaled_state(traj.states[src], -sigma, j * delta));
        out.max_abs.push_back(out.states.back().max_abs());
    }
    return out;
}

OracleSolution hopf_cole_solve(const spectral::GridFunction& initial, double t,
                               const ViscousParams& params) {
    params.validate();
    if (initial.size() < 8) throw std::invalid_argument("initial: need at least 8 grid samples");
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("t: must be finite and >= 0");
    for (double v : initial.values)
        if (!std::isfinite(v)) throw std::invalid_argument("initial: grid samples must be finite");
    const double mean = spatial_mean(initial);
    if (std::abs(mean) > 1e-10 * std::max(1.0, initial.max_abs()))
        throw std::invalid_argument(
            "initial: Hopf-Cole needs zero-mean data; split off the mean ubar and solve for "
            "w = u - ubar on a grid shifted by ubar*t");

    const int fine = std::max(4 * initial.size(), 256);
    const HopfColeResult a = hopf_cole_at(initial, t, params.nu, fine);
    const HopfColeResult b = hopf_cole_at(initial, t, params.nu, 2 * fine);

    OracleSolution out;
    out.method = Method::hopf_cole;
    out.resolution = b.resolution;
    out.grid = b.grid;
    double diff = 0.0;
    for (std::size_t i = 0; i < a.grid.values.size(); ++i)
        diff = std::max(diff, std::abs(a.grid.values[i] - b.grid.values[i]));
    out.est_error = diff;
    return out;
}

OracleSolution reference_fd_solve(const spectral::GridFunction& initial, double t,
                                  const ViscousParams& params, int resolution) {
    params.validate();
    if (resolution < 64) throw std::invalid_argument("resolution: must be >= 64");
    if (resolution % 2 != 0)
        throw std::invalid_argument("resolution: must be even (needed for the error estimate)");
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("t: must be finite and >= 0");
    for (double v : initial.values)
        if (!std::isfinite(v)) throw std::invalid_argument("initial: grid samples must be finite");

    constexpr long long kMaxSteps = 50'000'000;
    const FdResult full = fd_advance(initial, t, params.nu, resolution, kMaxSteps);
    const FdResult half = fd_advance(initial, t, params.nu, resolution / 2, kMaxSteps);

    // Richardson gap at shared nodes; scheme is second order, so the true
    // error of the full solve is about gap/3
    double gap = 0.0;
    for (int i = 0; i < resolution / 2; ++i)
        gap = std::max(gap, std::abs(full.grid.values[static_cast<std::size_t>(2 * i)] -
                                     half.grid.values[static_cast<std::size_t>(i)]));

    OracleSolution out;
    out.method = Method::reference_fd;
    out.resolution = resolution;
    out.grid = full.grid;
    out.dt_used = full.dt;
    out.est_error = gap / 3.0;
    return out;
}

}  // namespace meanrev::oracle
