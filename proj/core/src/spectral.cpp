#include "meanrev/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace meanrev::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::string to_string(Direction d) {
    return d == Direction::paper_forward ? "paper_forward" : "well_posed_reverse";
}

Direction direction_from_string(const std::string& s) {
    if (s == "paper_forward") return Direction::paper_forward;
    if (s == "well_posed_reverse") return Direction::well_posed_reverse;
    throw std::invalid_argument("direction: expected paper_forward or well_posed_reverse, got '" + s + "'");
}

void SpectralConfig::validate() const {
    require(N >= 1, "N: truncation order must be >= 1");
    require(sigma > 0.0 && std::isfinite(sigma), "sigma: must be finite and > 0");
    require(M >= 2 * N + 1, "M: grid size must be >= 2N+1");
    require(n_steps >= 0, "n: step count must be >= 0");
    if (n_steps > 0) {
        require(delta > 0.0 && std::isfinite(delta), "delta: time step must be finite and > 0");
        // T = n * delta to within one unit of roundoff
        const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(T));
        require(std::abs(n_steps * delta - T) <= slack, "T: horizon must equal n * delta");
    }
    require(T >= 0.0 && std::isfinite(T), "T: horizon must be finite and >= 0");
}

SpectralConfig make_config(int N, double sigma, double T, int n_steps,
                           Direction direction, int M) {
    SpectralConfig cfg;
    cfg.N = N;
    cfg.sigma = sigma;
    cfg.T = T;
    cfg.n_steps = n_steps;
    cfg.delta = n_steps > 0 ? T / n_steps : 1.0;  // unused when n_steps == 0
    cfg.M = M > 0 ? M : std::max(4 * N, 2 * N + 1);
    cfg.direction = direction;
    cfg.validate();
    return cfg;
}

double grid_node(int m, int M) {
    return -kPi + 2.0 * kPi * m / M;
}

double GridFunction::node(int m) const {
    return grid_node(m, size());
}

double GridFunction::max_abs() const {
    double r = 0.0;
    for (double v : values) r = std::max(r, std::abs(v));
    return r;
}

FourierState FourierState::from_coeffs(std::vector<Complex> coeffs, double t) {
    if (coeffs.empty() || coeffs.size() % 2 == 0)
        throw std::invalid_argument("FourierState: coefficient count must be odd (2N+1)");
    FourierState s;
    s.N_ = static_cast<int>(coeffs.size() / 2);
    s.coeffs_ = std::move(coeffs);
    s.t_ = t;
    return s;
}

double FourierState::max_abs() const {
    double r = 0.0;
    for (const Complex& c : coeffs_) r = std::max(r, std::abs(c));
    return r;
}

double FourierState::hermitian_defect() const {
    double d = 0.0;
    for (int k = 0; k <= N_; ++k)
        d = std::max(d, std::abs(coeff(-k) - std::conj(coeff(k))));
    return d;
}

bool FourierState::all_finite() const {
    for (const Complex& c : coeffs_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

namespace {
std::string blowup_message(int step, int mode, double magnitude) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "blow-up at step %d, mode %d: |a^| = %.6e exceeds %.0e", step,
                  mode, magnitude, kBlowUpLimit);
    return buf;
}
}  // namespace

BlowUpError::BlowUpError(int step_, int mode_, double magnitude_)
    : std::runtime_error(blowup_message(step_, mode_, magnitude_)),
      step(step_),
      mode(mode_),
      magnitude(magnitude_) {}

FourierState init_coeffs(const GridFunction& initial, const SpectralConfig& config) {
    config.validate();
    const int M = initial.size();
    const int N = config.N;
    require(M >= 2 * N + 1, "M: initial grid must have at least 2N+1 samples");
    require(M == config.M, "M: initial grid size must match config.M");
    for (double v : initial.values)
        require(std::isfinite(v), "initial: grid samples must be finite");

    FourierState out(N, 0.0);
    for (int k = -N; k <= N; ++k) {
        Complex sum{0.0, 0.0};
        for (int m = 0; m < M; ++m)
            sum += initial.values[static_cast<std::size_t>(m)] *
                   std::polar(1.0, -k * grid_node(m, M));
        out.set_coeff(k, sum / static_cast<double>(M));
    }
    // symmetrize once: average a^(k) with conj(a^(-k)); real input already
    // satisfies this to roundoff, the averaging makes it exact
    out.set_coeff(0, Complex{out.coeff(0).real(), 0.0});
    for (int k = 1; k <= N; ++k) {
        const Complex avg = 0.5 * (out.coeff(k) + std::conj(out.coeff(-k)));
        out.set_coeff(k, avg);
        out.set_coeff(-k, std::conj(avg));
    }
    return out;
}

FourierState truncated_convolution(const FourierState& a, const FourierState& b) {
    if (a.order() != b.order())
        throw std::invalid_argument("truncated_convolution: operands must share N");
    if (a.time() != b.time())
        throw std::invalid_argument("truncated_convolution: operands must share t");
    const int N = a.order();

    // For each k the sum runs over the p for which k-p stays in band.
    // c(k) and c(-k) accumulate mirrored terms in the same order, and the
    // k = 0 sum adds its +-p partners as one pair, so Hermitian symmetry of
    // the inputs carries to the output bit-exactly, not re-imposed.
    FourierState out(N, a.time());
    Complex c0 = a.coeff(0) * b.coeff(0);
    for (int p = 1; p <= N; ++p) c0 += a.coeff(p) * b.coeff(-p) + a.coeff(-p) * b.coeff(p);
    out.set_coeff(0, c0);
    for (int k = 1; k <= N; ++k) {
        const int lo = std::max(-N, k - N);
        const int hi = std::min(N, k + N);
        Complex pos{0.0, 0.0};
        Complex neg{0.0, 0.0};
        for (int p = lo; p <= hi; ++p) {
            pos += a.coeff(p) * b.coeff(k - p);
            neg += a.coeff(-p) * b.coeff(p - k);
        }
        out.set_coeff(k, pos);
        out.set_coeff(-k, neg);
    }
    return out;
}

FourierState spectral_rhs(const FourierState& state, const SpectralConfig& config) {
    config.validate();
    if (state.order() != config.N)
        throw std::invalid_argument("spectral_rhs: state order must match config.N");
    const int N = config.N;
    const double s2 = config.sigma * config.sigma;
    const FourierState conv = truncated_convolution(state, state);

    FourierState out(N, state.time());
    out.set_coeff(0, Complex{0.0, 0.0});
    for (int k = -N; k <= N; ++k) {
        if (k == 0) continue;
        const double kk = static_cast<double>(k);
        const Complex linear = 0.5 * s2 * kk * kk * state.coeff(k);
        const Complex nonlinear = Complex{0.0, 0.5 * config.sigma * kk} * conv.coeff(k);
        out.set_coeff(k, linear - nonlinear);
    }
    return out;
}

FourierState galerkin_step(const FourierState& state, const SpectralConfig& config) {
    config.validate();
    if (state.order() != config.N)
        throw std::invalid_argument("galerkin_step: state order must match config.N");
    const int N = config.N;
    const double sgn = config.direction == Direction::paper_forward ? 1.0 : -1.0;
    const double d = config.delta;
    const double s2 = config.sigma * config.sigma;
    const FourierState conv = truncated_convolution(state, state);

    FourierState out(N, state.time() + d);
    out.set_coeff(0, state.coeff(0));  // both k=0 terms vanish identically
    for (int k = -N; k <= N; ++k) {
        if (k == 0) continue;
        const double kk = static_cast<double>(k);
        const double growth = 1.0 + sgn * 0.5 * d * s2 * kk * kk;
        const Complex nonlinear =
            Complex{0.0, sgn * 0.5 * d * config.sigma * kk} * conv.coeff(k);
        out.set_coeff(k, growth * state.coeff(k) - nonlinear);
    }
    return out;
}

CoeffTrajectory evolve(const FourierState& initial, const SpectralConfig& config) {
    config.validate();
    if (initial.order() != config.N)
        throw std::invalid_argument("evolve: initial state order must match config.N");
    if (!initial.all_finite())
        throw std::invalid_argument("evolve: initial state has non-finite coefficients");

    CoeffTrajectory traj;
    traj.config = config;
    traj.states.reserve(static_cast<std::size_t>(config.n_steps) + 1);
    traj.max_abs.reserve(static_cast<std::size_t>(config.n_steps) + 1);

    FourierState current = initial;
    current.set_time(0.0);
    traj.states.push_back(current);
    traj.max_abs.push_back(current.max_abs());

    for (int j = 1; j <= config.n_steps; ++j) {
        current = galerkin_step(current, config);
        current.set_time(j * config.delta);  // stamped by multiplication

        double worst = 0.0;
        int worst_mode = 0;
        for (int k = -config.N; k <= config.N; ++k) {
            const double mag = std::abs(current.coeff(k));
            if (mag > worst || !std::isfinite(mag)) {
                worst = mag;
                worst_mode = k;
                if (!std::isfinite(mag)) break;
            }
        }
        if (!(worst <= kBlowUpLimit)) throw BlowUpError(j, worst_mode, worst);

        traj.states.push_back(current);
        traj.max_abs.push_back(worst);
    }
    return traj;
}

Synthesis synthesize(const FourierState& state, int grid_size) {
    const int N = state.order();
    const int M = grid_size;
    require(M >= 2 * N + 1, "M: synthesis grid must have at least 2N+1 points");

    const double scale = state.max_abs();
    Synthesis out;
    out.grid.values.resize(static_cast<std::size_t>(M));

    for (int m = 0; m < M; ++m) {
        const double x = grid_node(m, M);
        // pair +k with -k through an exact conjugate so that the imaginary
        // parts cancel exactly for Hermitian states
        Complex sum = state.coeff(0);
        for (int k = 1; k <= N; ++k) {
            const Complex phase = std::polar(1.0, k * x);
            sum += state.coeff(k) * phase + state.coeff(-k) * std::conj(phase);
        }
        out.grid.values[static_cast<std::size_t>(m)] = sum.real();
        out.imag_residual = std::max(out.imag_residual, std::abs(sum.imag()));
    }
    if (out.imag_residual > 1e-12 * std::max(scale, 1e-300))
        throw std::runtime_error(
            "synthesize: Hermitian symmetry violated, discarded imaginary part " +
            std::to_string(out.imag_residual) + " exceeds 1e-12 * max|a^|");
    return out;
}

}  // namespace meanrev::spectral
