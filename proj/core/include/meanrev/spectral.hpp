// Truncated-Fourier Galerkin discretization of the time-reverse viscous
// Burgers equation
//
//     a_t = -(sigma^2/2) a_xx - sigma a a_x         on the torus [-pi, pi)
//
// In mode space (k = -N..N, products projected back onto the band) the
// explicit recurrence reads
//
//     a^(k, t_j) = (1 + d sigma^2 k^2 / 2) a^(k, t_{j-1})
//                  - (d sigma i k / 2) sum_p a^(p) a^(k-p)
//
// marched either in that orientation (`paper_forward`, ill-posed: mode k is
// amplified by (1 + d sigma^2 k^2/2) per step, guarded against blow-up) or
// with both right-hand-side signs flipped (`well_posed_reverse`, the
// dissipative orientation used for oracle cross-validation).

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace meanrev::spectral {

using Complex = std::complex<double>;

inline constexpr double kBlowUpLimit = 1e12;

enum class Direction { paper_forward, well_posed_reverse };

std::string to_string(Direction d);
Direction direction_from_string(const std::string& s);

/// Discretization parameters. delta, n_steps and T are coupled by
/// T = n_steps * delta; use `make_config` to build a consistent set.
struct SpectralConfig {
    int N = 8;              // truncation order: modes k = -N..N
    double sigma = 1.0;     // volatility (> 0)
    double delta = 1e-3;    // time step (> 0 when n_steps > 0)
    int n_steps = 0;
    double T = 0.0;         // horizon, equals n_steps * delta
    int M = 32;             // synthesis/quadrature grid size, >= 2N+1
    Direction direction = Direction::well_posed_reverse;

    void validate() const;  // throws std::invalid_argument naming the field
};

/// Convenience factory: delta = T/n_steps, M defaults to max(4N, 2N+1).
SpectralConfig make_config(int N, double sigma, double T, int n_steps,
                           Direction direction, int M = 0);

/// Real samples of a 2pi-periodic function at x_m = -pi + 2*pi*m/M.
struct GridFunction {
    std::vector<double> values;

    int size() const { return static_cast<int>(values.size()); }
    double node(int m) const;
    double max_abs() const;
};

/// Uniform grid nodes for a given M.
double grid_node(int m, int M);

/// Sample f on the M-point grid.
template <typename F>
GridFunction sample_grid(int M, F&& f) {
    GridFunction g;
    g.values.resize(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) g.values[static_cast<std::size_t>(m)] = f(grid_node(m, M));
    return g;
}

/// Band-limited coefficient vector a^(k, t), k = -N..N, with time stamp.
/// Hermitian symmetry a^(-k) = conj(a^(k)) is established once by
/// init_coeffs and preserved bit-exactly by the operations below; it is
/// asserted by consumers, never silently re-imposed.
class FourierState {
public:
    FourierState() = default;
    FourierState(int N, double t)
        : coeffs_(static_cast<std::size_t>(2 * N + 1)), t_(t), N_(N) {}

    static FourierState from_coeffs(std::vector<Complex> coeffs, double t);

    int order() const { return N_; }
    double time() const { return t_; }
    void set_time(double t) { t_ = t; }

    Complex coeff(int k) const { return coeffs_[index(k)]; }
    void set_coeff(int k, Complex v) { coeffs_[index(k)] = v; }
    const std::vector<Complex>& raw() const { return coeffs_; }

    double max_abs() const;
    /// max_k |a^(-k) - conj(a^(k))|; zero for exactly Hermitian states.
    double hermitian_defect() const;
    bool all_finite() const;

private:
    std::size_t index(int k) const {
        if (k < -N_ || k > N_) throw std::out_of_range("FourierState: mode index out of band");
        return static_cast<std::size_t>(k + N_);
    }

    std::vector<Complex> coeffs_;
    double t_ = 0.0;
    int N_ = 0;
};

/// Sequence of states at t_j = j * delta (times stamped by multiplication).
struct CoeffTrajectory {
    std::vector<FourierState> states;
    SpectralConfig config;
    std::vector<double> max_abs;  // per-state max |a^(k)|, blow-up diagnostic

    int steps() const { return static_cast<int>(states.size()) - 1; }
    double horizon() const { return config.n_steps * config.delta; }
    const FourierState& front() const { return states.front(); }
    const FourierState& back() const { return states.back(); }
};

/// Thrown by evolve when some |a^(k)| exceeds kBlowUpLimit.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(int step, int mode, double magnitude);
    int step;
    int mode;
    double magnitude;
};

/// a^(k, 0) = (1/M) sum_m values[m] e^{-i k x_m}, the uniform-grid rule for
/// (1/2pi) integral of a(x,0) e^{-ikx} over one period. Output is
/// symmetrized exactly (a^(k) and conj(a^(-k)) averaged).
FourierState init_coeffs(const GridFunction& initial, const SpectralConfig& config);

/// c(k) = sum_{p=-N}^{N} a(p) b(k-p), indices outside [-N, N] contribute
/// zero (projection of the product back onto the band).
FourierState truncated_convolution(const FourierState& a, const FourierState& b);

/// Right-hand side of the continuous mode ODE at the state's time:
/// rhs(k) = (sigma^2/2) k^2 a^(k) - (sigma i k / 2) sum_p a^(p) a^(k-p).
/// The k = 0 component is exactly zero.
FourierState spectral_rhs(const FourierState& state, const SpectralConfig& config);

/// One explicit step of the recurrence, signs per config.direction.
/// The k = 0 coefficient is carried over bit-identically.
FourierState galerkin_step(const FourierState& state, const SpectralConfig& config);

/// n_steps applications of galerkin_step; states[j].time() == j * delta.
CoeffTrajectory evolve(const FourierState& initial, const SpectralConfig& config);

struct Synthesis {
    GridFunction grid;
    double imag_residual = 0.0;  // max |Im| discarded, before realization
};

/// a_N(x_m) = sum_k a^(k) e^{i k x_m} on an M-point grid, M >= 2N+1.
/// Fails (integrity error) when the discarded imaginary part exceeds
/// 1e-12 * max|a^|, i.e. when Hermitian symmetry has degraded.
Synthesis synthesize(const FourierState& state, int grid_size);

}  // namespace meanrev::spectral
