// Monte Carlo layer for the mean-reversion equation
//
//     dR_t = (theta + sigma a(X_t, t)) R_t dt + sigma R_t dB_t,    R_0 = r0,
//
// where the drift correction a is evaluated in the transformed coordinate
// X_t = ln R_t - (theta - sigma^2/2) t. Provides three sampling schemes
// (plain Euler-Maruyama on R, Euler on X then exponentiate, and the exact
// lognormal solution under the drift-free measure), the Girsanov log-density
// along each path, the potential Z reconstructed from a, and the
// path-independence residual |L_n + Z(X_T,T) - Z(X_0,0)| that vanishes when
// the log-density depends on the path only through its endpoint.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "meanrev/spectral.hpp"

namespace meanrev::sde {

enum class Scheme { euler, log_euler, exact_q };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SdeParams {
    double theta = 0.0;
    double sigma = 1.0;            // > 0
    double r0 = 1.0;               // != 0
    double T = 1.0;                // horizon
    int steps = 100;               // >= 1
    int paths = 1000;              // >= 1
    std::uint64_t master_seed = 0;

    double dt() const { return T / steps; }
    void validate() const;
};

/// Evaluable drift correction a(x, t): either a closed form (zero, constant,
/// arbitrary callable) or the synthesis of a solved coefficient trajectory
/// with linear interpolation between stored steps. A trajectory solved in
/// the well_posed_reverse orientation is presented in reversed step order,
/// so the field always represents a solution of the ill-posed-forward
/// equation on [0, T]; x is evaluated through the modes and is therefore
/// 2pi-periodic in x by construction.
class AlphaField {
public:
    enum class Kind { zero, constant, trajectory, custom };

    static AlphaField zero();
    static AlphaField constant(double a);
    static AlphaField from_trajectory(spectral::CoeffTrajectory traj);
    static AlphaField custom(std::function<double(double, double)> f);

    double operator()(double x, double t) const;
    Kind kind() const { return kind_; }
    bool needs_x() const { return kind_ == Kind::trajectory || kind_ == Kind::custom; }
    double constant_value() const { return const_value_; }

    /// Trajectory horizon (infinity for closed forms).
    double horizon() const;
    /// Paper-time-ordered state at step j (trajectory kind only).
    const spectral::FourierState& state_at(int j) const;
    int trajectory_steps() const;
    double trajectory_delta() const;
    const spectral::SpectralConfig& trajectory_config() const;

    /// Content hash used to verify that a ZField and an ensemble were built
    /// from the same field.
    std::uint64_t fingerprint() const;

private:
    Kind kind_ = Kind::zero;
    double const_value_ = 0.0;
    std::function<double(double, double)> fn_;
    std::shared_ptr<const spectral::CoeffTrajectory> traj_;
    bool reversed_ = false;  // well_posed_reverse storage order

    std::size_t paper_index(int j) const;
};

/// Simulated paths with their driving increments kept for later density and
/// residual bookkeeping. Paths that left the domain of definition (plain
/// Euler-Maruyama hitting R <= 0 with an x-dependent field, or a non-finite
/// state) are flagged excluded and skipped by all aggregates.
struct PathEnsemble {
    Scheme scheme = Scheme::log_euler;
    double r0 = 1.0;
    double dt = 0.0;
    std::vector<std::vector<double>> increments;  // paths x steps
    std::vector<std::vector<double>> R;           // paths x (steps+1)
    std::vector<std::uint64_t> seeds;             // per-path seeds
    std::vector<std::uint8_t> excluded;

    int paths() const { return static_cast<int>(R.size()); }
    int steps() const { return R.empty() ? 0 : static_cast<int>(R.front().size()) - 1; }
    int excluded_count() const;
};

std::uint64_t path_seed(std::uint64_t master_seed, int path_index);

PathEnsemble simulate_em(const SdeParams& params, const AlphaField& alpha, int threads = 0);
PathEnsemble simulate_log_euler(const SdeParams& params, const AlphaField& alpha, int threads = 0);
PathEnsemble simulate_exact_q(const SdeParams& params, int threads = 0);

/// Deterministic re-run of a scheme on externally supplied increments
/// (step injection for tests, coupled coarse/fine studies).
PathEnsemble simulate_with_increments(const SdeParams& params, const AlphaField& alpha,
                                      Scheme scheme,
                                      std::vector<std::vector<double>> increments);

/// Same Brownian paths on a coarser grid: groups of `factor` increments are
/// summed and the scheme is re-advanced. params must describe the fine run.
PathEnsemble coarsen(const PathEnsemble& fine, const SdeParams& fine_params,
                     const AlphaField& alpha, int factor);

/// X_j = ln R_j - (theta - sigma^2/2) t_j per path. Throws (naming path and
/// step) if a finite non-positive R is met on a non-excluded path; excluded
/// paths yield NaN rows.
std::vector<std::vector<double>> x_transform(const PathEnsemble& ensemble,
                                             const SdeParams& params);

/// Per-path Girsanov log-density at every grid time, left-point rule:
/// L_{j} = -sum_{i<j} [ a(X_i,t_i)^2 dt / 2 + a(X_i,t_i) dB_i ].
std::vector<std::vector<double>> girsanov_log_density(const PathEnsemble& ensemble,
                                                      const SdeParams& params,
                                                      const AlphaField& alpha);

/// Fraction of (path, time) samples with R * r0 > 0, excluded paths skipped.
double sign_fraction(const PathEnsemble& ensemble);

/// Potential with dZ = -a^2/2 dt + (a/sigma) dX. Built from the modes of a
/// (exact antiderivative in x, trapezoid in t at x0); evaluation is exact in
/// x for any real x, the mean mode contributing an explicit linear term, and
/// linear in t between stored steps. Z(x0, 0) == 0.
class ZField {
public:
    double operator()(double x, double t) const;
    double anchor_x0() const { return x0_; }
    double sigma() const { return sigma_; }
    double horizon() const;
    std::uint64_t alpha_fingerprint() const { return alpha_fp_; }
    /// Linear-in-x coefficient at time t (0 for zero-mean fields).
    double linear_coefficient(double t) const;
    /// Grid samples for serialization.
    spectral::GridFunction grid_at(double t, int M) const;

private:
    friend ZField reconstruct_Z(const AlphaField&, double, double);

    // closed-form branch (zero / constant alpha)
    bool closed_form_ = false;
    double const_a_ = 0.0;

    // trajectory branch
    std::vector<spectral::FourierState> states_;  // paper-time order
    std::vector<double> time_integral_;           // cumulative trapezoid at x0
    double delta_ = 0.0;

    double x0_ = 0.0;
    double sigma_ = 1.0;
    std::uint64_t alpha_fp_ = 0;
};

/// Z from the defining pair dZ/dx = a/sigma, dZ/dt = -(sigma/2) a_x - a^2/2
/// (the second integrated at x0). alpha must carry modal data (zero,
/// constant or trajectory kind).
ZField reconstruct_Z(const AlphaField& alpha, double x0, double sigma);

/// Mixed-partials integrability check for Z: max over the grid of
/// | d/dt (a/sigma) - d/dx ( -(sigma/2) a_x - a^2/2 ) |, with the time
/// derivative by centered differences over the stored steps and everything
/// in x taken exactly from the modes. Zero (up to discretization) exactly
/// when a solves the ill-posed-forward equation; O(1) otherwise.
/// time_samples caps the number of interior steps examined (0 = all).
double burgers_consistency_residual(const AlphaField& alpha, int time_samples = 0);

struct ResidualStats {
    double max = 0.0;
    double mean = 0.0;
    int count = 0;
};

/// Per-path endpoint residual r = | L_n + Z(X_T, T) - Z(X_0, 0) |.
/// Z must have been built from the same alpha and sigma (fingerprint check).
ResidualStats path_independence_residual(const PathEnsemble& ensemble, const ZField& Z,
                                         const SdeParams& params, const AlphaField& alpha);

struct PairedResiduals {
    ResidualStats coarse;
    ResidualStats fine;
    double mean_ratio = 0.0;  // coarse.mean / fine.mean
};

/// Residuals of a step-halving pair (same alpha, fine = 2x steps of coarse).
PairedResiduals path_independence_residual(const PathEnsemble& coarse,
                                           const SdeParams& coarse_params,
                                           const PathEnsemble& fine,
                                           const SdeParams& fine_params, const ZField& Z,
                                           const AlphaField& alpha);

struct EnsembleSummary {
    int paths = 0;
    int steps = 0;
    Scheme scheme = Scheme::log_euler;
    double sign_fraction = 0.0;
    double mean_RT = 0.0;
    double se_RT = 0.0;
    bool has_density = false;
    double density_mean = 0.0;
    bool has_residuals = false;
    double pi_residual_mean = 0.0;
    double pi_residual_max = 0.0;
    int excluded_paths = 0;
};

/// Aggregate report; density and residual fields are filled only when the
/// ensemble admits the X-transform (all retained paths positive) and, for
/// residuals, when Z is supplied.
EnsembleSummary summarize(const PathEnsemble& ensemble, const SdeParams& params,
                          const AlphaField& alpha, const ZField* Z);

}  // namespace meanrev::sde
