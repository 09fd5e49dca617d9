// Independent ground truth for the Burgers dynamics in the standard
// dissipative orientation
//
//     u_s + u u_x = nu u_xx,   nu = sigma^2 / 2,
//
// reached from the mode solver's field a via v(x, s) = -sigma * a(x, T - s).
// Two unrelated routes are provided so that agreement is evidence rather
// than tautology: the closed-form Hopf-Cole construction (heat kernel in
// mode space) and a second-order finite-difference reference solver.

#pragma once

#include <string>

#include "meanrev/spectral.hpp"

namespace meanrev::oracle {

struct ViscousParams {
    double nu = 0.5;  // viscosity, > 0
    double T = 0.0;   // default horizon (informational)

    void validate() const;
};

enum class Method { hopf_cole, reference_fd };

std::string to_string(Method m);

struct OracleSolution {
    spectral::GridFunction grid;
    Method method = Method::hopf_cole;
    int resolution = 0;      // internal grid actually used
    double est_error = 0.0;  // self-convergence estimate, >= 0
    double dt_used = 0.0;    // time step taken (reference_fd only)
};

/// Relabel a solver trajectory as a standard-orientation field
/// v(x, s) = -sigma * a(x, T - s), s in [0, T], with paper-time read off the
/// trajectory's direction tag: a paper_forward trajectory stores paper time
/// in storage order (the map reverses states); a well_posed_reverse
/// trajectory stores the same solution already reversed (the map keeps
/// storage order). Throws when the trajectory does not cover [0, T].
spectral::CoeffTrajectory time_reversal_map(const spectral::CoeffTrajectory& traj, double T);

/// Closed-form periodic solution of u_s + u u_x = nu u_xx at time t via the
/// substitution u = -2 nu phi_x / phi, with phi advanced exactly through the
/// heat equation in mode space. Requires zero-mean initial data (otherwise
/// phi is not periodic; shift to a moving frame first). phi is carried on a
/// grid at least 4x finer than the request.
OracleSolution hopf_cole_solve(const spectral::GridFunction& initial, double t,
                               const ViscousParams& params);

/// Second-order central-difference semi-discretization in conservation form,
/// advanced by an explicit two-stage (Heun) scheme with the step chosen from
/// the diffusion CFL bound dt <= h^2/(4 nu). Refuses requests that would
/// need an absurd step count rather than silently coarsening.
OracleSolution reference_fd_solve(const spectral::GridFunction& initial, double t,
                                  const ViscousParams& params, int resolution);

}  // namespace meanrev::oracle
