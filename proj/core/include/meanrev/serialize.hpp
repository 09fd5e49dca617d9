// File formats: coefficient CSV (t,k,re,im), grid CSV (x,alpha), oracle
// sidecar JSON, ensemble summary JSON, per-path dump CSV. Floats go out with
// 17 significant digits so a read-back reproduces the exact double.

#pragma once

#include <iosfwd>
#include <string>

#include "meanrev/oracle.hpp"
#include "meanrev/sde.hpp"
#include "meanrev/spectral.hpp"

namespace meanrev::io {

std::string format_double(double v);  // %.17g

void write_grid_csv(std::ostream& os, const spectral::GridFunction& grid);
spectral::GridFunction read_grid_csv(std::istream& is);

/// Full trajectory (one block of 2N+1 rows per step) or final state only.
void write_coeff_csv(std::ostream& os, const spectral::CoeffTrajectory& traj, bool final_only);

/// Read back a coefficient CSV. N and the time stamps come from the rows;
/// direction/sigma metadata are not part of the format and must be supplied
/// by the caller when assembling a trajectory.
std::vector<spectral::FourierState> read_coeff_csv(std::istream& is);

std::string oracle_sidecar_json(const oracle::OracleSolution& sol);

std::string summary_json(const sde::EnsembleSummary& summary);

void write_path_dump_csv(std::ostream& os, const sde::PathEnsemble& ensemble,
                         const sde::SdeParams& params, const sde::AlphaField& alpha);

}  // namespace meanrev::io
