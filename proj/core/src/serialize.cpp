#include "meanrev/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace meanrev::io {

namespace {

using nlohmann::ordered_json;

double parse_double(const std::string& field, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("parse error: bad " + what + " value '" + field + "'");
    }
    if (pos != field.size())
        throw std::runtime_error("parse error: trailing characters in " + what + " value '" + field + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_grid_csv(std::ostream& os, const spectral::GridFunction& grid) {
    os << "x,alpha\n";
    const int M = grid.size();
    for (int m = 0; m < M; ++m)
        os << format_double(spectral::grid_node(m, M)) << ','
           << format_double(grid.values[static_cast<std::size_t>(m)]) << '\n';
}

spectral::GridFunction read_grid_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || split_csv(line) != std::vector<std::string>{"x", "alpha"})
        throw std::runtime_error("grid csv: expected header 'x,alpha'");
    spectral::GridFunction g;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 2) throw std::runtime_error("grid csv: expected 2 fields per row");
        g.values.push_back(parse_double(fields[1], "alpha"));
    }
    if (g.values.empty()) throw std::runtime_error("grid csv: no data rows");
    return g;
}

void write_coeff_csv(std::ostream& os, const spectral::CoeffTrajectory& traj, bool final_only) {
    os << "t,k,re,im\n";
    const auto emit = [&os](const spectral::FourierState& s) {
        for (int k = -s.order(); k <= s.order(); ++k) {
            const auto c = s.coeff(k);
            os << format_double(s.time()) << ',' << k << ',' << format_double(c.real()) << ','
               << format_double(c.imag()) << '\n';
        }
    };
    if (final_only) {
        emit(traj.states.back());
    } else {
        for (const auto& s : traj.states) emit(s);
    }
}

std::vector<spectral::FourierState> read_coeff_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) ||
        split_csv(line) != std::vector<std::string>{"t", "k", "re", "im"})
        throw std::runtime_error("coeff csv: expected header 't,k,re,im'");

    std::vector<spectral::FourierState> states;
    int N = -1;  // inferred from the first row (k = -N)
    std::vector<spectral::Complex> block;
    double block_t = 0.0;
    int expected_k = 0;

    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 4) throw std::runtime_error("coeff csv: expected 4 fields per row");
        const double t = parse_double(fields[0], "t");
        const int k = static_cast<int>(parse_double(fields[1], "k"));
        if (N < 0) {
            if (k >= 0) throw std::runtime_error("coeff csv: first row must carry k = -N < 0");
            N = -k;
        }
        if (block.empty()) {
            block_t = t;
            expected_k = -N;
        }
        if (k != expected_k)
            throw std::runtime_error("coeff csv: modes must run k = -N..N per step (bad k=" +
                                     fields[1] + ")");
        block.emplace_back(parse_double(fields[2], "re"), parse_double(fields[3], "im"));
        ++expected_k;
        if (static_cast<int>(block.size()) == 2 * N + 1) {
            states.push_back(spectral::FourierState::from_coeffs(std::move(block), block_t));
            block = {};
        }
    }
    if (!block.empty()) throw std::runtime_error("coeff csv: incomplete final mode block");
    if (states.empty()) throw std::runtime_error("coeff csv: no data rows");
    return states;
}

std::string oracle_sidecar_json(const oracle::OracleSolution& sol) {
    ordered_json j;
    j["method"] = oracle::to_string(sol.method);
    j["resolution"] = sol.resolution;
    j["est_error"] = sol.est_error;
    return j.dump();
}

std::string summary_json(const sde::EnsembleSummary& s) {
    ordered_json j;
    j["paths"] = s.paths;
    j["steps"] = s.steps;
    j["scheme"] = sde::to_string(s.scheme);
    j["sign_fraction"] = s.sign_fraction;
    j["mean_RT"] = s.mean_RT;
    j["se_RT"] = s.se_RT;
    if (s.has_density)
        j["density_mean"] = s.density_mean;
    else
        j["density_mean"] = nullptr;
    if (s.has_residuals) {
        j["pi_residual_mean"] = s.pi_residual_mean;
        j["pi_residual_max"] = s.pi_residual_max;
    } else {
        j["pi_residual_mean"] = nullptr;
        j["pi_residual_max"] = nullptr;
    }
    j["excluded_paths"] = s.excluded_paths;
    return j.dump();
}

void write_path_dump_csv(std::ostream& os, const sde::PathEnsemble& ensemble,
                         const sde::SdeParams& params, const sde::AlphaField& alpha) {
    const auto L = sde::girsanov_log_density(ensemble, params, alpha);

    // X rows: NaN where the transform is undefined (excluded or R <= 0)
    const double drift_shift = params.theta - 0.5 * params.sigma * params.sigma;
    os << "path,step,t,R,X,dB,logdens\n";
    for (int i = 0; i < ensemble.paths(); ++i) {
        const auto& R = ensemble.R[static_cast<std::size_t>(i)];
        const auto& inc = ensemble.increments[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < R.size(); ++j) {
            const double t = static_cast<double>(j) * ensemble.dt;
            const double x = R[j] > 0.0 ? std::log(R[j]) - drift_shift * t
                                        : std::numeric_limits<double>::quiet_NaN();
            const double db = j == 0 ? 0.0 : inc[j - 1];  // increment leading into this step
            os << i << ',' << j << ',' << format_double(t) << ',' << format_double(R[j]) << ','
               << format_double(x) << ',' << format_double(db) << ','
               << format_double(L[static_cast<std::size_t>(i)][j]) << '\n';
        }
    }
}

}  // namespace meanrev::io
