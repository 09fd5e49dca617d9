#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "meanrev/oracle.hpp"
#include "meanrev/sde.hpp"
#include "meanrev/serialize.hpp"
#include "meanrev/spectral.hpp"

namespace meanrev::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// config file layer: flat `key = value`, '#' comments

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double r = 0.0;
    try {
        r = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = std::string::npos;
    }
    if (pos != v.size()) throw std::invalid_argument(key + ": not a number: '" + v + "'");
    return r;
}

int to_int(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != std::floor(d)) throw std::invalid_argument(key + ": not an integer: '" + v + "'");
    return static_cast<int>(d);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const std::uint64_t r = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": not an unsigned integer: '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument(key + ": not a boolean: '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& key_registry() {
    static const std::map<std::string, Setter> reg = {
        {"N", [](RunConfig& c, const std::string& v) { c.N = to_int("N", v); }},
        {"sigma", [](RunConfig& c, const std::string& v) { c.sigma = to_double("sigma", v); }},
        {"T", [](RunConfig& c, const std::string& v) { c.T = to_double("T", v); }},
        {"n", [](RunConfig& c, const std::string& v) { c.n = to_int("n", v); }},
        {"M", [](RunConfig& c, const std::string& v) { c.M = to_int("M", v); }},
        {"direction", [](RunConfig& c, const std::string& v) { c.direction = v; }},
        {"final-only", [](RunConfig& c, const std::string& v) { c.final_only = to_bool("final-only", v); }},
        {"preset", [](RunConfig& c, const std::string& v) { c.preset = v; }},
        {"amplitude", [](RunConfig& c, const std::string& v) { c.amplitude = to_double("amplitude", v); }},
        {"input", [](RunConfig& c, const std::string& v) { c.input = v; }},
        {"method", [](RunConfig& c, const std::string& v) { c.method = v; }},
        {"nu", [](RunConfig& c, const std::string& v) { c.nu = to_double("nu", v); }},
        {"t", [](RunConfig& c, const std::string& v) { c.t_eval = to_double("t", v); }},
        {"resolution", [](RunConfig& c, const std::string& v) { c.resolution = to_int("resolution", v); }},
        {"theta", [](RunConfig& c, const std::string& v) { c.theta = to_double("theta", v); }},
        {"r0", [](RunConfig& c, const std::string& v) { c.r0 = to_double("r0", v); }},
        {"steps", [](RunConfig& c, const std::string& v) { c.steps = to_int("steps", v); }},
        {"paths", [](RunConfig& c, const std::string& v) { c.paths = to_int("paths", v); }},
        {"seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64("seed", v); }},
        {"scheme", [](RunConfig& c, const std::string& v) { c.scheme = v; }},
        {"alpha", [](RunConfig& c, const std::string& v) { c.alpha = v; }},
        {"alpha-const", [](RunConfig& c, const std::string& v) { c.alpha_const = to_double("alpha-const", v); }},
        {"alpha-file", [](RunConfig& c, const std::string& v) { c.alpha_file = v; }},
        {"alpha-direction", [](RunConfig& c, const std::string& v) { c.alpha_direction = v; }},
        {"x0", [](RunConfig& c, const std::string& v) { c.x0 = to_double("x0", v); }},
        {"dump-paths", [](RunConfig& c, const std::string& v) { c.dump_paths = to_bool("dump-paths", v); }},
        {"threads", [](RunConfig& c, const std::string& v) { c.threads = to_int("threads", v); }},
        {"out", [](RunConfig& c, const std::string& v) { c.out_prefix = v; }},
    };
    return reg;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key_registry().find(key) == key_registry().end())
            throw std::invalid_argument("config: unknown key '" + key + "'");
        kv[key] = val;
    }
    return kv;
}

// ---------------------------------------------------------------------------
// shared builders

spectral::GridFunction make_preset(const std::string& preset, double amplitude, int M) {
    if (preset == "zero") return spectral::sample_grid(M, [](double) { return 0.0; });
    if (preset == "constant")
        return spectral::sample_grid(M, [amplitude](double) { return amplitude; });
    if (preset == "sine")
        return spectral::sample_grid(M, [amplitude](double x) { return amplitude * std::sin(x); });
    if (preset == "exp-cos")
        return spectral::sample_grid(
            M, [amplitude](double x) { return std::exp(amplitude * std::cos(x)); });
    throw std::invalid_argument("preset: expected zero, constant, sine or exp-cos, got '" +
                                preset + "'");
}

spectral::GridFunction load_initial(const RunConfig& cfg, int M) {
    if (!cfg.input.empty()) {
        std::ifstream is(cfg.input);
        if (!is) throw std::invalid_argument("input: cannot open '" + cfg.input + "'");
        return io::read_grid_csv(is);
    }
    return make_preset(cfg.preset, cfg.amplitude, M);
}

// coefficients of a(x,t) = sin(x) * (1 + t): a deliberately non-solution
// used as the negative control in verification
spectral::CoeffTrajectory linear_sine_trajectory(double sigma, double T, int n_steps) {
    auto cfg = spectral::make_config(2, sigma, T, n_steps, spectral::Direction::paper_forward);
    spectral::CoeffTrajectory traj;
    traj.config = cfg;
    for (int j = 0; j <= n_steps; ++j) {
        const double t = j * cfg.delta;
        spectral::FourierState s(cfg.N, t);
        s.set_coeff(1, spectral::Complex{0.0, -0.5 * (1.0 + t)});
        s.set_coeff(-1, spectral::Complex{0.0, 0.5 * (1.0 + t)});
        traj.states.push_back(std::move(s));
        traj.max_abs.push_back(0.5 * (1.0 + t));
    }
    return traj;
}

sde::AlphaField make_alpha(const RunConfig& cfg) {
    if (cfg.alpha == "zero") return sde::AlphaField::zero();
    if (cfg.alpha == "constant") return sde::AlphaField::constant(cfg.alpha_const);
    if (cfg.alpha == "file") {
        if (cfg.alpha_file.empty())
            throw std::invalid_argument("alpha-file: required when alpha = file");
        std::ifstream is(cfg.alpha_file);
        if (!is) throw std::invalid_argument("alpha-file: cannot open '" + cfg.alpha_file + "'");
        auto states = io::read_coeff_csv(is);
        spectral::CoeffTrajectory traj;
        const int N = states.front().order();
        const int n = static_cast<int>(states.size()) - 1;
        const double delta = n > 0 ? states[1].time() - states[0].time() : 1.0;
        traj.config.N = N;
        traj.config.sigma = cfg.sigma;
        traj.config.delta = delta;
        traj.config.n_steps = n;
        traj.config.T = n * delta;
        traj.config.M = std::max(4 * N, 2 * N + 1);
        traj.config.direction = spectral::direction_from_string(cfg.alpha_direction);
        for (auto& s : states) traj.max_abs.push_back(s.max_abs());
        traj.states = std::move(states);
        traj.config.validate();
        return sde::AlphaField::from_trajectory(std::move(traj));
    }
    throw std::invalid_argument("alpha: expected zero, constant or file, got '" + cfg.alpha + "'");
}

sde::SdeParams make_sde_params(const RunConfig& cfg) {
    sde::SdeParams p;
    p.theta = cfg.theta;
    p.sigma = cfg.sigma;
    p.r0 = cfg.r0;
    p.T = cfg.T;
    p.steps = cfg.steps;
    p.paths = cfg.paths;
    p.master_seed = cfg.seed;
    p.validate();
    return p;
}

// ---------------------------------------------------------------------------
// file emission

void atomic_write(const fs::path& path, const std::string& data) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        os << data;
        if (!os) throw std::runtime_error("io: failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

using KV = std::vector<std::pair<std::string, std::string>>;

std::string manifest_text(const RunConfig& cfg, const KV& pairs) {
    std::ostringstream os;
    os << "# meanrev-burgers " << to_string(cfg.command) << " manifest\n";
    os << "# generated: " << timestamp_utc() << "\n";
    os << "# re-run: meanrev-burgers " << to_string(cfg.command)
       << " --config <this file> [--out PREFIX]\n";
    for (const auto& p : cfg.provenance) os << "# " << p << "\n";
    for (const auto& [k, v] : pairs) os << k << " = " << v << "\n";
    return os.str();
}

std::string dstr(double v) { return io::format_double(v); }

KV manifest_pairs(const RunConfig& c) {
    KV kv;
    const auto add = [&kv](const std::string& k, const std::string& v) { kv.emplace_back(k, v); };
    switch (c.command) {
        case Command::init_data:
            add("preset", c.preset);
            add("amplitude", dstr(c.amplitude));
            add("M", std::to_string(c.M));
            break;
        case Command::solve:
            add("N", std::to_string(c.N));
            add("sigma", dstr(c.sigma));
            add("T", dstr(c.T));
            add("n", std::to_string(c.n));
            add("M", std::to_string(c.M));
            add("direction", c.direction);
            if (!c.input.empty()) {
                add("input", c.input);
            } else {
                add("preset", c.preset);
                add("amplitude", dstr(c.amplitude));
            }
            add("final-only", c.final_only ? "true" : "false");
            break;
        case Command::oracle:
            add("method", c.method);
            add("nu", dstr(c.nu));
            add("sigma", dstr(c.sigma));
            add("t", dstr(c.t_eval));
            add("T", dstr(c.T));
            add("resolution", std::to_string(c.resolution));
            add("M", std::to_string(c.M));
            if (!c.input.empty()) {
                add("input", c.input);
            } else {
                add("preset", c.preset);
                add("amplitude", dstr(c.amplitude));
            }
            break;
        case Command::simulate:
            add("scheme", c.scheme);
            add("theta", dstr(c.theta));
            add("sigma", dstr(c.sigma));
            add("r0", dstr(c.r0));
            add("T", dstr(c.T));
            add("steps", std::to_string(c.steps));
            add("paths", std::to_string(c.paths));
            add("seed", std::to_string(c.seed));
            add("alpha", c.alpha);
            add("alpha-const", dstr(c.alpha_const));
            if (!c.alpha_file.empty()) {
                add("alpha-file", c.alpha_file);
                add("alpha-direction", c.alpha_direction);
            }
            add("x0", dstr(c.x0));
            add("dump-paths", c.dump_paths ? "true" : "false");
            add("threads", std::to_string(c.threads));
            break;
        case Command::verify:
            add("N", std::to_string(c.N));
            add("sigma", dstr(c.sigma));
            add("theta", dstr(c.theta));
            add("r0", dstr(c.r0));
            add("T", dstr(c.T));
            add("n", std::to_string(c.n));
            add("steps", std::to_string(c.steps));
            add("paths", std::to_string(c.paths));
            add("seed", std::to_string(c.seed));
            add("preset", c.preset);
            add("amplitude", dstr(c.amplitude));
            add("alpha-const", dstr(c.alpha_const));
            add("x0", dstr(c.x0));
            add("threads", std::to_string(c.threads));
            break;
    }
    kv.emplace_back("out", c.out_prefix);
    return kv;
}

void write_manifest(const RunConfig& cfg) {
    atomic_write(cfg.out_prefix + "_manifest.txt", manifest_text(cfg, manifest_pairs(cfg)));
}

// ---------------------------------------------------------------------------
// per-command runners

int run_init_data(const RunConfig& cfg) {
    const int M = cfg.M > 0 ? cfg.M : 64;
    const auto grid = make_preset(cfg.preset, cfg.amplitude, M);
    write_manifest(cfg);
    std::ostringstream os;
    io::write_grid_csv(os, grid);
    atomic_write(cfg.out_prefix + "_grid.csv", os.str());
    return kExitOk;
}

int run_solve(const RunConfig& cfg) {
    auto scfg = spectral::make_config(cfg.N, cfg.sigma, cfg.T, cfg.n,
                                      spectral::direction_from_string(cfg.direction), cfg.M);
    const auto initial = load_initial(cfg, scfg.M);
    if (initial.size() != scfg.M) scfg.M = initial.size();  // file input sets the grid
    scfg.validate();

    write_manifest(cfg);
    const auto coeffs0 = spectral::init_coeffs(initial, scfg);
    const auto traj = spectral::evolve(coeffs0, scfg);  // BlowUpError maps to exit 3

    std::ostringstream cs;
    io::write_coeff_csv(cs, traj, cfg.final_only);
    atomic_write(cfg.out_prefix + "_coeffs.csv", cs.str());

    std::ostringstream gs;
    io::write_grid_csv(gs, spectral::synthesize(traj.back(), scfg.M).grid);
    atomic_write(cfg.out_prefix + "_grid.csv", gs.str());
    return kExitOk;
}

int run_oracle(const RunConfig& cfg) {
    oracle::ViscousParams vp;
    vp.nu = cfg.nu > 0.0 ? cfg.nu : 0.5 * cfg.sigma * cfg.sigma;
    vp.T = cfg.T;
    vp.validate();
    const double t = cfg.t_eval >= 0.0 ? cfg.t_eval : cfg.T;
    const int M = cfg.M > 0 ? cfg.M : 128;
    const auto initial = load_initial(cfg, M);

    write_manifest(cfg);
    oracle::OracleSolution sol;
    if (cfg.method == "hopf_cole") {
        sol = oracle::hopf_cole_solve(initial, t, vp);
    } else if (cfg.method == "reference_fd") {
        sol = oracle::reference_fd_solve(initial, t, vp, cfg.resolution);
        std::cerr << "reference_fd: dt = " << sol.dt_used << "\n";
    } else {
        throw std::invalid_argument("method: expected hopf_cole or reference_fd, got '" +
                                    cfg.method + "'");
    }
    std::ostringstream gs;
    io::write_grid_csv(gs, sol.grid);
    atomic_write(cfg.out_prefix + "_oracle.csv", gs.str());
    atomic_write(cfg.out_prefix + "_oracle.json", io::oracle_sidecar_json(sol) + "\n");
    return kExitOk;
}

int run_simulate(const RunConfig& cfg) {
    const auto params = make_sde_params(cfg);
    const auto alpha = make_alpha(cfg);
    const auto scheme = sde::scheme_from_string(cfg.scheme);

    write_manifest(cfg);
    sde::PathEnsemble ens;
    switch (scheme) {
        case sde::Scheme::euler: ens = sde::simulate_em(params, alpha, cfg.threads); break;
        case sde::Scheme::log_euler:
            ens = sde::simulate_log_euler(params, alpha, cfg.threads);
            break;
        case sde::Scheme::exact_q: ens = sde::simulate_exact_q(params, cfg.threads); break;
    }

    // Z is defined for modal alpha; residuals then ride along in the summary
    std::unique_ptr<sde::ZField> Z;
    if (alpha.kind() != sde::AlphaField::Kind::custom)
        Z = std::make_unique<sde::ZField>(sde::reconstruct_Z(alpha, cfg.x0, params.sigma));
    const auto summary = sde::summarize(ens, params, alpha, Z.get());
    atomic_write(cfg.out_prefix + "_summary.json", io::summary_json(summary) + "\n");

    if (cfg.dump_paths) {
        std::ostringstream ps;
        io::write_path_dump_csv(ps, ens, params, alpha);
        atomic_write(cfg.out_prefix + "_paths.csv", ps.str());
    }
    return kExitOk;
}

struct Check {
    std::string name;
    double value;
    std::string op;  // "<=", ">=", "=="
    double threshold;
    bool pass;
};

Check make_check(const std::string& name, double value, const std::string& op, double threshold) {
    bool ok = false;
    if (op == "<=") ok = value <= threshold;
    if (op == ">=") ok = value >= threshold;
    if (op == "==") ok = value == threshold;
    return Check{name, value, op, threshold, ok};
}

int run_verify(const RunConfig& cfg) {
    write_manifest(cfg);

    // alpha from the dissipative orientation (presented in paper-time order
    // by AlphaField), plus a halved-step solve for the truncation estimate
    const auto dir = spectral::Direction::well_posed_reverse;
    auto scfg = spectral::make_config(cfg.N, cfg.sigma, cfg.T, cfg.n, dir, cfg.M);
    const auto initial = load_initial(cfg, scfg.M);
    if (initial.size() != scfg.M) scfg.M = initial.size();  // file input sets the grid
    scfg.validate();
    const auto scfg2 = spectral::make_config(cfg.N, cfg.sigma, cfg.T, 2 * cfg.n, dir, scfg.M);
    const auto traj = spectral::evolve(spectral::init_coeffs(initial, scfg), scfg);
    const auto traj2 = spectral::evolve(spectral::init_coeffs(initial, scfg2), scfg2);

    double gap = 0.0;  // Richardson gap between the n and 2n solves
    for (int j = 0; j <= cfg.n; ++j) {
        double d = 0.0;
        for (int k = -cfg.N; k <= cfg.N; ++k)
            d += std::abs(traj.states[static_cast<std::size_t>(j)].coeff(k) -
                          traj2.states[static_cast<std::size_t>(2 * j)].coeff(k));
        gap = std::max(gap, d);
    }
    const double trunc_bound = 2.0 * gap / cfg.T;

    const auto alpha = sde::AlphaField::from_trajectory(traj);
    const auto nc_traj = linear_sine_trajectory(cfg.sigma, cfg.T, 2 * cfg.steps);
    const auto alpha_nc = sde::AlphaField::from_trajectory(nc_traj);
    const auto alpha_c = sde::AlphaField::constant(cfg.alpha_const);

    const double z_res = sde::burgers_consistency_residual(alpha, 64);
    const double z_res_nc = sde::burgers_consistency_residual(alpha_nc, 64);

    const auto Z = sde::reconstruct_Z(alpha, cfg.x0, cfg.sigma);
    const auto Z_nc = sde::reconstruct_Z(alpha_nc, cfg.x0, cfg.sigma);
    const auto Z_c = sde::reconstruct_Z(alpha_c, cfg.x0, cfg.sigma);

    sde::SdeParams fine = make_sde_params(cfg);
    fine.steps = 2 * cfg.steps;
    const auto ens_fine = sde::simulate_log_euler(fine, alpha, cfg.threads);
    const auto ens_coarse = sde::coarsen(ens_fine, fine, alpha, 2);
    sde::SdeParams coarse = fine;
    coarse.steps = cfg.steps;
    const auto paired = sde::path_independence_residual(ens_coarse, coarse, ens_fine, fine, Z, alpha);

    const auto ens_nc = sde::simulate_log_euler(fine, alpha_nc, cfg.threads);
    const auto st_nc = sde::path_independence_residual(ens_nc, Z_nc, fine, alpha_nc);

    const auto ens_c = sde::simulate_log_euler(fine, alpha_c, cfg.threads);
    const auto st_c = sde::path_independence_residual(ens_c, Z_c, fine, alpha_c);

    const auto ens_q = sde::simulate_exact_q(fine, cfg.threads);

    // density martingale: mean exp(L_n) with its standard error
    const auto density_dev = [&](const sde::PathEnsemble& e, const sde::AlphaField& a) {
        const auto L = sde::girsanov_log_density(e, fine, a);
        double sum = 0.0, sumsq = 0.0;
        int n = 0;
        for (int i = 0; i < e.paths(); ++i) {
            if (e.excluded[static_cast<std::size_t>(i)]) continue;
            const double w = std::exp(L[static_cast<std::size_t>(i)].back());
            sum += w;
            sumsq += w * w;
            ++n;
        }
        const double mean = sum / n;
        const double var = std::max(0.0, (sumsq - sum * sum / n) / std::max(1, n - 1));
        const double se = std::sqrt(var / n);
        return std::pair<double, double>{std::abs(mean - 1.0), 3.0 * se};
    };
    const auto [dev_c, lim_c] = density_dev(ens_c, alpha_c);
    const auto [dev_s, lim_s] = density_dev(ens_fine, alpha);

    std::vector<Check> checks;
    checks.push_back(make_check("sign_fraction_log_euler", sde::sign_fraction(ens_fine), "==", 1.0));
    checks.push_back(make_check("sign_fraction_exact_q", sde::sign_fraction(ens_q), "==", 1.0));
    checks.push_back(make_check("density_martingale_constant_dev", dev_c, "<=", lim_c));
    checks.push_back(make_check("density_martingale_solver_dev", dev_s, "<=", lim_s));
    checks.push_back(make_check("pi_residual_max_constant", st_c.max, "<=", 1e-12));
    checks.push_back(make_check("pi_halving_ratio_burgers", paired.mean_ratio, ">=", 1.5));
    checks.push_back(make_check("pi_negative_control_over_burgers",
                                st_nc.mean / std::max(paired.fine.mean, 1e-300), ">=", 10.0));
    checks.push_back(make_check("z_residual_solver", z_res, "<=", 10.0 * trunc_bound));
    checks.push_back(make_check("z_residual_negative_control", z_res_nc, ">=", 100.0 * trunc_bound));

    bool all = true;
    ordered_json jchecks = ordered_json::array();
    for (const auto& c : checks) {
        all = all && c.pass;
        ordered_json jc;
        jc["name"] = c.name;
        jc["value"] = c.value;
        jc["op"] = c.op;
        jc["threshold"] = c.threshold;
        jc["pass"] = c.pass;
        jchecks.push_back(jc);
    }
    ordered_json verdict;
    verdict["schema"] = 1;
    verdict["pass"] = all;
    verdict["checks"] = jchecks;
    atomic_write(cfg.out_prefix + "_verdict.json", verdict.dump(2) + "\n");

    for (const auto& c : checks)
        std::cerr << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " (" << c.value << " " << c.op
                  << " " << c.threshold << ")\n";
    return all ? kExitOk : kExitVerifyFail;
}

}  // namespace

std::string to_string(Command c) {
    switch (c) {
        case Command::solve: return "solve";
        case Command::oracle: return "oracle";
        case Command::simulate: return "simulate";
        case Command::verify: return "verify";
        case Command::init_data: return "init-data";
    }
    return "?";
}

RunConfig parse_config(int argc, const char* const* argv) {
    RunConfig cfg;

    // subcommand first (fixes per-command defaults before file/flags apply)
    std::string cmd_name = argc > 1 ? argv[1] : "";
    if (cmd_name == "solve") cfg.command = Command::solve;
    else if (cmd_name == "oracle") cfg.command = Command::oracle;
    else if (cmd_name == "simulate") cfg.command = Command::simulate;
    else if (cmd_name == "verify") cfg.command = Command::verify;
    else if (cmd_name == "init-data") cfg.command = Command::init_data;

    if (cfg.command == Command::verify) {
        cfg.sigma = 0.5;
        cfg.T = 0.5;
        cfg.n = 4096;
        cfg.steps = 256;
        cfg.paths = 1000;
        cfg.amplitude = 0.5;
        cfg.seed = 1;
    }
    if (cfg.command == Command::oracle) cfg.T = 0.5;

    // config file layer (lower precedence than flags)
    std::map<std::string, std::string> file_kv;
    for (int i = 2; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) cfg.config_file = argv[i + 1];
        else if (a.rfind("--config=", 0) == 0) cfg.config_file = a.substr(9);
    }
    if (!cfg.config_file.empty()) {
        file_kv = read_config_file(cfg.config_file);
        for (const auto& [k, v] : file_kv) key_registry().at(k)(cfg, v);
    }

    CLI::App app{"Galerkin mode solver for a time-reverse viscous Burgers drift correction,"
                 " with Hopf-Cole/finite-difference oracles and a Monte Carlo verification layer"};
    app.require_subcommand(1);
    std::string config_dummy;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_dummy, "flat key = value file (# comments)");
        sub->add_option("--out", cfg.out_prefix, "output prefix for all artifacts");
    };
    const auto add_initial = [&](CLI::App* sub) {
        sub->add_option("--preset", cfg.preset, "zero | constant | sine | exp-cos");
        sub->add_option("--amplitude", cfg.amplitude, "preset amplitude");
        sub->add_option("--input", cfg.input, "grid CSV (overrides preset)");
    };

    auto* solve = app.add_subcommand("solve", "run the mode recurrence");
    solve->add_option("--N", cfg.N, "truncation order");
    solve->add_option("--sigma", cfg.sigma, "volatility");
    solve->add_option("--T", cfg.T, "horizon");
    solve->add_option("--n", cfg.n, "number of steps");
    solve->add_option("--M", cfg.M, "grid size (0 = auto)");
    solve->add_option("--direction", cfg.direction, "paper_forward | well_posed_reverse");
    solve->add_flag("--final-only", cfg.final_only, "emit only the final state");
    add_initial(solve);
    add_common(solve);

    auto* orac = app.add_subcommand("oracle", "closed-form / reference solution");
    orac->add_option("--method", cfg.method, "hopf_cole | reference_fd");
    orac->add_option("--nu", cfg.nu, "viscosity (0 = sigma^2/2)");
    orac->add_option("--sigma", cfg.sigma, "volatility (sets nu when nu = 0)");
    orac->add_option("--t", cfg.t_eval, "evaluation time (-1 = T)");
    orac->add_option("--T", cfg.T, "horizon");
    orac->add_option("--resolution", cfg.resolution, "FD grid size");
    orac->add_option("--M", cfg.M, "request grid size (0 = 128)");
    add_initial(orac);
    add_common(orac);

    auto* sim = app.add_subcommand("simulate", "Monte Carlo ensemble");
    sim->add_option("--scheme", cfg.scheme, "euler | log_euler | exact_q");
    sim->add_option("--theta", cfg.theta, "drift constant");
    sim->add_option("--sigma", cfg.sigma, "volatility");
    sim->add_option("--r0", cfg.r0, "initial value");
    sim->add_option("--T", cfg.T, "horizon");
    sim->add_option("--steps", cfg.steps, "time steps per path");
    sim->add_option("--paths", cfg.paths, "ensemble size");
    sim->add_option("--seed", cfg.seed, "master seed");
    sim->add_option("--alpha", cfg.alpha, "zero | constant | file");
    sim->add_option("--alpha-const", cfg.alpha_const, "constant field value");
    sim->add_option("--alpha-file", cfg.alpha_file, "coefficient CSV from solve");
    sim->add_option("--alpha-direction", cfg.alpha_direction,
                    "orientation the coefficient file was solved in");
    sim->add_option("--x0", cfg.x0, "Z anchor");
    sim->add_flag("--dump-paths", cfg.dump_paths, "also write per-path CSV");
    sim->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
    add_common(sim);

    auto* ver = app.add_subcommand("verify", "solve + reconstruct Z + simulate + residuals");
    ver->add_option("--N", cfg.N, "truncation order");
    ver->add_option("--sigma", cfg.sigma, "volatility");
    ver->add_option("--theta", cfg.theta, "drift constant");
    ver->add_option("--r0", cfg.r0, "initial value");
    ver->add_option("--T", cfg.T, "horizon");
    ver->add_option("--n", cfg.n, "solver steps");
    ver->add_option("--steps", cfg.steps, "coarse path steps (fine = 2x)");
    ver->add_option("--paths", cfg.paths, "ensemble size");
    ver->add_option("--seed", cfg.seed, "master seed");
    ver->add_option("--alpha-const", cfg.alpha_const, "constant-field case value");
    ver->add_option("--x0", cfg.x0, "Z anchor");
    ver->add_option("--threads", cfg.threads, "worker threads (0 = auto)");
    add_initial(ver);
    add_common(ver);

    auto* init = app.add_subcommand("init-data", "write a preset grid");
    init->add_option("--M", cfg.M, "grid size (0 = 64)");
    add_initial(init);
    add_common(init);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        const auto subs = app.get_subcommands();
        std::cout << (subs.empty() ? app.help() : subs.front()->help());
        throw;
    }

    // provenance: what the file set, what the flags overrode
    CLI::App* sub = app.get_subcommands().front();
    for (const auto& [k, v] : file_kv) {
        const auto* opt = sub->get_option_no_throw("--" + k);
        if (opt != nullptr && opt->count() > 0)
            cfg.provenance.push_back("override " + k + ": config-file value " + v +
                                     " superseded by command line");
        else
            cfg.provenance.push_back(k + ": from config-file " + cfg.config_file);
    }
    return cfg;
}

int run(const RunConfig& cfg) {
    switch (cfg.command) {
        case Command::init_data: return run_init_data(cfg);
        case Command::solve: return run_solve(cfg);
        case Command::oracle: return run_oracle(cfg);
        case Command::simulate: return run_simulate(cfg);
        case Command::verify: return run_verify(cfg);
    }
    return kExitConfig;
}

int main_entry(int argc, const char* const* argv) {
    try {
        const RunConfig cfg = parse_config(argc, argv);
        return run(cfg);
    } catch (const CLI::CallForHelp&) {
        return kExitOk;  // help text already printed
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const spectral::BlowUpError& e) {
        std::cerr << "numerical blow-up: " << e.what() << "\n";
        return kExitBlowUp;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace meanrev::cli
