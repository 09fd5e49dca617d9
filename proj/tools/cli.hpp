// meanrev-burgers command line: configuration resolution (defaults <- config
// file <- flags), deterministic orchestration of the solve / oracle /
// simulate / verify pipelines, and all file emission (complete-then-rename).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace meanrev::cli {

enum class Command { solve, oracle, simulate, verify, init_data };

std::string to_string(Command c);

/// Exit codes: 0 ok, 2 configuration error, 3 numerical blow-up,
/// 4 verification failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBlowUp = 3;
inline constexpr int kExitVerifyFail = 4;

struct RunConfig {
    Command command = Command::solve;

    // spectral solve
    int N = 16;
    double sigma = 1.0;
    double T = 1.0;
    int n = 1000;
    int M = 0;  // 0 = auto (max(4N, 2N+1))
    std::string direction = "well_posed_reverse";
    bool final_only = false;

    // initial data
    std::string preset = "sine";  // zero | constant | sine | exp-cos
    double amplitude = 1.0;
    std::string input;  // grid CSV path; overrides preset when set

    // oracle
    std::string method = "hopf_cole";  // hopf_cole | reference_fd
    double nu = 0.0;                   // 0 = derive sigma^2/2
    double t_eval = -1.0;              // -1 = T
    int resolution = 256;

    // sde
    double theta = 0.05;
    double r0 = 1.0;
    int steps = 1000;
    int paths = 10000;
    std::uint64_t seed = 0;
    std::string scheme = "log_euler";
    std::string alpha = "zero";  // zero | constant | file
    double alpha_const = 0.3;
    std::string alpha_file;
    std::string alpha_direction = "well_posed_reverse";
    double x0 = 0.0;
    bool dump_paths = false;
    int threads = 0;  // 0 = auto

    // io
    std::string out_prefix = "out";
    std::string config_file;

    // provenance lines for the manifest (filled by parse_config)
    std::vector<std::string> provenance;
};

/// Resolve a RunConfig from argv (and the optional config file named by
/// --config). Throws CLI11 errors / std::invalid_argument naming the
/// offending key; never touches the filesystem except to read the config
/// file and check --input existence.
RunConfig parse_config(int argc, const char* const* argv);

/// Execute a resolved config; returns the process exit code and writes all
/// artifacts under the output prefix.
int run(const RunConfig& config);

/// parse + run with error-to-exit-code mapping; the CLI main.
int main_entry(int argc, const char* const* argv);

}  // namespace meanrev::cli
