#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "cli.hpp"
#include "json.hpp"
#include "meanrev/serialize.hpp"

using namespace meanrev;
namespace fs = std::filesystem;

namespace {

int call(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"meanrev-burgers"};
    argv.insert(argv.end(), args.begin(), args.end());
    return cli::main_entry(static_cast<int>(argv.size()), argv.data());
}

cli::RunConfig parse(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"meanrev-burgers"};
    argv.insert(argv.end(), args.begin(), args.end());
    return cli::parse_config(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "meanrev_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string strip_timestamp(const std::string& manifest) {
    std::istringstream is(manifest);
    std::ostringstream os;
    std::string line;
    while (std::getline(is, line))
        if (line.rfind("# generated:", 0) != 0) os << line << '\n';
    return os.str();
}

}  // namespace

TEST_CASE("parse_config: documented solve invocation resolves") {
    const auto cfg = parse({"solve", "--N", "16", "--sigma", "0.2", "--T", "1", "--n", "1000",
                            "--direction", "well_posed_reverse", "--preset", "sine"});
    CHECK(cfg.command == cli::Command::solve);
    CHECK(cfg.N == 16);
    CHECK(cfg.sigma == 0.2);
    CHECK(cfg.T == 1.0);
    CHECK(cfg.n == 1000);
    CHECK(cfg.direction == "well_posed_reverse");
    CHECK(cfg.preset == "sine");
}

TEST_CASE("out-of-range value is rejected naming the key, exit 2") {
    const auto dir = scratch("range");
    CHECK(call({"solve", "--N", "0", "--out", (dir / "x").c_str()}) == cli::kExitConfig);
    CHECK(call({"simulate", "--paths", "0", "--out", (dir / "y").c_str()}) == cli::kExitConfig);
    CHECK(call({"oracle", "--method", "nonsense", "--out", (dir / "z").c_str()}) ==
          cli::kExitConfig);
}

TEST_CASE("config file values are overridden by flags and recorded") {
    const auto dir = scratch("precedence");
    const auto cfgfile = dir / "run.conf";
    std::ofstream(cfgfile) << "# sample\nsigma = 0.2\nN = 8\n";
    const auto cfg = parse({"solve", "--config", cfgfile.c_str(), "--sigma", "0.3"});
    CHECK(cfg.sigma == 0.3);  // flag wins
    CHECK(cfg.N == 8);        // file applies
    bool recorded = false;
    for (const auto& line : cfg.provenance)
        if (line.find("override sigma") != std::string::npos) recorded = true;
    CHECK(recorded);
}

TEST_CASE("unknown config-file key is named, exit 2") {
    const auto dir = scratch("unknown");
    const auto cfgfile = dir / "run.conf";
    std::ofstream(cfgfile) << "sigmo = 0.2\n";
    CHECK(call({"solve", "--config", cfgfile.c_str()}) == cli::kExitConfig);
}

TEST_CASE("init-data emits a readable preset grid") {
    const auto dir = scratch("init");
    const auto prefix = (dir / "d").string();
    REQUIRE(call({"init-data", "--preset", "exp-cos", "--amplitude", "1", "--out",
                  prefix.c_str()}) == 0);
    std::ifstream is(prefix + "_grid.csv");
    const auto g = io::read_grid_csv(is);
    CHECK(g.size() == 64);
    CHECK(g.values[0] == doctest::Approx(std::exp(std::cos(-3.14159265358979))).epsilon(1e-9));
}

TEST_CASE("solve writes coefficients consumable by simulate --alpha file") {
    const auto dir = scratch("pipeline");
    const auto solve_prefix = (dir / "s").string();
    REQUIRE(call({"solve", "--N", "8", "--sigma", "0.5", "--T", "0.5", "--n", "512",
                  "--direction", "well_posed_reverse", "--preset", "sine", "--amplitude", "0.5",
                  "--out", solve_prefix.c_str()}) == 0);
    const auto coeffs = solve_prefix + "_coeffs.csv";
    REQUIRE(fs::exists(coeffs));

    const auto sim_prefix = (dir / "m").string();
    REQUIRE(call({"simulate", "--scheme", "log_euler", "--sigma", "0.5", "--T", "0.5", "--steps",
                  "128", "--paths", "500", "--seed", "7", "--alpha", "file", "--alpha-file",
                  coeffs.c_str(), "--alpha-direction", "well_posed_reverse", "--out",
                  sim_prefix.c_str()}) == 0);
    const auto j = nlohmann::json::parse(slurp(sim_prefix + "_summary.json"));
    CHECK(j["sign_fraction"] == 1.0);
    CHECK(j["paths"] == 500);
    CHECK(j["excluded_paths"] == 0);
    CHECK(j["pi_residual_max"].get<double>() < 1.0);
}

TEST_CASE("ill-posed orientation on a long horizon exits 3 with a report") {
    const auto dir = scratch("blowup");
    CHECK(call({"solve", "--N", "16", "--direction", "paper_forward", "--preset", "sine", "--T",
                "1", "--n", "1000", "--out", (dir / "b").c_str()}) == cli::kExitBlowUp);
}

TEST_CASE("same config + seed reproduce byte-identical data files") {
    const auto dir = scratch("determinism");
    const auto a = (dir / "a").string();
    const auto rerun = [&] {
        REQUIRE(call({"simulate", "--scheme", "log_euler", "--paths", "300", "--steps", "100",
                      "--seed", "11", "--alpha", "constant", "--alpha-const", "0.3",
                      "--dump-paths", "--out", a.c_str()}) == 0);
    };
    rerun();
    const auto summary1 = slurp(a + "_summary.json");
    const auto paths1 = slurp(a + "_paths.csv");
    const auto manifest1 = slurp(a + "_manifest.txt");
    rerun();
    CHECK(slurp(a + "_summary.json") == summary1);
    CHECK(slurp(a + "_paths.csv") == paths1);
    CHECK(strip_timestamp(slurp(a + "_manifest.txt")) == strip_timestamp(manifest1));
}

TEST_CASE("manifest alone reproduces the run") {
    const auto dir = scratch("manifest");
    const auto a = (dir / "a").string(), b = (dir / "b").string();
    REQUIRE(call({"solve", "--N", "8", "--sigma", "0.7", "--T", "0.25", "--n", "128", "--preset",
                  "sine", "--amplitude", "0.8", "--out", a.c_str()}) == 0);
    REQUIRE(call({"solve", "--config", (a + "_manifest.txt").c_str(), "--out", b.c_str()}) == 0);
    CHECK(slurp(a + "_coeffs.csv") == slurp(b + "_coeffs.csv"));
    CHECK(slurp(a + "_grid.csv") == slurp(b + "_grid.csv"));
}

TEST_CASE("verify emits a versioned verdict with the documented checks") {
    const auto dir = scratch("verify");
    const auto prefix = (dir / "v").string();
    const int rc = call({"verify", "--paths", "400", "--steps", "128", "--n", "2048", "--seed",
                         "3", "--out", prefix.c_str()});
    CHECK((rc == cli::kExitOk || rc == cli::kExitVerifyFail));
    const auto j = nlohmann::json::parse(slurp(prefix + "_verdict.json"));
    CHECK(j["schema"] == 1);
    REQUIRE(j["checks"].is_array());
    CHECK(j["checks"].size() == 9);
    // the one check that may legitimately sit at its sqrt(2) asymptote is the
    // halving ratio; everything else must pass here
    for (const auto& c : j["checks"]) {
        if (c["name"] == "pi_halving_ratio_burgers") continue;
        CHECK_MESSAGE(c["pass"].get<bool>(), c["name"].get<std::string>());
    }
}

TEST_CASE("oracle command writes grid + sidecar") {
    const auto dir = scratch("oracle");
    const auto prefix = (dir / "o").string();
    REQUIRE(call({"oracle", "--method", "reference_fd", "--preset", "sine", "--sigma", "1",
                  "--t", "0.25", "--resolution", "128", "--out", prefix.c_str()}) == 0);
    const auto j = nlohmann::json::parse(slurp(prefix + "_oracle.json"));
    CHECK(j["method"] == "reference_fd");
    CHECK(j["resolution"] == 128);
    CHECK(j["est_error"].get<double>() >= 0.0);
    std::ifstream is(prefix + "_oracle.csv");
    CHECK(io::read_grid_csv(is).size() == 128);
}
