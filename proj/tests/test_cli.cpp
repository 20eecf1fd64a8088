#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "json.hpp"
#include "tcgp/cli.hpp"
#include "tcgp/errors.hpp"

using namespace tcgp;
namespace fs = std::filesystem;

namespace {

const fs::path configs = fs::path(TCGP_SOURCE_DIR) / "configs";

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("tcgp_cli_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "tcgp");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_command(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
    const auto c = parse_config(R"({"model": {"kind": "brownian"}})");
    CHECK(c.solver.n_x == 400);
    CHECK(c.solver.n_t == 400);
    CHECK(c.seed == 0);
    CHECK(c.subordinator.single_beta() == 0.5);
    CHECK(c.solver.tol.quadrature == 1e-8);
    CHECK(c.solver.tol.inversion_agreement == 1e-6);

    const auto loaded = load_config(configs / "bm_beta05.json");
    CHECK(loaded.model.kind() == CovarianceModel::Kind::brownian);
    // Spelling out a default does not change the experiment.
    CHECK(parse_config(R"({"model": {"kind": "brownian"}, "seed": 0})").hash() == c.hash());
    CHECK(parse_config(R"({"model": {"kind": "brownian"}, "seed": 1})").hash() != c.hash());
}

TEST_CASE("schema errors name the field") {
    CHECK(error_of(R"({"model": {"kind": "fbm", "hurst": 1.2}})").find("model.hurst") != std::string::npos);
    CHECK(error_of(R"({"model": {"kind": "brownian"}, "solver": {"n_x": 400, "nx": 3}})").find("solver.nx: unknown key") !=
          std::string::npos);
    CHECK(error_of(R"({"model": {"kind": "brownian"}, "solver": {"n_x": "400"}})").find("solver.n_x") != std::string::npos);
    CHECK(error_of(R"({"model": {"kind": "brownian"}, "surprise": 1})").find("surprise: unknown key") != std::string::npos);
    CHECK(error_of(R"({"subordinator": {"beta": 0.5}})").find("model: is required") != std::string::npos);
    CHECK(error_of(R"({"model": {"kind": "brownian"}, "subordinator": {"beta": 1.5}})").find("subordinator.beta") !=
          std::string::npos);
    CHECK(error_of(R"({"model": {"kind": "brownian"}, "subordinator": {"kind": "mixture", "components": [{"beta": 0.4, "weight": -1}]}})")
              .find("subordinator.components[0].weight") != std::string::npos);
    CHECK(error_of(R"({"model": {"kind": "brownian"}, "options": {"paths": 0}})").find("options.paths") != std::string::npos);
    CHECK(error_of(R"({"model": {"kind": "brownian"}, "solver": {"init_width": 0.01}})").find("solver.init_width") !=
          std::string::npos);
    CHECK(error_of(R"({"model": )").find("invalid JSON") != std::string::npos);
    CHECK_THROWS_AS(load_config(configs / "missing.json"), ConfigError);
}

TEST_CASE("mixture weights with any positive total are kept as given") {
    const auto c = parse_config(
        R"({"model": {"kind": "brownian"}, "subordinator": {"kind": "mixture", "components": [{"beta": 0.4, "weight": 3}, {"beta": 0.8, "weight": 5}]}})");
    REQUIRE(c.subordinator.components().size() == 2);
    CHECK(c.subordinator.components()[0].weight == 3.0);
    CHECK(c.subordinator.components()[1].weight == 5.0);
}

TEST_CASE("every model family parses") {
    CHECK(parse_config(R"({"model": {"kind": "ou", "alpha": 1, "sigma": 2}})").model.sigma() == 2.0);
    CHECK(parse_config(R"({"model": {"kind": "piecewise_hurst", "breakpoints": [0, 0.5], "hursts": [0.5, 0.8]}})")
              .model.hursts()
              .size() == 2);
    CHECK(parse_config(R"({"model": {"kind": "variable_hurst", "hurst": {"kind": "saturating", "h0": 0.6, "amplitude": 0.2}, "horizon": 2}})")
              .model.horizon() == 2.0);
    CHECK(parse_config(R"({"model": {"kind": "mixed", "terms": [{"coefficient": 2, "model": {"kind": "fbm", "hurst": 0.3}}]}})")
              .model.terms()
              .size() == 1);
    CHECK(parse_config(R"({"model": {"kind": "brownian"}, "mean": [0.5, 1]})").mean.value(1.0) == 1.5);
    CHECK(error_of(R"({"model": {"kind": "variable_hurst", "hurst": {"kind": "constant", "value": 0.4}, "horizon": 1}})")
              .find("model.hurst.value") != std::string::npos);
}

TEST_CASE("number formatting, hashing and CSV layout") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678})
        CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);

    GridDensity g;
    g.t_grid = {0.0, 0.5, 1.0};
    g.x_grid = {-1.0, 1.0};
    g.values = {0, 1, 2, 3, 4, 5};
    CHECK(grid_density_csv(g) == "t,x,q\n0,-1,0\n0,1,1\n0.5,-1,2\n0.5,1,3\n1,-1,4\n1,1,5\n");
    CHECK(grid_density_csv(g, 2) == "t,x,q\n0,-1,0\n0,1,1\n1,-1,4\n1,1,5\n");
}

TEST_CASE("outputs are written atomically with provenance sidecars") {
    TempDir tmp;
    const Provenance p{"density", R"({"seed":3})", 42, 3};
    const auto files = write_outputs({{"density.csv", "t,x,q\n"}}, p, tmp.path / "out");
    CHECK(files.size() == 2);
    CHECK(slurp(tmp.path / "out" / "density.csv") == "t,x,q\n");
    const auto meta = nlohmann::json::parse(slurp(tmp.path / "out" / "density.meta.json"));
    CHECK(meta["config_hash"] == "000000000000002a");
    CHECK(meta["seed"] == 3);
    CHECK(meta["artifact"] == "density.csv");
    for (const auto& e : fs::directory_iterator(tmp.path / "out")) CHECK(e.path().extension() != ".tmp");

    // A file in place of the directory: nothing is written.
    std::ofstream(tmp.path / "blocked") << "x";
    CHECK_THROWS_AS(write_outputs({{"a.csv", "1"}}, p, tmp.path / "blocked"), Error);

    ::setenv("TCGP_OUTPUT_DIR", (tmp.path / "env").c_str(), 1);
    CHECK(output_directory("") == tmp.path / "env");
    CHECK(output_directory("explicit") == "explicit");
    ::unsetenv("TCGP_OUTPUT_DIR");
    CHECK(output_directory("") == "tcgp_out");
}

TEST_CASE("run_command exit statuses and artifacts") {
    TempDir tmp;
    const std::string out = (tmp.path / "run").string();

    CHECK(run({"moments", "--beta", "0.5", "--gamma", "1", "--t", "1", "--out", out}) == 0);
    const std::string table = slurp(tmp.path / "run" / "moments.csv");
    CHECK(table.find("1,1,1.12837916709551") != std::string::npos);
    // Comma-separated and repeated values are equivalent.
    CHECK(run({"moments", "--beta", "0.5", "--gamma", "1", "--t", "0.5,1", "--out", out}) == 0);
    const std::string listed = slurp(tmp.path / "run" / "moments.csv");
    CHECK(run({"moments", "--beta", "0.5", "--gamma", "1", "--t", "0.5", "--t", "1", "--out", out}) == 0);
    CHECK(slurp(tmp.path / "run" / "moments.csv") == listed);
    CHECK(listed.find("0.5,1,") != std::string::npos);

    CHECK(run({"simulate", "--config", (configs / "fbm_h07.json").string(), "--paths", "0", "--out", out}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({"density", "--config", (configs / "missing.json").string()}) == 2);
    CHECK(run({"moments", "--beta", "1.5", "--out", out}) == 2);
    // The fBm clock-changed equation has no finite-difference solver.
    CHECK(run({"solve", "--config", (configs / "fbm_h07.json").string(), "--out", out}) == 2);

    // Identical config and seed reproduce the CSV byte for byte.
    const std::string a = (tmp.path / "a").string(), b = (tmp.path / "b").string();
    CHECK(run({"simulate", "--config", (configs / "fbm_h07.json").string(), "--paths", "50", "--out", a}) == 0);
    CHECK(run({"simulate", "--config", (configs / "fbm_h07.json").string(), "--paths", "50", "--out", b}) == 0);
    CHECK(slurp(fs::path(a) / "paths.csv") == slurp(fs::path(b) / "paths.csv"));
    CHECK(fs::exists(fs::path(a) / "paths.meta.json"));
}

TEST_CASE("validate on the Brownian beta = 1/2 example") {
    TempDir tmp;
    const std::string out = (tmp.path / "v").string();
    CHECK(run({"validate", "--config", (configs / "bm_beta05.json").string(), "--out", out}) == 0);
    const auto report = nlohmann::json::parse(slurp(tmp.path / "v" / "report.json"));
    CHECK(report["passed"] == true);
    bool found = false;
    for (const auto& c : report["checks"]) {
        CHECK(c.contains("runtime_seconds"));
        if (c["name"] == "solver_vs_subordination(t=1)") {
            found = true;
            CHECK(c["value"].get<double>() <= 5e-3);
        }
    }
    CHECK(found);

    // An unattainable tolerance is reported as a failed check with exit status 1.
    std::ofstream(tmp.path / "tight.json")
        << R"({"model": {"kind": "brownian"}, "solver": {"n_x": 40, "n_t": 20}, "options": {"paths": 200}})";
    CHECK(run({"validate", "--config", (tmp.path / "tight.json").string(), "--out", out}) == 1);
}
