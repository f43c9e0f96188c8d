#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "nambu/scenario.hpp"
#include "nambu/special.hpp"

using namespace nambu;
namespace fs = std::filesystem;

namespace {

nlohmann::json base_config() {
    return nlohmann::json{{"family", "symmetric"},
                          {"n", 3},
                          {"constants", {3.0, 2.0}},
                          {"t_span", {0.0, 1.0}},
                          {"samples", 16}};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("nambu_scenario_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

} // namespace

TEST_CASE("parse_config accepts the documented schema") {
    const ScenarioConfig cfg = parse_config(base_config());
    CHECK(cfg.family == "symmetric");
    CHECK(cfg.n == 3);
    CHECK(cfg.free_index == 3);
    CHECK(cfg.constants == std::vector<double>{3.0, 2.0});
    CHECK(cfg.samples == 16);
}

TEST_CASE("parse_config rejects unknown keys and bad values") {
    auto j = base_config();
    j["surprise"] = 1;
    CHECK_THROWS_AS(parse_config(j), config_error);

    auto j2 = base_config();
    j2["tolerances"] = {{"rel_tol", 1e-10}, {"extra", true}};
    CHECK_THROWS_AS(parse_config(j2), config_error);

    auto j3 = base_config();
    j3.erase("family");
    CHECK_THROWS_AS(parse_config(j3), config_error);

    auto j4 = base_config();
    j4["family"] = "pendulum";
    CHECK_THROWS_AS(parse_config(j4), config_error);

    auto j5 = base_config();
    j5["t_span"] = {0.0, 1.0, 2.0};
    CHECK_THROWS_AS(parse_config(j5), config_error);

    auto j6 = base_config();
    j6["tolerances"] = {{"rel_tol", -1.0}};
    CHECK_THROWS_AS(parse_config(j6), config_error);

    CHECK_THROWS_AS(parse_config(nlohmann::json{{"family", "toda"}}), config_error);
}

TEST_CASE("flowspec_from_config builds each family") {
    ScenarioConfig cfg = parse_config(base_config());
    const FlowSpec sym = flowspec_from_config(cfg);
    CHECK(sym.family == FlowFamily::symmetric);
    CHECK(sym.hamiltonians.size() == 2);

    auto jd = base_config();
    jd["family"] = "diagonal";
    jd["constants"] = {2.0, 1.0};
    const FlowSpec diag = flowspec_from_config(parse_config(jd));
    CHECK(diag.family == FlowFamily::diagonal);

    auto jq = base_config();
    jq["family"] = "quadratic";
    jq.erase("constants");
    jq["quadratic_A"] = {{1.0, -1.0, 0.0}, {0.0, 1.0, -1.0}};
    jq["X0"] = {1.0, 1.0, 1.0};
    const FlowSpec quad = flowspec_from_config(parse_config(jq));
    CHECK(quad.family == FlowFamily::quadratic);
    CHECK(quad.A.minor_det(0) == doctest::Approx(1.0));

    auto jx = base_config();
    jx["family"] = "x2free";
    jx["constants"] = {3.0, 0.3};
    const FlowSpec x2 = flowspec_from_config(parse_config(jx));
    CHECK(x2.free_index == 2);
    CHECK(x2.hamiltonians.size() == 2);
}

TEST_CASE("flowspec JSON round trip preserves the vector field") {
    auto jd = base_config();
    jd["family"] = "diagonal";
    jd["constants"] = {2.0, 1.0};
    const FlowSpec spec = flowspec_from_config(parse_config(jd));
    const FlowSpec back = flowspec_from_json(flowspec_to_json(spec));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(0.3, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> X(3);
        for (auto& v : X) v = uni(rng);
        CHECK(nambu_rhs(spec, X) == nambu_rhs(back, X));
    }
    CHECK(back.constraint_map.size() == spec.constraint_map.size());
}

TEST_CASE("default_initial_state uses the closed-form sections") {
    const ScenarioConfig cfg = parse_config(base_config());
    const std::vector<double> X0 = default_initial_state(cfg);
    const auto c0 = circle_solution(3.0, 2.0, 0.0);
    for (int k = 0; k < 3; ++k) CHECK(X0[k] == doctest::Approx(c0[k]));

    auto jq = base_config();
    jq["family"] = "quadratic";
    jq.erase("constants");
    jq["quadratic_A"] = {{1.0, -1.0, 0.0}, {0.0, 1.0, -1.0}};
    CHECK_THROWS_AS(default_initial_state(parse_config(jq)), config_error);
}

TEST_CASE("toda_state_from_config is seed-deterministic") {
    nlohmann::json j{{"family", "toda"},
                     {"seed", 42},
                     {"toda", {{"m", 3}, {"random", true}, {"steps", 10}}}};
    const ScenarioConfig cfg = parse_config(j);
    const toda::TodaState a = toda_state_from_config(cfg);
    const toda::TodaState b = toda_state_from_config(cfg);
    CHECK(a.i == b.i);
    CHECK(a.v == b.v);
    CHECK(a.c == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : a.i) {
        CHECK(x >= 0.5);
        CHECK(x <= 2.0);
    }
}

TEST_CASE("cmd_disc writes the discriminant table") {
    TempDir dir;
    auto j = base_config();
    j.erase("t_span");
    j.erase("samples");
    const ScenarioConfig cfg = parse_config(j);
    OutputOptions out;
    out.out_dir = dir.path.string();
    out.quiet = true;
    CHECK(cmd_disc(cfg, out) == 0);

    std::ifstream in(dir.path / "disc.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line.substr(0, 28) == "# D(W) coefficients ascendin");
    std::getline(in, line);
    CHECK(line == "W,D_interp,D_formula");
}

TEST_CASE("cmd_toda_run with zero steps emits a single row") {
    TempDir dir;
    nlohmann::json j{{"family", "toda"},
                     {"toda", {{"m", 3}, {"i", {1.0, 1.0, 1.0}}, {"v", {1.0, 1.0, 1.0}},
                               {"steps", 0}}}};
    OutputOptions out;
    out.out_dir = dir.path.string();
    out.quiet = true;
    CHECK(cmd_toda_run(parse_config(j), out) == 0);

    std::ifstream in(dir.path / "toda.csv");
    REQUIRE(in.good());
    std::string header, row, extra;
    std::getline(in, header);
    CHECK(header == "step,x1,x2,x3,structural_residual");
    REQUIRE(std::getline(in, row));
    CHECK(row.substr(0, 4) == "0,6,");
    CHECK_FALSE(std::getline(in, extra));
}

TEST_CASE("format_double renders round-trip-exact decimals") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
    const double v = 0.1 + 0.2;
    CHECK(std::stod(format_double(v)) == v);
}
