#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nambu/flows.hpp"
#include "nambu/integrate.hpp"
#include "nambu/toda.hpp"

namespace nambu {

/// Bad or inconsistent configuration input; the CLI maps this to exit 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One scenario, parsed from a single JSON document. Unknown keys are
/// rejected so configs stay reproducible under version control.
struct ScenarioConfig {
    std::string family;                 // symmetric | diagonal | quadratic | x2free | toda
    int n = 3;
    std::vector<double> constants;      // fixed x values, in ascending j with the free slot skipped
    int free_index = 0;                 // 0 => default (n)
    std::vector<double> X0;             // optional; families with a closed-form section have a default
    std::vector<std::vector<double>> quadratic_A;
    std::pair<double, double> t_span{0.0, 10.0};
    int samples = 512;
    IntegratorConfig tolerances;
    std::uint64_t seed = 1;
    double compare_tol = 1e-6;
    // toda subsection
    int toda_m = 3;
    std::vector<double> toda_i, toda_v;
    bool toda_random = false;
    double toda_c = 1.0;
    int toda_steps = 100;
};

ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);

struct OutputOptions {
    std::string out_dir = ".";
    std::string format = "csv";  // csv | json
    bool quiet = false;
};

/// Subcommand bodies; each writes its artifacts into out_dir and returns
/// the process exit code (0 ok; throws config_error for bad input and
/// std::runtime_error for numerical failure).
int cmd_flow_run(const ScenarioConfig& cfg, const OutputOptions& out);
int cmd_flow_compare(const ScenarioConfig& cfg, const OutputOptions& out);
int cmd_disc(const ScenarioConfig& cfg, const OutputOptions& out);
int cmd_toda_run(const ScenarioConfig& cfg, const OutputOptions& out);

FlowSpec flowspec_from_config(const ScenarioConfig& cfg);
std::vector<double> default_initial_state(const ScenarioConfig& cfg);
toda::TodaState toda_state_from_config(const ScenarioConfig& cfg);

nlohmann::json flowspec_to_json(const FlowSpec& spec);
FlowSpec flowspec_from_json(const nlohmann::json& j);

/// NAMBU_LOG in {error, info, debug}; default error.
int log_level();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

/// Round-trip-exact decimal rendering of a double (17 significant digits,
/// C-locale '.'), shared by every emitter so outputs stay byte-identical.
std::string format_double(double v);

} // namespace nambu
