#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "nambu/scenario.hpp"

namespace {

struct Args {
    std::string config_path;
    nambu::OutputOptions out;
};

void add_common(CLI::App* cmd, Args& args) {
    cmd->add_option("config", args.config_path, "scenario config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out-dir", args.out.out_dir, "output directory");
    cmd->add_option("--format", args.out.format, "trajectory output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--quiet", args.out.quiet, "suppress progress output");
}

int dispatch(int which, const Args& args) {
    nambu::ScenarioConfig cfg = nambu::load_config(args.config_path);
    switch (which) {
    case 0: return nambu::cmd_flow_run(cfg, args.out);
    case 1: return nambu::cmd_flow_compare(cfg, args.out);
    case 2: return nambu::cmd_disc(cfg, args.out);
    default: return nambu::cmd_toda_run(cfg, args.out);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nambu flows from invertible maps: integration, closed-form checks, "
                 "discriminant tables and the discrete Toda map"};
    app.require_subcommand(1);

    Args args;
    int which = -1;

    CLI::App* flow = app.add_subcommand("flow", "flow integration and comparison");
    flow->require_subcommand(1);
    CLI::App* flow_run = flow->add_subcommand("run", "integrate one flow, emit CSV + report");
    add_common(flow_run, args);
    flow_run->callback([&] { which = 0; });
    CLI::App* flow_cmp = flow->add_subcommand("compare", "integrate and match a closed form");
    add_common(flow_cmp, args);
    flow_cmp->callback([&] { which = 1; });

    CLI::App* disc = app.add_subcommand("disc", "discriminant table D(W)");
    add_common(disc, args);
    disc->callback([&] { which = 2; });

    CLI::App* toda = app.add_subcommand("toda", "discrete Toda map");
    toda->require_subcommand(1);
    CLI::App* toda_run = toda->add_subcommand("run", "iterate the map, emit invariants CSV");
    add_common(toda_run, args);
    toda_run->callback([&] { which = 3; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        return dispatch(which, args);
    } catch (const nambu::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
