#include "nambu/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <span>

#include "nambu/special.hpp"

namespace nambu {

namespace {

void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
    if (!j.is_object()) throw config_error(where + ": expected a JSON object");
    for (const auto& item : j.items())
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw config_error(where + ": unknown key '" + item.key() + "'");
}

std::vector<double> as_real_vector(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array()) throw config_error(where + ": expected an array of numbers");
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number()) throw config_error(where + ": expected an array of numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

} // namespace

ScenarioConfig parse_config(const nlohmann::json& j) {
    check_keys(j,
               {"family", "n", "constants", "free_index", "X0", "quadratic_A", "t_span",
                "samples", "tolerances", "seed", "compare_tol", "toda"},
               "config");
    ScenarioConfig cfg;
    if (!j.contains("family") || !j.at("family").is_string())
        throw config_error("config: 'family' (string) is required");
    cfg.family = j.at("family").get<std::string>();
    const bool known = cfg.family == "symmetric" || cfg.family == "diagonal" ||
                       cfg.family == "quadratic" || cfg.family == "x2free" ||
                       cfg.family == "toda";
    if (!known) throw config_error("config: unknown family '" + cfg.family + "'");

    if (j.contains("n")) {
        if (!j.at("n").is_number_integer()) throw config_error("config: 'n' must be an integer");
        cfg.n = j.at("n").get<int>();
        if (cfg.n < 2 || cfg.n > 16) throw config_error("config: n out of range [2, 16]");
    }
    if (j.contains("constants")) cfg.constants = as_real_vector(j.at("constants"), "constants");
    if (j.contains("free_index")) {
        if (!j.at("free_index").is_number_integer())
            throw config_error("config: 'free_index' must be an integer");
        cfg.free_index = j.at("free_index").get<int>();
    }
    if (j.contains("X0")) cfg.X0 = as_real_vector(j.at("X0"), "X0");
    if (j.contains("quadratic_A")) {
        if (!j.at("quadratic_A").is_array())
            throw config_error("config: 'quadratic_A' must be an array of rows");
        for (const auto& row : j.at("quadratic_A"))
            cfg.quadratic_A.push_back(as_real_vector(row, "quadratic_A row"));
    }
    if (j.contains("t_span")) {
        const auto v = as_real_vector(j.at("t_span"), "t_span");
        if (v.size() != 2) throw config_error("config: 't_span' must be [t0, t1]");
        cfg.t_span = {v[0], v[1]};
    }
    if (j.contains("samples")) {
        if (!j.at("samples").is_number_integer() || j.at("samples").get<int>() < 2)
            throw config_error("config: 'samples' must be an integer >= 2");
        cfg.samples = j.at("samples").get<int>();
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        check_keys(t, {"rel_tol", "abs_tol", "max_step", "max_steps"}, "tolerances");
        if (t.contains("rel_tol")) cfg.tolerances.rel_tol = t.at("rel_tol").get<double>();
        if (t.contains("abs_tol")) cfg.tolerances.abs_tol = t.at("abs_tol").get<double>();
        if (t.contains("max_step")) cfg.tolerances.max_step = t.at("max_step").get<double>();
        if (t.contains("max_steps")) cfg.tolerances.max_steps = t.at("max_steps").get<long>();
        if (cfg.tolerances.rel_tol <= 0.0 || cfg.tolerances.abs_tol <= 0.0 ||
            cfg.tolerances.max_steps < 1)
            throw config_error("config: tolerances must be positive, max_steps >= 1");
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("compare_tol")) cfg.compare_tol = j.at("compare_tol").get<double>();

    if (j.contains("toda")) {
        const auto& t = j.at("toda");
        check_keys(t, {"m", "i", "v", "c", "steps", "random"}, "toda");
        if (t.contains("m")) cfg.toda_m = t.at("m").get<int>();
        if (cfg.toda_m < 3) throw config_error("toda: m must be >= 3");
        if (t.contains("i")) cfg.toda_i = as_real_vector(t.at("i"), "toda.i");
        if (t.contains("v")) cfg.toda_v = as_real_vector(t.at("v"), "toda.v");
        if (t.contains("c")) cfg.toda_c = t.at("c").get<double>();
        if (t.contains("steps")) {
            cfg.toda_steps = t.at("steps").get<int>();
            if (cfg.toda_steps < 0) throw config_error("toda: steps must be >= 0");
        }
        if (t.contains("random")) cfg.toda_random = t.at("random").get<bool>();
        if (!cfg.toda_random && (cfg.toda_i.empty() || cfg.toda_v.empty()))
            throw config_error("toda: give i and v, or set random = true");
    } else if (cfg.family == "toda") {
        throw config_error("config: family 'toda' requires a 'toda' object");
    }

    cfg.samples = std::max(2, cfg.samples);
    if (cfg.free_index == 0) cfg.free_index = cfg.n;
    if (cfg.family == "x2free") {
        if (cfg.n != 3) throw config_error("config: family 'x2free' is n = 3 only");
        cfg.free_index = 2;
    }
    if (cfg.free_index < 1 || cfg.free_index > cfg.n)
        throw config_error("config: free_index out of range");
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config JSON parse error: ") + e.what());
    }
    return parse_config(j);
}

FlowSpec flowspec_from_config(const ScenarioConfig& cfg) {
    const int n = cfg.n;
    if (cfg.family == "symmetric" || cfg.family == "x2free") {
        if (static_cast<int>(cfg.constants.size()) != n - 1)
            throw config_error("config: 'constants' must hold the n-1 fixed x values");
        std::vector<double> x(n, 0.0);
        int src = 0;
        for (int k = 1; k <= n; ++k)
            if (k != cfg.free_index) x[k - 1] = cfg.constants[src++];
        SymConstants sc(n, x, cfg.free_index);
        return (cfg.free_index == n) ? symmetric_flow(n, sc)
                                     : symmetric_flow_free_i(n, sc, cfg.free_index);
    }
    if (cfg.family == "diagonal") {
        if (static_cast<int>(cfg.constants.size()) != n - 1)
            throw config_error("config: 'constants' must hold x_1..x_{n-1}");
        return diagonal_flow(n, cfg.constants);
    }
    if (cfg.family == "quadratic") {
        if (static_cast<int>(cfg.quadratic_A.size()) != n - 1)
            throw config_error("config: 'quadratic_A' must have n-1 rows");
        ConstraintMatrix A;
        A.n = n;
        for (const auto& row : cfg.quadratic_A) {
            if (static_cast<int>(row.size()) != n)
                throw config_error("config: 'quadratic_A' rows must have n entries");
            A.a.insert(A.a.end(), row.begin(), row.end());
        }
        return quadratic_flow(A);
    }
    throw config_error("config: family '" + cfg.family + "' does not define a flow");
}

std::vector<double> default_initial_state(const ScenarioConfig& cfg) {
    if (!cfg.X0.empty()) {
        if (static_cast<int>(cfg.X0.size()) != cfg.n)
            throw config_error("config: X0 must have n entries");
        return cfg.X0;
    }
    if (cfg.family == "symmetric" && cfg.n == 3 && cfg.free_index == 3) {
        const auto s = circle_solution(cfg.constants[0], cfg.constants[1], 0.0);
        return {s.begin(), s.end()};
    }
    if (cfg.family == "diagonal" && cfg.n == 3) {
        const auto s = diagonal_solution_n3(cfg.constants[0], cfg.constants[1], 0.0);
        return {s.begin(), s.end()};
    }
    if (cfg.family == "x2free") {
        const auto s =
            elliptic_solution_x2_free(cfg.constants[0], cfg.constants[1], cfg.t_span.first);
        return {s.begin(), s.end()};
    }
    throw config_error("config: X0 is required for this family");
}

toda::TodaState toda_state_from_config(const ScenarioConfig& cfg) {
    if (cfg.toda_random) {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> uni(0.5, 2.0);
        std::vector<double> iv(cfg.toda_m), vv(cfg.toda_m);
        for (auto& x : iv) x = uni(rng);
        for (auto& x : vv) x = uni(rng);
        double prod = 1.0;
        for (double x : vv) prod *= x;
        const double scale = std::pow(cfg.toda_c / prod, 1.0 / cfg.toda_m);
        for (auto& x : vv) x *= scale;
        return toda::TodaState(std::move(iv), std::move(vv));
    }
    if (static_cast<int>(cfg.toda_i.size()) != cfg.toda_m ||
        static_cast<int>(cfg.toda_v.size()) != cfg.toda_m)
        throw config_error("toda: i and v must have m entries");
    try {
        return toda::TodaState(cfg.toda_i, cfg.toda_v);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("toda: ") + e.what());
    }
}

nlohmann::json flowspec_to_json(const FlowSpec& spec) {
    auto poly_to_json = [](const MultiPoly& p) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& [e, c] : p.terms()) terms.push_back({{"expo", e}, {"coeff", c}});
        return nlohmann::json{{"nvars", p.nvars()}, {"terms", terms}};
    };
    const char* fam = "custom";
    switch (spec.family) {
    case FlowFamily::symmetric: fam = "symmetric"; break;
    case FlowFamily::diagonal: fam = "diagonal"; break;
    case FlowFamily::quadratic: fam = "quadratic"; break;
    case FlowFamily::custom: fam = "custom"; break;
    }
    nlohmann::json j{{"n", spec.n},
                     {"family", fam},
                     {"free_index", spec.free_index},
                     {"constants", spec.constants}};
    nlohmann::json hams = nlohmann::json::array();
    for (const auto& h : spec.hamiltonians) hams.push_back(poly_to_json(h));
    j["hamiltonians"] = hams;
    nlohmann::json cmap = nlohmann::json::array();
    for (const auto& f : spec.constraint_map) cmap.push_back(poly_to_json(f));
    j["constraint_map"] = cmap;
    if (spec.family == FlowFamily::quadratic)
        j["A"] = {{"n", spec.A.n}, {"a", spec.A.a}};
    return j;
}

FlowSpec flowspec_from_json(const nlohmann::json& j) {
    auto poly_from_json = [](const nlohmann::json& pj) {
        MultiPoly p(pj.at("nvars").get<int>());
        for (const auto& t : pj.at("terms"))
            p.add_term(t.at("expo").get<std::vector<int>>(), t.at("coeff").get<double>());
        return p;
    };
    FlowSpec spec;
    spec.n = j.at("n").get<int>();
    const std::string fam = j.at("family").get<std::string>();
    if (fam == "symmetric") spec.family = FlowFamily::symmetric;
    else if (fam == "diagonal") spec.family = FlowFamily::diagonal;
    else if (fam == "quadratic") spec.family = FlowFamily::quadratic;
    else spec.family = FlowFamily::custom;
    spec.free_index = j.at("free_index").get<int>();
    spec.constants = j.at("constants").get<std::vector<double>>();
    for (const auto& h : j.at("hamiltonians")) spec.hamiltonians.push_back(poly_from_json(h));
    for (const auto& f : j.at("constraint_map")) spec.constraint_map.push_back(poly_from_json(f));
    if (j.contains("A")) {
        spec.A.n = j.at("A").at("n").get<int>();
        spec.A.a = j.at("A").at("a").get<std::vector<double>>();
    }
    return spec;
}

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("NAMBU_LOG");
        if (!env) return 0;
        const std::string s(env);
        if (s == "debug") return 2;
        if (s == "info") return 1;
        return 0;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
    if (log_level() >= 2) std::fprintf(stderr, "[debug] %s\n", msg.c_str());
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string csv_row(std::span<const double> values) {
    std::string row;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k) row += ',';
        row += format_double(values[k]);
    }
    row += '\n';
    return row;
}

// Trajectory emitters; format "json" writes the same samples as an array
// of records instead of CSV.
std::string trajectory_csv(const Trajectory& traj, int n, int nh) {
    std::string out = "t";
    for (int j = 1; j <= n; ++j) out += ",X" + std::to_string(j);
    for (int j = 1; j <= nh; ++j) out += ",H" + std::to_string(j);
    out += '\n';
    std::vector<double> row(1 + n + nh);
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        row[0] = traj.samples[k].t;
        for (int j = 0; j < n; ++j) row[1 + j] = traj.samples[k].X[j];
        for (int j = 0; j < nh; ++j) row[1 + n + j] = traj.invariant_values[k][j];
        out += csv_row(row);
    }
    return out;
}

nlohmann::json trajectory_json(const Trajectory& traj) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t k = 0; k < traj.samples.size(); ++k)
        rows.push_back({{"t", traj.samples[k].t},
                        {"X", traj.samples[k].X},
                        {"H", traj.invariant_values[k]}});
    return rows;
}

} // namespace

int cmd_flow_run(const ScenarioConfig& cfg, const OutputOptions& out) {
    if (cfg.family == "toda") throw config_error("flow run: use 'toda run' for the Toda map");
    const FlowSpec spec = flowspec_from_config(cfg);
    const std::vector<double> X0 = default_initial_state(cfg);
    if (cfg.t_span.first == cfg.t_span.second)
        throw config_error("flow run: degenerate t_span");

    IntegratorConfig icfg = cfg.tolerances;
    icfg.samples = cfg.samples;
    log_info("flow run: integrating family " + cfg.family);
    const Trajectory traj = integrate(spec, X0, cfg.t_span, icfg);
    if (!traj.complete) throw std::runtime_error("flow run: integration failed: " + traj.error);

    const DriftStats drift = conservation_report(traj, spec);
    nlohmann::json report{{"family", cfg.family},
                          {"n", cfg.n},
                          {"t_span", {cfg.t_span.first, cfg.t_span.second}},
                          {"samples", cfg.samples},
                          {"steps_accepted", traj.n_steps},
                          {"steps_rejected", traj.n_rejected},
                          {"drift_max", drift.max_abs},
                          {"drift_mean", drift.mean_abs},
                          {"drift_overall_max", drift.overall_max}};

    // volume-preservation probe at mid-span, when the full map is known
    if (!spec.constraint_map.empty() && spec.free_index == spec.n) {
        std::vector<double> x_const(spec.n - 1);
        for (int jh = 0; jh < spec.n - 1; ++jh) x_const[jh] = spec.hamiltonians[jh](X0);
        const double t_mid = 0.5 * (cfg.t_span.first + cfg.t_span.second) - cfg.t_span.first;
        const double vol = volume_check(spec, x_const, t_mid, State{cfg.t_span.first, X0});
        report["volume_det"] = vol;
        report["volume_probe_t"] = t_mid;
    }

    // |F|^2 vs D(W) residual along the run for the symmetric free-x_n family
    if (spec.family == FlowFamily::symmetric && spec.free_index == spec.n) {
        std::vector<double> xfull(spec.n, 0.0);
        for (int jh = 0; jh < spec.n - 1; ++jh) xfull[jh] = spec.hamiltonians[jh](X0);
        SymConstants sc(spec.n, xfull, spec.n);
        const UniPoly D = discriminant_in_W(sc, spec.n);
        double dscale = 0.0;
        for (const auto& s : traj.samples)
            dscale = std::max(dscale, std::fabs(D(s.X[spec.n - 1])));
        double worst = 0.0;
        for (const auto& s : traj.samples) {
            const double dw = D(s.X[spec.n - 1]);
            if (std::fabs(dw) < 1e-3 * dscale) continue;  // near a turning point
            const double f = nambu_rhs(spec, s.X)[spec.n - 1];
            worst = std::max(worst, std::fabs(f * f - dw) / std::fabs(dw));
        }
        report["f2_vs_D_max_rel_residual"] = worst;
    }

    const std::filesystem::path dir(out.out_dir);
    if (out.format == "json")
        write_file(dir / "trajectory.json", trajectory_json(traj).dump(2) + "\n");
    else
        write_file(dir / "trajectory.csv",
                   trajectory_csv(traj, spec.n, static_cast<int>(spec.hamiltonians.size())));
    write_file(dir / "report.json", report.dump(2) + "\n");
    if (!out.quiet)
        std::printf("flow run: %zu samples, max drift %s\n", traj.samples.size(),
                    format_double(drift.overall_max).c_str());
    return 0;
}

namespace {

std::array<double, 3> closed_form_n3(const ScenarioConfig& cfg, double t) {
    if (cfg.family == "symmetric") return circle_solution(cfg.constants[0], cfg.constants[1], t);
    if (cfg.family == "diagonal")
        return diagonal_solution_n3(cfg.constants[0], cfg.constants[1], t);
    return elliptic_solution_x2_free(cfg.constants[0], cfg.constants[1], t);
}

} // namespace

int cmd_flow_compare(const ScenarioConfig& cfg, const OutputOptions& out) {
    if (cfg.n != 3 ||
        (cfg.family != "symmetric" && cfg.family != "diagonal" && cfg.family != "x2free"))
        throw config_error("flow compare: family must be symmetric, diagonal or x2free with n = 3");
    if (cfg.family == "symmetric" && cfg.free_index != 3)
        throw config_error("flow compare: symmetric comparison uses the free-x_n flow");

    const FlowSpec spec = flowspec_from_config(cfg);
    const double t0 = cfg.t_span.first;
    std::vector<double> X0 = cfg.X0;
    if (X0.empty()) {
        const auto s = closed_form_n3(cfg, t0);
        X0.assign(s.begin(), s.end());
    }

    IntegratorConfig icfg = cfg.tolerances;
    icfg.samples = cfg.samples;
    const Trajectory traj = integrate(spec, X0, cfg.t_span, icfg);
    if (!traj.complete)
        throw std::runtime_error("flow compare: integration failed: " + traj.error);

    static constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                         {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    double best = std::numeric_limits<double>::infinity();
    int best_perm = 0;
    bool best_reflected = false;
    for (int reflect = 0; reflect < 2; ++reflect) {
        // closed form at t, or reflected through the starting time
        std::vector<std::array<double, 3>> ref(traj.samples.size());
        bool ok = true;
        for (std::size_t k = 0; k < traj.samples.size(); ++k) {
            const double t = traj.samples[k].t;
            try {
                ref[k] = closed_form_n3(cfg, reflect ? 2.0 * t0 - t : t);
            } catch (const std::exception&) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        for (int p = 0; p < 6; ++p) {
            double dev = 0.0;
            for (std::size_t k = 0; k < traj.samples.size(); ++k)
                for (int jx = 0; jx < 3; ++jx)
                    dev = std::max(dev,
                                   std::fabs(traj.samples[k].X[jx] - ref[k][kPerms[p][jx]]));
            if (dev < best) {
                best = dev;
                best_perm = p;
                best_reflected = (reflect == 1);
            }
        }
    }

    // constraint residuals of the integrated trajectory against the fixed constants
    double max_residual = 0.0;
    for (const auto& s : traj.samples)
        for (std::size_t jh = 0; jh < spec.hamiltonians.size(); ++jh)
            max_residual = std::max(
                max_residual, std::fabs(spec.hamiltonians[jh](s.X) - cfg.constants[jh]));

    const bool pass = best <= cfg.compare_tol;
    nlohmann::json report{
        {"family", cfg.family},
        {"max_deviation", best},
        {"best_permutation",
         {kPerms[best_perm][0] + 1, kPerms[best_perm][1] + 1, kPerms[best_perm][2] + 1}},
        {"time_reflected", best_reflected},
        {"tolerance", cfg.compare_tol},
        {"max_constraint_residual", max_residual},
        {"pass", pass}};
    write_file(std::filesystem::path(out.out_dir) / "compare.json", report.dump(2) + "\n");
    if (!out.quiet)
        std::printf("flow compare: max deviation %s (%s)\n", format_double(best).c_str(),
                    pass ? "pass" : "FAIL");
    if (!pass) throw std::runtime_error("flow compare: deviation above tolerance");
    return 0;
}

int cmd_disc(const ScenarioConfig& cfg, const OutputOptions& out) {
    if (cfg.n < 3 || cfg.n > 5)
        throw config_error("disc: printed formulas exist for n in {3, 4, 5}");
    if (static_cast<int>(cfg.constants.size()) != cfg.n - 1)
        throw config_error("disc: 'constants' must hold x_1..x_{n-1}");
    std::vector<double> xfull(cfg.constants.begin(), cfg.constants.end());
    xfull.push_back(0.0);
    SymConstants sc(cfg.n, xfull, cfg.n);
    const UniPoly D = discriminant_in_W(sc, cfg.n);

    std::string csv = "# D(W) coefficients ascending:";
    for (double c : D.coeffs) csv += " " + format_double(c);
    csv += "\nW,D_interp,D_formula\n";
    for (int k = 0; k < 41; ++k) {
        const double w = -2.0 + 4.0 * k / 40.0;
        const std::vector<double> h = h_from_x(sc, w);
        std::vector<double> hfull{1.0};
        hfull.insert(hfull.end(), h.begin(), h.end());
        csv += csv_row(std::array{w, D(w), d_formula(cfg.n, hfull)});
    }
    write_file(std::filesystem::path(out.out_dir) / "disc.csv", csv);
    if (!out.quiet) std::printf("disc: degree %d polynomial written\n", D.degree());
    return 0;
}

int cmd_toda_run(const ScenarioConfig& cfg, const OutputOptions& out) {
    if (cfg.family != "toda") throw config_error("toda run: family must be 'toda'");
    const toda::TodaState s0 = toda_state_from_config(cfg);
    Mat M = toda::build_M(s0);
    const Mat U = toda::build_U(s0);

    std::string csv = "step";
    for (int k = 1; k <= s0.m; ++k) csv += ",x" + std::to_string(k);
    csv += ",structural_residual\n";
    std::vector<double> row(s0.m + 2);
    for (int stepk = 0; stepk <= cfg.toda_steps; ++stepk) {
        const toda::SpectralInvariants inv = toda::invariants_from_matrix(M);
        row[0] = stepk;
        for (int k = 0; k < s0.m; ++k) row[1 + k] = inv.x[k];
        row[s0.m + 1] = toda::structural_residual(M);
        csv += csv_row(row);
        if (stepk < cfg.toda_steps) {
            try {
                M = toda::step(M, U);
            } catch (const std::exception& e) {
                throw std::runtime_error(std::string("toda run: ") + e.what());
            }
        }
    }
    write_file(std::filesystem::path(out.out_dir) / "toda.csv", csv);
    if (!out.quiet) std::printf("toda run: %d map applications\n", cfg.toda_steps);
    return 0;
}

} // namespace nambu
