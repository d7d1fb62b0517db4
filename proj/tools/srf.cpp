// Command-line front end: scenario runner, entropy/mu/tube probes and the
// reduced self-test suite.  Exit codes: 0 ok, 2 configuration error,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "srf/conjugate.hpp"
#include "srf/errors.hpp"
#include "srf/flow.hpp"
#include "srf/functionals.hpp"
#include "srf/gauge.hpp"
#include "srf/harness.hpp"
#include "srf/io.hpp"
#include "srf/tubes.hpp"

using namespace srf;

namespace {

struct CliFlags {
    std::string config_file;
    std::vector<std::string> overrides; // key=value
};

RunConfig assemble_config(const CliFlags& fl) {
    RunConfig cfg;
    if (!fl.config_file.empty()) cfg = RunConfig::from_file(fl.config_file);
    for (const std::string& ov : fl.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override must be key=value, got '" + ov + "'");
        cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CliFlags& fl) {
    cmd->add_option("--config", fl.config_file, "configuration file (key=value lines)");
    cmd->add_option("--set", fl.overrides, "override a config key, key=value")
        ->take_all();
}

int cmd_simulate(const RunConfig& cfg) {
    const ScenarioResult res = run_scenario(cfg);
    for (const auto& p : res.probes)
        std::printf("[%s] %-28s %.6g %s\n", p.pass ? "pass" : "FAIL", p.name.c_str(),
                    p.value, p.detail.c_str());
    std::printf("outputs: %s %s %s\n", res.csv_path.c_str(), res.json_path.c_str(),
                res.svg_path.c_str());
    return res.all_pass() ? 0 : 3;
}

int cmd_entropy(const RunConfig& cfg) {
    const Family fam = (cfg.model_family == "Round") ? Family::Round : Family::Weighted;
    ModelSpec model = build_model(fam, cfg.model_a, cfg.model_b, cfg.grid_n);
    Calculus calc(model);
    BasicField phi0(model.grid, seeded_potential(cfg.grid_n, cfg.seed));
    FlowOptions fopt;
    fopt.dt_safety = cfg.flow_dt_safety;
    fopt.store_dt = 0.02;
    const double theta_end = std::max(1.0, cfg.flow_t_end);
    Trajectory traj = run_flow(calc, phi0, theta_end, fopt);
    const double t_un = std::min(0.9, 1.0 - std::exp(-theta_end));
    Trajectory un = to_unnormalized(calc, traj, t_un, 60);

    std::filesystem::create_directories(cfg.output_dir);
    const std::string path = cfg.output_dir + "/entropy_series.csv";
    std::ofstream out(path);
    out << "# coupled backward series: t, F_T, W_T, tau, chi_constraint\n";
    out << "t,F_T,W_T,tau,chi_constraint\n";

    BasicField fT(model.grid, 0.0);
    const DilatonPath pF = solve_backward_F(calc, un, fT);
    BasicField fTW(model.grid, 0.0);
    {
        Profile ones(static_cast<size_t>(cfg.grid_n), 1.0);
        const double mass = calc.integrate(un.states.back().gT, ones);
        for (double& v : fTW.values) v = std::log(mass / (4.0 * M_PI * cfg.conjugate_tau_T));
    }
    const DilatonPath pW = solve_backward_W(calc, un, fTW, cfg.conjugate_tau_T);
    out.precision(17);
    for (size_t k = 0; k < un.states.size(); ++k) {
        Profile e(static_cast<size_t>(cfg.grid_n));
        for (size_t i = 0; i < e.size(); ++i) e[i] = std::exp(-pW.fields[k][i]);
        const double chi =
            calc.integrate(un.states[k].gT, e) / (4.0 * M_PI * pW.tau[k]);
        out << un.states[k].t << "," << energy_F(calc, un.states[k].gT, pF.fields[k]) << ","
            << entropy_W(calc, un.states[k].gT, pW.fields[k], pW.tau[k]) << "," << pW.tau[k]
            << "," << chi << "\n";
    }
    std::printf("wrote %s (F residual %.3g)\n", path.c_str(), pde_residual(calc, un, pF));
    return 0;
}

int cmd_mu(const RunConfig& cfg) {
    const Family fam = (cfg.model_family == "Round") ? Family::Round : Family::Weighted;
    ModelSpec model = build_model(fam, cfg.model_a, cfg.model_b, cfg.grid_n);
    Calculus calc(model);
    BasicField phi0(model.grid, seeded_potential(cfg.grid_n, cfg.seed));
    const TransverseMetric gT = calc.metric_from_potential(phi0);
    MuOptions opt;
    opt.restarts = cfg.mu_restarts;
    opt.grad_tol = cfg.mu_tol;
    opt.seed = cfg.seed;
    const MuResult r = mu(calc, gT, cfg.conjugate_tau_T, opt);
    std::printf("mu(g, %.4g) = %.12g\n", cfg.conjugate_tau_T, r.value);
    std::printf("  EL residual %.3g, iterations %d, converged %s, constraint %.12g\n",
                r.el_residual, r.iterations, r.converged ? "yes" : "no", r.constraint);
    std::filesystem::create_directories(cfg.output_dir);
    const std::string path = cfg.output_dir + "/mu_minimizer.csv";
    std::ofstream out(path);
    out << "# s,w1\n";
    out.precision(17);
    for (int i = 0; i < cfg.grid_n; ++i)
        out << model.grid->cell(i) << "," << r.minimizer[static_cast<size_t>(i)] << "\n";
    std::printf("wrote %s\n", path.c_str());
    return r.converged ? 0 : 3;
}

int cmd_tubes(const RunConfig& cfg) {
    const Family fam = (cfg.model_family == "Round") ? Family::Round : Family::Weighted;
    ModelSpec model = build_model(fam, cfg.model_a, cfg.model_b, cfg.grid_n);
    Calculus calc(model);
    const TransverseMetric g0 = calc.background();

    std::filesystem::create_directories(cfg.output_dir);
    const std::string path = cfg.output_dir + "/tubes.csv";
    std::ofstream out(path);
    out.precision(17);
    out << "# tube report: tagged rows\n";

    const double center = (fam == Family::Round) ? 0.0 : 0.5;
    const TubeReport rep = gray_fit(calc, g0, center, cfg.tubes_radii);
    out << "gray.q," << rep.q << "\n";
    out << "gray.fitted," << rep.fitted_coefficient << "\n";
    out << "gray.expected," << rep.expected_coefficient << "\n";
    out << "gray.orbit_volume," << rep.orbit_volume << "\n";
    for (size_t i = 0; i < rep.radii.size(); ++i)
        out << "gray.volume," << rep.radii[i] << "," << rep.volumes[i] << "\n";
    out << "diameter," << transverse_diameter(calc, g0) << "\n";
    const NoncollapseResult nc = noncollapse_ratio(calc, g0, center, 0.25);
    out << "noncollapse.ratio," << nc.ratio << "\n";
    out << "noncollapse.vacuous," << (nc.vacuous ? 1 : 0) << "\n";
    const RadiusSelection sel = radius_selection(calc, g0, center, 0.5);
    out << "radius_selection.r_prime," << sel.r_prime << "\n";
    out << "radius_selection.chain_ratio," << sel.chain_ratio << "\n";
    std::printf("q=%d fitted %.6g expected %.6g (ratio %.4f)\n", rep.q,
                rep.fitted_coefficient, rep.expected_coefficient,
                rep.fitted_coefficient / rep.expected_coefficient);
    if (fam == Family::Round) {
        const TubeEquivalenceReport eq = tube_equivalence_mc(
            calc, 0.35, 0.1, static_cast<int>(cfg.tubes_mc_samples), cfg.seed);
        out << "equivalence.sym_diff_fraction," << eq.sym_diff_fraction << "\n";
        out << "equivalence.dT_fraction," << eq.dT_fraction << "\n";
        out << "equivalence.geo_fraction," << eq.geo_fraction << "\n";
        std::printf("tube equivalence: sym diff %.4g%% of tube\n",
                    100.0 * eq.sym_diff_fraction);
    }
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_gauge_check(const RunConfig& cfg) {
    const Family fam = (cfg.model_family == "Round") ? Family::Round : Family::Weighted;
    ModelSpec model = build_model(fam, cfg.model_a, cfg.model_b, cfg.grid_n);
    Calculus calc(model);
    BasicField phi0(model.grid, seeded_potential(cfg.grid_n, cfg.seed));
    FlowOptions fopt;
    fopt.store_dt = 0.02;
    Trajectory traj = run_flow(calc, phi0, 1.0, fopt);
    Trajectory un = to_unnormalized(calc, traj, 0.5, 50);
    BasicField fT(model.grid, 0.0);
    const DilatonPath path = solve_backward_F(calc, un, fT);
    const GaugePath gp = transport(calc, un, path);
    const GradientFlowResiduals res = check_gradient_flow_form(calc, gp);
    const DiffTInvarianceReport inv = check_diffT_invariance(calc, gp);
    std::printf("gradient-flow residuals: metric_ss %.4g, metric_chi %.4g, dilaton %.4g\n",
                res.metric_ss, res.metric_chi, res.dilaton);
    std::printf("invariance: energy %.4g, scalar transport %.4g, mass %.4g\n",
                inv.energy_discrepancy, inv.scalar_transport, inv.mass_change_of_variables);
    return 0;
}

int cmd_perelman(const RunConfig& cfg) {
    RunConfig c2 = cfg;
    if (c2.flow_t_end < 10.0) c2.flow_t_end = 10.0;
    const ScenarioResult res = run_scenario(c2);
    for (const auto& p : res.probes)
        std::printf("[%s] %-28s %.6g %s\n", p.pass ? "pass" : "FAIL", p.name.c_str(),
                    p.value, p.detail.c_str());
    return res.all_pass() ? 0 : 3;
}

int cmd_selftest(const RunConfig& cfg) {
    const int n = std::min(cfg.grid_n, 128);
    const auto res = selftest(n, cfg.seed);
    bool ok = true;
    for (const auto& p : res) {
        if (p.skipped)
            std::printf("[skip] %-36s %s\n", p.name.c_str(), p.detail.c_str());
        else {
            std::printf("[%s] %-36s %.6g %s\n", p.pass ? "pass" : "FAIL", p.name.c_str(),
                        p.value, p.detail.c_str());
            ok = ok && p.pass;
        }
    }
    return ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"transverse geometric-flow laboratory on weighted 3-spheres"};
    app.require_subcommand(1);

    CliFlags fl;
    auto* simulate = app.add_subcommand("simulate", "run the full scenario and emit reports");
    auto* entropy = app.add_subcommand("entropy", "coupled energy/entropy series");
    auto* mu_cmd = app.add_subcommand("mu", "constrained entropy minimizer");
    auto* tubes = app.add_subcommand("tubes", "tube volumes, expansion fits, non-collapsing");
    auto* gauge = app.add_subcommand("gauge-check", "transport and gradient-flow residuals");
    auto* perelman = app.add_subcommand("perelman-bounds", "uniform-bound time series probe");
    auto* self = app.add_subcommand("selftest", "reduced-resolution invariant suite");
    for (auto* c : {simulate, entropy, mu_cmd, tubes, gauge, perelman, self})
        add_common(c, fl);

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = assemble_config(fl);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (entropy->parsed()) return cmd_entropy(cfg);
        if (mu_cmd->parsed()) return cmd_mu(cfg);
        if (tubes->parsed()) return cmd_tubes(cfg);
        if (gauge->parsed()) return cmd_gauge_check(cfg);
        if (perelman->parsed()) return cmd_perelman(cfg);
        if (self->parsed()) return cmd_selftest(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
