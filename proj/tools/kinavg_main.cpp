// kinavg command line tool.
//
//   kinavg run          one kinetic path, trajectory written as CSV
//   kinavg sweep        Monte Carlo (eps, delta) sweep -> convergence tables
//   kinavg limit        averaged PDE only
//   kinavg ptf-residual perturbed-test-function residual table
//   kinavg check        structured self-check suite
//
// Exit code 0 only if nothing was flagged.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "kinavg/harness.hpp"
#include "kinavg/ptf.hpp"

using namespace kinavg;

namespace {

Config load_config(const std::string& path, std::uint64_t seed_override, int threads_override) {
    Config cfg = path.empty() ? Config{} : Config::from_file(path);
    if (seed_override != 0) cfg.set("sweep.seed", std::to_string(seed_override));
    if (threads_override > 0) cfg.set("sweep.threads", std::to_string(threads_override));
    return cfg;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int cmd_run(const Config& cfg, const std::string& out_path) {
    const VelocityModel model = model_from_config(cfg);
    const int n = cfg.get_int("solver.N", 64);
    const SigmaModel sigma = sigma_from_config(cfg, n);
    SolverParams p;
    p.epsilon = cfg.get_double("solver.epsilon", 0.1);
    p.delta = cfg.get_double("solver.delta", 0.1);
    p.T = cfg.get_double("solver.T", 0.25);
    p.n_modes = n;
    p.c1 = cfg.get_double("solver.c1", 0.5);
    p.c2 = cfg.get_double("solver.c2", 0.5);
    p.dt_slow = cfg.get_double("solver.dt_slow", 0.0);
    p.n_outputs = cfg.get_int("solver.outputs", 64);

    OUProcess ou;
    ou.m_bar = cfg.get_double("driving.m_bar", 0.0);
    ou.ell0 = cfg.get_double("driving.ell0", 1.0);
    ou.state = ou.ell0;

    RngStream rng(stream_key(std::uint64_t(cfg.get_double("sweep.seed", 0)), 0, 0));
    const Spectrum rho0 = rho0_from_config(cfg, n);
    PathDiagnostics d = solve_path(equilibrium_field(rho0, model), p, model, sigma, ou, rng);
    if (d.failed) {
        std::cerr << "path failed: " << d.failure << '\n';
        return 1;
    }

    const int n_out_modes = std::min(cfg.get_int("output.n_modes", 8), n / 2 - 1);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        os = &file;
    }
    *os << "t";
    for (int k = 0; k <= n_out_modes; ++k) *os << ",rho_k" << k << "_re,rho_k" << k << "_im";
    *os << ",norm_f,norm_Lf,relax_integral,tau_flag\n";
    for (std::size_t i = 0; i < d.t.size(); ++i) {
        *os << fmt(d.t[i]);
        for (int k = 0; k <= n_out_modes; ++k)
            *os << ',' << fmt(d.rho[i].at(k).real()) << ',' << fmt(d.rho[i].at(k).imag());
        const bool stopped = d.tau_hit && *d.tau_hit <= d.t[i];
        *os << ',' << fmt(d.norm_f[i]) << ',' << fmt(d.norm_Lf[i]) << ','
            << fmt(d.relax_integral[i]) << ',' << (stopped ? 1 : 0) << '\n';
    }
    if (d.apriori_violated) {
        std::cerr << "a priori bound violated (bound " << fmt(d.apriori_bound) << ")\n";
        return 1;
    }
    return 0;
}

int cmd_sweep(const Config& cfg, const std::string& out_dir) {
    SweepConfig sc = SweepConfig::from_config(cfg);
    if (!out_dir.empty()) sc.out_dir = out_dir;
    const SweepResult res = run_sweep(sc);
    write_sweep_outputs(sc, res);
    for (const auto& a : res.aggregates) {
        std::cout << "cell eps=" << a.eps << " delta=" << a.delta
                  << "  mean_sup_hneg=" << a.mean_sup_hneg << " (se " << a.se_sup_hneg << ")"
                  << "  mean_l2_time=" << a.mean_l2_time << "  stop_frac=" << a.stop_fraction
                  << "  failures=" << a.failures << '\n';
    }
    return res.any_flagged ? 1 : 0;
}

int cmd_limit(const Config& cfg, const std::string& out_path) {
    const VelocityModel model = model_from_config(cfg);
    const int n = cfg.get_int("solver.N", 64);
    const SigmaModel sigma = sigma_from_config(cfg, n);
    const double m_bar = cfg.get_double("driving.m_bar", 0.0);
    const AveragedCoefficients coef = averaged_coefficients(model);
    const double T = cfg.get_double("solver.T", 0.25);
    const double dt = cfg.get_double("limit.dt", 1e-3);
    const int stride = cfg.get_int("limit.stride", 10);
    LimitTrajectory traj =
        solve_limit(rho0_from_config(cfg, n), coef, sigma.sigma_bar(m_bar), T, dt, stride);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        os = &file;
    }
    const int n_out_modes = std::min(cfg.get_int("output.n_modes", 8), n / 2 - 1);
    *os << "t";
    for (int k = 0; k <= n_out_modes; ++k) *os << ",rho_k" << k << "_re,rho_k" << k << "_im";
    *os << "\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        *os << fmt(traj.t[i]);
        for (int k = 0; k <= n_out_modes; ++k)
            *os << ',' << fmt(traj.rho[i].at(k).real()) << ',' << fmt(traj.rho[i].at(k).imag());
        *os << '\n';
    }
    return 0;
}

int cmd_ptf_residual(const Config& cfg, const std::string& out_path) {
    const VelocityModel model = model_from_config(cfg);
    const int n = cfg.get_int("solver.N", 64);
    const SigmaModel sigma = sigma_from_config(cfg, n);
    const double m_bar = cfg.get_double("driving.m_bar", 0.0);

    TestFunction tf;
    tf.chi = Chi::sigmoid(cfg.get_double("ptf.chi_scale", 1.0));
    tf.xi = profile_from_coeffs(cfg.get_list("ptf.xi", {0.3, 0.25, -0.1, -0.05, 0.07}), n);
    PtfEvaluator ev(tf, model, sigma, m_bar);

    RngStream rng(stream_key(std::uint64_t(cfg.get_double("sweep.seed", 7)), 2, 0));
    KineticField f = equilibrium_field(rho0_from_config(cfg, n), model);
    for (int j = 0; j < f.n_nodes(); ++j) {  // generic non-equilibrium perturbation
        for (int k = -4; k <= 4; ++k)
            f.node[j].at(k) += 0.05 * cplx(rng.normal(), k == 0 ? 0.0 : rng.normal());
        make_hermitian(f.node[j]);
    }
    const double ell = cfg.get_double("ptf.ell", 4.0);

    const auto eps_list = cfg.get_list("ptf.eps_list", {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64,
                                                        1.0 / 128, 1.0 / 256});
    const auto delta_list = cfg.get_list("ptf.delta_list", {1.0 / 2, 1.0 / 4, 1.0 / 8, 1.0 / 16,
                                                            1.0 / 32, 1.0 / 64});
    const auto samples = ev.residual_scaling(f, ell, eps_list, delta_list);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        os = &file;
    }
    *os << "eps,delta,residual,bound_value\n";
    for (const auto& s : samples)
        *os << fmt(s.eps) << ',' << fmt(s.delta) << ',' << fmt(s.residual) << ','
            << fmt(s.bound_value) << '\n';
    return 0;
}

int cmd_check() {
    const CheckReport report = check_suite();
    std::cout << report.to_string();
    std::cout << (report.all_passed() ? "all checks passed\n" : "CHECK FAILURES\n");
    return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-scale stochastic kinetic laboratory"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_path;
    std::uint64_t seed = 0;
    int threads = 0;
    app.add_option("--config,-c", config_path, "configuration file (key = value lines)");
    app.add_option("--seed", seed, "override sweep.seed");
    app.add_option("--threads", threads, "override sweep.threads");
    app.add_option("--out,-o", out_path, "output file or directory");

    auto* run = app.add_subcommand("run", "simulate one kinetic path");
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo (eps, delta) sweep");
    auto* limit = app.add_subcommand("limit", "solve the averaged PDE only");
    auto* ptf = app.add_subcommand("ptf-residual", "residual-scaling sample table");
    auto* check = app.add_subcommand("check", "run the property check suite");

    CLI11_PARSE(app, argc, argv);

    try {
        const Config cfg = load_config(config_path, seed, threads);
        if (run->parsed()) return cmd_run(cfg, out_path);
        if (sweep->parsed()) return cmd_sweep(cfg, out_path);
        if (limit->parsed()) return cmd_limit(cfg, out_path);
        if (ptf->parsed()) return cmd_ptf_residual(cfg, out_path);
        if (check->parsed()) return cmd_check();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
