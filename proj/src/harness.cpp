#include "kinavg/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "kinavg/ptf.hpp"
#include "kinavg/rng.hpp"

namespace kinavg {

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct MeanSe {
    double mean = 0, se = 0;
};

MeanSe mean_se(const std::vector<double>& v) {
    MeanSe out;
    if (v.empty()) return out;
    out.mean = pairwise_sum(v) / double(v.size());
    if (v.size() > 1) {
        std::vector<double> sq(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - out.mean) * (v[i] - out.mean);
        const double var = pairwise_sum(sq) / double(v.size() - 1);
        out.se = std::sqrt(var / double(v.size()));
    }
    return out;
}

}  // namespace

void parallel_for(std::size_t n_tasks, int n_threads, const std::function<void(std::size_t)>& fn) {
    if (n_threads <= 1 || n_tasks <= 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mutex;
    const int nt = std::min<std::size_t>(n_threads, n_tasks);
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_tasks) return;
                try {
                    fn(i);
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!failed.exchange(true)) first_error = e.what();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failed) throw std::runtime_error("parallel task failed: " + first_error);
}

SweepConfig SweepConfig::from_config(const Config& cfg) {
    SweepConfig sc;
    sc.raw = cfg;
    sc.eps_list = cfg.get_list("sweep.eps_list", {0.2, 0.1, 0.05});
    sc.delta_list = cfg.get_list("sweep.delta_list", sc.eps_list);
    const std::string coupling = cfg.get_string("sweep.coupling", "diagonal");
    if (coupling == "independent")
        sc.coupling = Coupling::independent;
    else if (coupling == "diagonal")
        sc.coupling = Coupling::diagonal;
    else if (coupling == "ratio")
        sc.coupling = Coupling::ratio;
    else
        throw std::invalid_argument("sweep.coupling must be independent | diagonal | ratio");
    sc.ratio_p = cfg.get_double("sweep.ratio_p", 1.0);
    sc.T = cfg.get_double("solver.T", 0.25);
    sc.n_modes = cfg.get_int("solver.N", 64);
    sc.c1 = cfg.get_double("solver.c1", 0.5);
    sc.c2 = cfg.get_double("solver.c2", 0.5);
    sc.n_outputs = cfg.get_int("solver.outputs", 64);
    sc.replications = cfg.get_int("sweep.replications", 1);
    sc.seed = std::uint64_t(cfg.get_double("sweep.seed", 0));
    sc.varsigma = cfg.get_double("sweep.varsigma", 1.0);
    sc.threads = cfg.get_int("sweep.threads", 1);
    sc.out_dir = cfg.get_string("output.dir", "");
    return sc;
}

std::vector<std::pair<double, double>> SweepConfig::cells() const {
    std::vector<std::pair<double, double>> out;
    switch (coupling) {
        case Coupling::independent:
            for (double e : eps_list)
                for (double d : delta_list) out.emplace_back(e, d);
            break;
        case Coupling::diagonal:
            for (double e : eps_list) out.emplace_back(e, e);
            break;
        case Coupling::ratio:
            for (double e : eps_list) out.emplace_back(e, std::pow(e, ratio_p));
            break;
    }
    return out;
}

VelocityModel model_from_config(const Config& cfg) {
    const std::string kind = cfg.get_string("velocity.kind", "discrete");
    const int dim = cfg.get_int("velocity.dimension", 1);
    if (kind == "discrete") {
        const auto b = cfg.get_list("velocity.b_const", {0.0, 0.0});
        Vec2 bc = {b.size() > 0 ? b[0] : 0.0, b.size() > 1 ? b[1] : 0.0};
        return make_discrete_model(dim, bc);
    }
    if (kind == "continuous") return make_continuous_model(dim, cfg.get_int("velocity.nodes", 32));
    throw std::invalid_argument("velocity.kind must be discrete | continuous");
}

SigmaModel sigma_from_config(const Config& cfg, int n_modes) {
    const auto s0 = cfg.get_list("sigma.sigma0", {0.0});
    const auto s1 = cfg.get_list("sigma.sigma1", {0.0});
    return SigmaModel(profile_from_coeffs(s0, n_modes), profile_from_coeffs(s1, n_modes));
}

Spectrum rho0_from_config(const Config& cfg, int n_modes) {
    const auto r = cfg.get_list("init.rho", {1.0, 0.5});
    return profile_from_coeffs(r, n_modes);
}

SweepResult run_sweep(const SweepConfig& cfg) {
    const VelocityModel model = model_from_config(cfg.raw);
    if (model.dim != 1)
        throw std::invalid_argument("run_sweep: config-driven sweeps are 1-d (profiles are 1-d)");
    const SigmaModel sigma = sigma_from_config(cfg.raw, cfg.n_modes);
    const double m_bar = cfg.raw.get_double("driving.m_bar", 0.0);
    const double ell0 = cfg.raw.get_double("driving.ell0", 1.0);
    const double alpha = cfg.raw.get_double("driving.alpha", 0.5);
    const AveragedCoefficients coef = averaged_coefficients(model);
    const Spectrum sigma_bar = sigma.sigma_bar(m_bar);

    const auto cells = cfg.cells();
    // Validate every cell up front; reject with the computed bounds.
    for (const auto& [eps, delta] : cells) {
        SolverParams p;
        p.epsilon = eps;
        p.delta = delta;
        p.T = cfg.T;
        p.n_modes = cfg.n_modes;
        p.c1 = cfg.c1;
        p.c2 = cfg.c2;
        validate_params(p, model, sigma, m_bar, ell0);
    }

    const bool random_f0 = cfg.raw.get_bool("init.random", false);
    const Spectrum rho0 = rho0_from_config(cfg.raw, cfg.n_modes);

    // Reference limit trajectory on the shared output grid (deterministic f0:
    // solved once per sweep).
    const int n_out = std::max(1, cfg.n_outputs);
    auto solve_reference = [&](const Spectrum& r0) {
        const double dt_out = cfg.T / n_out;
        const int refine = std::max(1, int(std::ceil(dt_out / 2.5e-4)));
        return solve_limit(r0, coef, sigma_bar, cfg.T, dt_out / refine, refine);
    };
    LimitTrajectory shared_ref;
    if (!random_f0) shared_ref = solve_reference(rho0);

    const int R = cfg.replications;
    SweepResult result;
    result.records.resize(cells.size() * R);

    parallel_for(cells.size() * R, cfg.threads, [&](std::size_t task) {
        const std::size_t ci = task / R;
        const int rep = int(task % R);
        const auto [eps, delta] = cells[ci];
        RngStream rng(stream_key(cfg.seed, ci, rep));

        Spectrum r0 = rho0;
        if (random_f0) {
            const int modes = cfg.raw.get_int("init.random_modes", 3);
            const double amp = cfg.raw.get_double("init.random_amp", 0.25);
            for (int k = 1; k <= modes; ++k) {
                r0.at(k) += cplx(amp * rng.normal(), amp * rng.normal()) / double(2 * k);
                r0.at(-k) = std::conj(r0.at(k));
            }
        }

        SolverParams p;
        p.epsilon = eps;
        p.delta = delta;
        p.T = cfg.T;
        p.n_modes = cfg.n_modes;
        p.c1 = cfg.c1;
        p.c2 = cfg.c2;
        p.alpha = alpha;
        p.n_outputs = n_out;

        OUProcess ou;
        ou.m_bar = m_bar;
        ou.ell0 = ell0;
        ou.state = ell0;

        ErrorRecord rec;
        rec.eps = eps;
        rec.delta = delta;
        rec.replication = rep;

        const KineticField f0 = equilibrium_field(r0, model);
        PathDiagnostics d = solve_path(f0, p, model, sigma, ou, rng);
        if (d.failed) {
            rec.failed = true;
            result.records[task] = rec;
            return;
        }
        const LimitTrajectory ref = random_f0 ? solve_reference(r0) : LimitTrajectory{};
        const LimitTrajectory& limit = random_f0 ? ref : shared_ref;

        double sup_h = 0.0, l2_acc = 0.0, last_l2sq = 0.0;
        const double dt_out = cfg.T / n_out;
        for (std::size_t i = 0; i < d.rho.size(); ++i) {
            Spectrum diff = d.rho[i];
            diff -= limit.rho[i];
            const double hn = h_neg_norm(diff, cfg.varsigma);
            sup_h = std::max(sup_h, hn);
            const double l2sq = inner(diff, diff);
            if (i > 0) l2_acc += 0.5 * dt_out * (last_l2sq + l2sq);
            last_l2sq = l2sq;
            if (i + 1 == d.rho.size()) rec.err_hneg_T = hn;
        }
        rec.err_sup_hneg = sup_h;
        rec.err_l2_time = std::sqrt(l2_acc);
        rec.tau_hit = d.tau_hit.has_value() && *d.tau_hit < cfg.T;
        rec.apriori_ok = !d.apriori_violated;
        result.records[task] = rec;
    });

    // Deterministic aggregation pass.
    result.aggregates.reserve(cells.size());
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        CellAggregate agg;
        agg.eps = cells[ci].first;
        agg.delta = cells[ci].second;
        std::vector<double> sup_v, l2_v, hT_v;
        int stops = 0;
        for (int rep = 0; rep < R; ++rep) {
            const ErrorRecord& rec = result.records[ci * R + rep];
            if (rec.failed) {
                ++agg.failures;
                result.any_flagged = true;
                continue;
            }
            sup_v.push_back(rec.err_sup_hneg);
            l2_v.push_back(rec.err_l2_time);
            hT_v.push_back(rec.err_hneg_T);
            if (rec.tau_hit) ++stops;
        }
        agg.replications = int(sup_v.size());
        const MeanSe ms = mean_se(sup_v);
        agg.mean_sup_hneg = ms.mean;
        agg.se_sup_hneg = ms.se;
        const MeanSe ml = mean_se(l2_v);
        agg.mean_l2_time = ml.mean;
        agg.se_l2_time = ml.se;
        const MeanSe mh = mean_se(hT_v);
        agg.mean_hneg_T = mh.mean;
        agg.se_hneg_T = mh.se;
        agg.stop_fraction = R > 0 ? double(stops) / double(R) : 0.0;
        result.aggregates.push_back(agg);
    }
    return result;
}

std::string SweepResult::records_csv() const {
    std::ostringstream os;
    os << "eps,delta,replication,err_hneg_T,err_sup_hneg,err_l2_time,tau_hit,apriori_ok,failed\n";
    for (const auto& r : records) {
        os << fmt_g(r.eps) << ',' << fmt_g(r.delta) << ',' << r.replication << ','
           << fmt_g(r.err_hneg_T) << ',' << fmt_g(r.err_sup_hneg) << ',' << fmt_g(r.err_l2_time)
           << ',' << (r.tau_hit ? 1 : 0) << ',' << (r.apriori_ok ? 1 : 0) << ','
           << (r.failed ? 1 : 0) << '\n';
    }
    return os.str();
}

std::string SweepResult::aggregate_csv() const {
    std::ostringstream os;
    os << "eps,delta,replications,mean_sup_hneg,se_sup_hneg,mean_l2_time,se_l2_time,"
          "mean_hneg_T,se_hneg_T,stop_fraction,failures\n";
    for (const auto& a : aggregates) {
        os << fmt_g(a.eps) << ',' << fmt_g(a.delta) << ',' << a.replications << ','
           << fmt_g(a.mean_sup_hneg) << ',' << fmt_g(a.se_sup_hneg) << ',' << fmt_g(a.mean_l2_time)
           << ',' << fmt_g(a.se_l2_time) << ',' << fmt_g(a.mean_hneg_T) << ',' << fmt_g(a.se_hneg_T)
           << ',' << fmt_g(a.stop_fraction) << ',' << a.failures << '\n';
    }
    return os.str();
}

void write_sweep_outputs(const SweepConfig& cfg, const SweepResult& result) {
    if (cfg.out_dir.empty()) return;
    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream out(cfg.out_dir + "/records.csv");
        out << result.records_csv();
    }
    {
        std::ofstream out(cfg.out_dir + "/aggregate.csv");
        out << result.aggregate_csv();
    }
    nlohmann::json manifest;
    char hash_hex[24];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(cfg.raw.hash()));
    manifest["config_hash"] = hash_hex;
    manifest["version"] = "kinavg 0.1.0";
    manifest["flagged"] = result.any_flagged;
    nlohmann::json entries = nlohmann::json::object();
    for (const auto& [k, v] : cfg.raw.entries()) entries[k] = v;
    manifest["config"] = entries;
    std::ofstream out(cfg.out_dir + "/manifest.json");
    out << manifest.dump(2) << '\n';
}

// --- self-check suite -------------------------------------------------------

namespace {

KineticField random_field(const VelocityModel& model, int n, RngStream& rng, double amp = 1.0) {
    KineticField f(model.dim, n, model.n_nodes());
    const int ng = n;  // draw real grid values, transform, keep the full band
    for (int j = 0; j < model.n_nodes(); ++j) {
        if (model.dim == 1) {
            std::vector<double> vals(ng);
            for (auto& v : vals) v = amp * rng.normal();
            f.node[j] = from_grid(vals, ng, 1, n);
        } else {
            std::vector<double> vals(std::size_t(ng) * ng);
            for (auto& v : vals) v = amp * rng.normal();
            f.node[j] = from_grid(vals, ng, 2, n);
        }
        // keep the usable band |k| < n/2: the Nyquist mode has no conjugate
        // partner in the stored set
        if (model.dim == 1) {
            f.node[j].at(-n / 2) = cplx(0, 0);
        } else {
            for (int m = 0; m < n; ++m) {
                f.node[j].at(-n / 2, freq_of(m, n)) = cplx(0, 0);
                f.node[j].at(freq_of(m, n), -n / 2) = cplx(0, 0);
            }
        }
    }
    return f;
}

}  // namespace

CheckReport check_suite(const CheckOptions& opt) {
    CheckReport report;
    RngStream rng(stream_key(opt.seed, 0, 0));
    auto push = [&report](std::string module, std::string name, double observed, double tol,
                          std::string detail = "") {
        CheckItem it;
        it.module = std::move(module);
        it.name = std::move(name);
        it.observed = observed;
        it.tolerance = tol;
        it.passed = std::isfinite(observed) && observed <= tol;
        it.detail = std::move(detail);
        report.items.push_back(std::move(it));
    };

    const VelocityModel model =
        opt.model_override ? *opt.model_override : make_discrete_model(1, {0.0, 0.0});
    const VelocityModel cont = make_continuous_model(1, 32);

    // normalization / centering on the model under test and the continuous one
    for (const VelocityModel* m : {&model, &cont}) {
        double mass = 0.0, cent = 0.0;
        for (int j = 0; j < m->n_nodes(); ++j) {
            mass += m->weights[j] * m->maxwellian[j];
            cent += m->weights[j] * m->maxwellian[j] * m->a_field[j][0];
        }
        const std::string tag = m == &cont ? "continuous" : "primary";
        push("velocity_space", "normalization(" + tag + ")", std::abs(mass - 1.0), 1e-12,
             "sum mu M - 1 = " + fmt_g(mass - 1.0));
        push("velocity_space", "centering(" + tag + ")", std::abs(cent), 1e-12);
    }

    // structure identities on random fields
    {
        double worst_mean = 0, worst_cs = 0, worst_eq = 0;
        for (int trial = 0; trial < 20; ++trial) {
            KineticField f = random_field(model, 32, rng);
            const KineticField lf = bgk_apply(f, model);
            worst_mean = std::max(worst_mean, l2_norm(density(lf, model)));
            const double cs = l2_norm(density(f, model)) - weighted_norm(f, model);
            worst_cs = std::max(worst_cs, cs);
            const KineticField eq = equilibrium_field(density(f, model), model);
            worst_eq = std::max(worst_eq, weighted_norm(bgk_apply(eq, model), model));
        }
        push("velocity_space", "bgk_mean_zero", worst_mean, 1e-12);
        push("velocity_space", "density_dominated_by_weighted_norm", worst_cs, 1e-12);
        push("velocity_space", "bgk_kills_equilibrium", worst_eq, 1e-12);
    }

    // Poisson identities for the corrector system
    {
        Spectrum xi(1, 32);
        xi.at(0) = 0.3;
        xi.at(1) = cplx(0.25, -0.1);
        xi.at(-1) = std::conj(xi.at(1));
        xi.at(2) = cplx(-0.05, 0.07);
        xi.at(-2) = std::conj(xi.at(2));
        Spectrum s0 = profile_from_coeffs({0.4, 0.2}, 32);
        Spectrum s1 = profile_from_coeffs({0.0, 1.0}, 32);
        const SigmaModel sig(s0, s1);
        TestFunction tf{Chi::sigmoid(1.0), xi};
        PtfEvaluator ev(tf, model, sig, 0.0);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            KineticField f = random_field(model, 32, rng, 0.5);
            const double ell = 2.0 * rng.normal();
            for (double r : ev.poisson_residuals(f, ell)) worst = std::max(worst, r);
        }
        push("ptf", "poisson_identities", worst, 1e-10);
    }

    // mass conservation with sigma = 0 and the a priori bound
    {
        Spectrum zero(1, 32);
        const SigmaModel sig(zero, zero);
        Spectrum rho0 = profile_from_coeffs({1.0, 0.5}, 32);
        SolverParams p;
        p.epsilon = 0.1;
        p.delta = 0.5;
        p.T = 0.25;
        p.n_modes = 32;
        OUProcess ou;
        RngStream prng(stream_key(opt.seed, 1, 0));
        PathDiagnostics d =
            solve_path(equilibrium_field(rho0, model), p, model, sig, ou, prng);
        double mass_drift = 0.0;
        for (const auto& r : d.rho) mass_drift = std::max(mass_drift, std::abs(r.at(0).real() - 1.0));
        push("kinetic_solver", "mass_conservation(sigma=0)", mass_drift, 1e-10);
        push("kinetic_solver", "apriori_bound", d.apriori_violated ? 1.0 : 0.0, 0.5,
             "bound = " + fmt_g(d.apriori_bound));
    }

    // limit solver: split path vs exact path for constant sigma_bar
    {
        const AveragedCoefficients coef = averaged_coefficients(model);
        Spectrum rho0 = profile_from_coeffs({1.0, 0.4, 0.2}, 32);
        Spectrum sconst(1, 32);
        sconst.at(0) = 0.7;
        LimitTrajectory traj = solve_limit(rho0, coef, sconst, 0.2, 1e-3, 50);
        const Spectrum exact = limit_exact_constant_sigma(rho0, coef, 0.7, 0.2);
        Spectrum diff = traj.back();
        diff -= exact;
        push("limit_solver", "exact_vs_split(constant sigma)", l2_norm(diff), 1e-12);
    }

    // driving: synchronous coupling contraction
    {
        OUProcess p1, p2;
        p1.state = 1.5;
        p2.state = -0.5;
        double t = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double g = rng.normal();
            p1 = ou_step(p1, 0.05, g);
            p2 = ou_step(p2, 0.05, g);
            t += 0.05;
        }
        const double err = std::abs(std::abs(p1.state - p2.state) - 2.0 * std::exp(-t));
        push("driving", "coupling_decay_exact", err, 1e-12);
    }

    return report;
}

std::string CheckReport::to_string() const {
    std::ostringstream os;
    for (const auto& it : items) {
        os << (it.passed ? "[PASS] " : "[FAIL] ") << it.module << "." << it.name
           << "  observed=" << fmt_g(it.observed) << " tol=" << fmt_g(it.tolerance);
        if (!it.detail.empty()) os << "  (" << it.detail << ")";
        os << '\n';
    }
    return os.str();
}

}  // namespace kinavg
