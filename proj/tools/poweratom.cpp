// Command-line front end: solve / tf / scan / screen / radius / lab.
// Every run writes machine-readable outputs plus a manifest with the
// config hash, seed, and output list, so results can be reproduced and
// compared byte-for-byte.

#include <chrono>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "poweratom/io.hpp"
#include "poweratom/lab.hpp"
#include "poweratom/minimizer.hpp"
#include "poweratom/screening.hpp"
#include "poweratom/thomas_fermi.hpp"

namespace pa = poweratom;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::int64_t seed = -1;  // < 0: keep the config's seed
    int threads = 1;
};

std::string out_path(const GlobalOpts& g, const std::string& name) {
    return g.out_dir + "/" + name;
}

void apply_env_out(GlobalOpts& g) {
    if (const char* env = std::getenv("POWERATOM_OUT"))
        if (*env) g.out_dir = env;
}

pa::Json load_config(const GlobalOpts& g) {
    if (g.config_path.empty()) return pa::Json::object();
    return pa::read_json_file(g.config_path);
}

// Exit code contract: 0 success, 2 parameter error, 3 numeric error,
// 4 completed but unconverged (outputs still written). The manifest is
// written on 0 and 4.
int finish(const GlobalOpts& g, const std::string& subcommand,
           const pa::Json& config, std::uint64_t seed,
           std::vector<std::string> outputs,
           std::chrono::steady_clock::time_point t0, bool converged) {
    pa::RunManifest m;
    m.subcommand = subcommand;
    m.config_hash = pa::config_hash(config);
    m.seed = seed;
    // record basenames: the manifest sits next to its outputs, and the
    // recorded artifact list must not depend on where the run was placed
    for (auto& o : outputs)
        if (const auto pos = o.find_last_of('/'); pos != std::string::npos)
            o = o.substr(pos + 1);
    m.outputs = std::move(outputs);
    m.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    pa::write_text(out_path(g, subcommand + "_manifest.json"),
                   pa::canonical_json(m.to_json()));
    return converged ? 0 : 4;
}

int run_solve(const GlobalOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();
    const pa::Json cj = load_config(g);
    pa::MinimizerConfig cfg = pa::config_from_json(cj);
    if (g.seed >= 0) cfg.seed = static_cast<std::uint64_t>(g.seed);

    const pa::SolveResult res = pa::solve(cfg);

    const std::string csv_path = out_path(g, "solve_iterations.csv");
    {
        pa::CsvWriter csv(csv_path, {"iter", "E", "T", "V", "D", "X",
                                     "residual", "step"});
        for (const auto& it : res.history)
            csv.row({pa::CsvWriter::cell(it.iter),
                     pa::CsvWriter::cell(it.energy.total),
                     pa::CsvWriter::cell(it.energy.kinetic),
                     pa::CsvWriter::cell(it.energy.attraction),
                     pa::CsvWriter::cell(it.energy.hartree),
                     pa::CsvWriter::cell(it.energy.exchange),
                     pa::CsvWriter::cell(it.residual),
                     pa::CsvWriter::cell(it.step)});
    }

    const pa::Json config_canon = pa::to_json(cfg);
    pa::Json out{{"config", config_canon},
                 {"config_hash", pa::config_hash(config_canon)},
                 {"grid_id", res.state.grid->id()},
                 {"energy",
                  {{"total", res.energy.total},
                   {"kinetic", res.energy.kinetic},
                   {"attraction", res.energy.attraction},
                   {"hartree", res.energy.hartree},
                   {"exchange", res.energy.exchange}}},
                 {"converged", res.converged},
                 {"residual", res.residual},
                 {"iterations", res.iterations},
                 {"start_index", res.start_index},
                 {"trace", pa::trace_total(res.state)}};
    const std::string json_path = out_path(g, "solve_result.json");
    pa::write_text(json_path, pa::canonical_json(out));

    return finish(g, "solve", config_canon, cfg.seed, {json_path, csv_path},
                  t0, res.converged);
}

int run_tf(const GlobalOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();
    const pa::Json cj = load_config(g);
    const double Z = cj.value("Z", 1.0);
    if (Z <= 0.0) throw pa::ParameterError("tf: Z must be > 0");

    const auto sol = pa::shared_tf_solution();
    const std::string csv_path = out_path(g, "tf_profile.csv");
    {
        pa::CsvWriter csv(csv_path, {"x", "y", "yprime"});
        for (std::size_t i = 0; i < sol->xs().size(); ++i)
            csv.row({pa::CsvWriter::cell(sol->xs()[i]),
                     pa::CsvWriter::cell(sol->ys()[i]),
                     pa::CsvWriter::cell(sol->yps()[i])});
    }

    const pa::TFAtom atom(Z, sol);
    const pa::TFConstants k = pa::TFConstants::make();
    pa::Json out{{"Z", Z},
                 {"slope0", sol->slope0()},
                 {"tail_coefficient", sol->beta()},
                 {"ode_residual", sol->max_ode_residual()},
                 {"total_charge", atom.total_charge()},
                 {"energy", atom.energy()},
                 {"energy_per_Z73", atom.energy() / std::pow(Z, 7.0 / 3.0)},
                 {"constants",
                  {{"L_sc", k.L_sc},
                   {"c_tf", k.c_tf},
                   {"B_tf", k.B_tf},
                   {"A_tf", k.A_tf},
                   {"b0", k.b0}}}};
    const std::string json_path = out_path(g, "tf_result.json");
    pa::write_text(json_path, pa::canonical_json(out));

    return finish(g, "tf", cj.is_null() ? pa::Json::object() : cj, 0,
                  {json_path, csv_path}, t0, true);
}

int run_scan(const GlobalOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();
    const pa::Json cj = load_config(g);
    if (!cj.contains("Z_list") || !cj.contains("p_list"))
        throw pa::ParameterError("scan: config needs Z_list and p_list");
    const auto Z_list = cj.at("Z_list").get<std::vector<double>>();
    const auto p_list = cj.at("p_list").get<std::vector<double>>();
    pa::MinimizerConfig base = pa::config_from_json(
        cj.contains("solver") ? cj.at("solver") : pa::Json::object());
    if (g.seed >= 0) base.seed = static_cast<std::uint64_t>(g.seed);
    const double delta = cj.value("delta", 1e-4);
    const double dN = cj.value("dN", 0.25);

    const auto rows = pa::ionization_scan(Z_list, p_list, base, delta, dN);

    const std::string csv_path = out_path(g, "scan_ionization.csv");
    bool all_ok = true;
    {
        pa::CsvWriter csv(csv_path, {"Z", "p", "N_c", "excess", "converged",
                                     "seed", "grid_id", "error"});
        for (const auto& r : rows) {
            csv.row({pa::CsvWriter::cell(r.Z), pa::CsvWriter::cell(r.p),
                     pa::CsvWriter::cell(r.N_c), pa::CsvWriter::cell(r.excess),
                     pa::CsvWriter::cell(r.converged),
                     pa::CsvWriter::cell(r.seed), r.grid_id, r.error});
            if (!r.converged || !r.error.empty()) all_ok = false;
        }
    }
    return finish(g, "scan", cj, base.seed, {csv_path}, t0, all_ok);
}

int run_screen(const GlobalOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();
    const pa::Json cj = load_config(g);
    pa::MinimizerConfig cfg = pa::config_from_json(
        cj.contains("solver") ? cj.at("solver") : cj);
    if (g.seed >= 0) cfg.seed = static_cast<std::uint64_t>(g.seed);
    const double eps = cj.value("eps", 0.5);
    const double D_cut = cj.value("D_cut", 0.5);

    const pa::SolveResult res = pa::solve(cfg);
    const pa::RadialDensity rho = pa::density(res.state);
    const pa::TFAtom tf(cfg.Z);

    std::vector<double> r_list;
    if (cj.contains("r_list")) {
        r_list = cj.at("r_list").get<std::vector<double>>();
    } else {
        // default: log-spaced radii across the grid interior
        const double lo = cj.value("r_lo", 0.1 * std::pow(cfg.Z, -1.0 / 3.0));
        const double hi = cj.value("r_hi", 0.5);
        const int m = cj.value("r_points", 60);
        for (int i = 0; i < m; ++i)
            r_list.push_back(
                lo * std::pow(hi / lo, static_cast<double>(i) / (m - 1)));
    }

    const pa::ScreenedProfile prof =
        pa::deviation_profile(rho, cfg.Z, tf, r_list, eps, D_cut);

    const std::string csv_path = out_path(g, "screen_profile.csv");
    {
        pa::CsvWriter csv(csv_path,
                          {"r", "phi", "phi_tf", "dev", "weighted_dev"});
        for (std::size_t i = 0; i < prof.r.size(); ++i)
            csv.row({pa::CsvWriter::cell(prof.r[i]),
                     pa::CsvWriter::cell(prof.phi[i]),
                     pa::CsvWriter::cell(prof.phi_tf[i]),
                     pa::CsvWriter::cell(prof.dev[i]),
                     pa::CsvWriter::cell(prof.weighted_dev[i])});
    }
    pa::Json out{{"eps", prof.eps},
                 {"D_cut", prof.D_cut},
                 {"max_weighted_inner", prof.max_weighted_inner},
                 {"max_weighted_outer", prof.max_weighted_outer},
                 {"solver_converged", res.converged},
                 {"solver_energy", res.energy.total}};
    const std::string json_path = out_path(g, "screen_result.json");
    pa::write_text(json_path, pa::canonical_json(out));
    return finish(g, "screen", cj, cfg.seed, {csv_path, json_path}, t0,
                  res.converged);
}

int run_radius(const GlobalOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();
    const pa::Json cj = load_config(g);
    if (!cj.contains("kappa_list"))
        throw pa::ParameterError("radius: config needs kappa_list");
    const auto kappas = cj.at("kappa_list").get<std::vector<double>>();
    const std::string source = cj.value("source", std::string("tf"));
    const double B_tf = pa::TFConstants::make().B_tf;

    pa::RadialDensity rho;
    bool converged = true;
    if (source == "tf") {
        const double Z = cj.value("Z", 60.0);
        const pa::TFAtom tf(Z);
        pa::GridPtr grid = std::make_shared<const pa::RadialGrid>(
            pa::build_grid(cj.value("r_min", 1e-4 / std::cbrt(Z)),
                           cj.value("r_max", 60.0),
                           cj.value("grid_n", std::size_t{4000}),
                           pa::Spacing::Log));
        rho = tf.density_on(grid);
    } else if (source == "solver") {
        pa::MinimizerConfig cfg = pa::config_from_json(
            cj.contains("solver") ? cj.at("solver") : cj);
        if (g.seed >= 0) cfg.seed = static_cast<std::uint64_t>(g.seed);
        const pa::SolveResult res = pa::solve(cfg);
        converged = res.converged;
        rho = pa::density(res.state);
    } else {
        throw pa::ParameterError("radius: source must be tf|solver");
    }

    const std::string csv_path = out_path(g, "radius.csv");
    {
        pa::CsvWriter csv(csv_path,
                          {"kappa", "R", "R_times_kappa13_over_BTF"});
        for (double kappa : kappas) {
            const double R = pa::radius(rho, kappa);
            csv.row({pa::CsvWriter::cell(kappa), pa::CsvWriter::cell(R),
                     pa::CsvWriter::cell(R * std::cbrt(kappa) / B_tf)});
        }
    }
    return finish(g, "radius", cj, 0, {csv_path}, t0, converged);
}

pa::Json report_json(const pa::TrialReport& r) {
    return pa::Json{{"lemma", r.id},
                    {"trials", r.trials},
                    {"worst_margin", r.worst_margin},
                    {"seed", r.seed},
                    {"pass", r.pass}};
}

int run_lab(const GlobalOpts& g, const std::string& suite) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t seed = g.seed >= 0 ? static_cast<std::uint64_t>(g.seed)
                                           : 0;
    pa::Json reports = pa::Json::array();
    bool all_pass = true;
    const bool all = suite == "all";

    if (all || suite == "loewner") {
        double worst = std::numeric_limits<double>::infinity();
        int trials = 0;
        for (double p : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0})
            for (int n : {4, 8, 16}) {
                const auto r = pa::check_loewner_power(n, p, 1000,
                                                       seed + trials);
                worst = std::min(worst, r.worst_margin);
                trials += r.trials;
            }
        reports.push_back(report_json(
            pa::TrialReport::make("loewner_power", trials, worst, seed,
                                  1e-10)));
    }
    if (all || suite == "integral") {
        reports.push_back(
            report_json(pa::check_integral_representation(6, 0.7, seed)));
    }
    if (all || suite == "hardy" || suite == "ims" || suite == "binding") {
        // Shared solved state: small hydrogen-like system.
        pa::MinimizerConfig cfg;
        cfg.Z = 1.0;
        cfg.N = 1.0;
        cfg.p = 0.5;
        cfg.L_max = 1;
        cfg.grid_n = 200;
        cfg.r_max = 30.0;
        cfg.n_starts = 1;
        cfg.seed = seed;
        pa::GridPtr grid = std::make_shared<const pa::RadialGrid>(
            pa::build_grid(cfg.effective_r_min(), cfg.r_max, cfg.grid_n,
                           cfg.spacing));
        pa::EnergyModel model(grid, cfg.L_max, cfg.Z, cfg.p);
        const pa::SolveResult res = pa::minimize(model, cfg);
        const std::vector<pa::RadialProfile> profiles = {
            {1.0, 0.5}, {2.0, 0.5}, {3.0, 1.0}};
        if (all || suite == "hardy")
            reports.push_back(report_json(
                pa::check_hardy_exchange(model, res.state, profiles)));
        if (all || suite == "ims") {
            const pa::IMSReport r = pa::check_ims(model, res.state, profiles);
            reports.push_back(
                pa::Json{{"lemma", "ims_identity"},
                         {"trials", static_cast<int>(profiles.size())},
                         {"worst_margin", -r.identity_error},
                         {"seed", seed},
                         {"pass", r.identity_pass}});
            reports.push_back(
                pa::Json{{"lemma", "ims_inequality"},
                         {"trials", static_cast<int>(profiles.size())},
                         {"worst_margin", r.worst_margin},
                         {"seed", seed},
                         {"pass", r.inequality_pass}});
        }
        if (all || suite == "binding") {
            pa::EnergyModel free_model(grid, cfg.L_max, 0.0, cfg.p);
            reports.push_back(report_json(
                pa::check_binding(model, free_model, res.state, profiles)));
        }
    }
    if (reports.empty())
        throw pa::ParameterError("lab: unknown suite " + suite);
    for (const auto& r : reports)
        if (!r.at("pass").get<bool>()) all_pass = false;

    const pa::Json out{{"suite", suite}, {"reports", reports}};
    const std::string json_path = out_path(g, "lab_" + suite + ".json");
    pa::write_text(json_path, pa::canonical_json(out));
    const pa::Json config{{"suite", suite}};
    return finish(g, "lab", config, seed, {json_path}, t0, all_pass);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"power-functional atom laboratory"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON config path");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--seed", g.seed, "seed override (>= 0)");
    app.add_option("--threads", g.threads, "thread cap (runs are serial)");

    auto* c_solve = app.add_subcommand("solve", "minimize the energy");
    auto* c_tf = app.add_subcommand("tf", "Thomas-Fermi universal solution");
    auto* c_scan = app.add_subcommand("scan", "ionization scan over Z, p");
    auto* c_screen =
        app.add_subcommand("screen", "screened-potential deviation profile");
    auto* c_radius = app.add_subcommand("radius", "charge-tail radii");
    auto* c_lab = app.add_subcommand("lab", "inequality checks");
    std::string suite = "all";
    c_lab->add_option("--suite", suite,
                      "loewner|integral|hardy|ims|binding|all");

    CLI11_PARSE(app, argc, argv);
    apply_env_out(g);
    if (g.threads < 1) {
        std::fprintf(stderr, "parameter error: --threads must be >= 1\n");
        return 2;
    }

    try {
        if (c_solve->parsed()) return run_solve(g);
        if (c_tf->parsed()) return run_tf(g);
        if (c_scan->parsed()) return run_scan(g);
        if (c_screen->parsed()) return run_screen(g);
        if (c_radius->parsed()) return run_radius(g);
        if (c_lab->parsed()) return run_lab(g, suite);
    } catch (const pa::ParameterError& e) {
        std::fprintf(stderr, "parameter error: %s\n", e.what());
        return 2;
    } catch (const pa::DiagnosticError& e) {
        std::fprintf(stderr, "diagnostic error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    }
    return 2;
}
