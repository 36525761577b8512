#include "pcnls/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "pcnls/analysis.hpp"
#include "pcnls/errors.hpp"
#include "pcnls/field_io.hpp"
#include "pcnls/oracle.hpp"
#include "pcnls/parallel.hpp"

namespace pcnls {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<NodalReport> nodal_sweep(const Field& u, const std::vector<double>& relative) {
    std::vector<NodalReport> out;
    const double peak = u.max_abs();
    for (double t : relative) out.push_back(count_nodal_domains(u, t * peak));
    return out;
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError(std::string(what) + ": cannot parse '" + item + "'");
        }
    }
    if (out.empty()) throw ValidationError(std::string(what) + ": empty list");
    return out;
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ValidationError("expected key=value, got '" + text + "'");
    }
    return {text.substr(0, eq), text.substr(eq + 1)};
}

std::string g17(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

// ---------------------------------------------------------------------------
// validation suite helpers

Field random_field(const GridSpec& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field u(grid);
    for (double& v : u.values()) v = dist(rng);
    return u;
}

// Random combination of the lowest few Dirichlet box modes.
Field smooth_random_field(const GridSpec& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> coeff(9);
    for (double& c : coeff) c = dist(rng);
    return Field::sample(grid, [&](std::span<const double> z) {
        double v = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double kx = (i + 1) * std::numbers::pi / (2.0 * grid.axis(0).half_width);
                const double ky = (j + 1) * std::numbers::pi / (2.0 * grid.axis(1).half_width);
                v += coeff[static_cast<std::size_t>(3 * i + j)] *
                     std::sin(kx * (z[0] + grid.axis(0).half_width)) *
                     std::sin(ky * (z[1] + grid.axis(1).half_width));
            }
        }
        return v;
    });
}

double max_relative_gap(std::span<const double> a, std::span<const double> b) {
    double scale = 0.0;
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, std::abs(b[i]));
        gap = std::max(gap, std::abs(a[i] - b[i]));
    }
    return gap / std::max(scale, 1e-300);
}

}  // namespace

ScenarioOutcome run_scenario(const RunConfig& config) {
    std::vector<std::pair<std::string, double>> timing;
    auto t0 = Clock::now();
    SolveResult result = config.starts > 1
                             ? multi_start(config.grid, config.model, config.solver, config.starts).best
                             : solve_constrained_ground_state(config.grid, config.model, config.solver);
    timing.emplace_back("solve", seconds_since(t0));

    t0 = Clock::now();
    std::vector<NodalReport> nodal = nodal_sweep(result.field, config.analysis.thresholds);
    timing.emplace_back("nodal", seconds_since(t0));

    std::vector<DipoleResult> dipole;
    if (!config.analysis.dipole_separations.empty()) {
        if (config.solver.constraint.kind() != SymmetryConstraint::Kind::FullSpace) {
            throw ValidationError("dipole study needs constraint.kind = full");
        }
        t0 = Clock::now();
        const EnergyFunctional functional(config.model, potential_values(config.grid));
        dipole = dipole_study(result.field, functional, config.analysis.dipole_separations);
        timing.emplace_back("dipole", seconds_since(t0));
    }
    return {std::move(result), std::move(nodal), std::move(dipole), std::move(timing)};
}

ScenarioOutcome run_and_emit(const RunConfig& config) {
    ScenarioOutcome o = run_scenario(config);
    RunOutputs outputs;
    outputs.field = &o.result.field;
    outputs.report = o.result.report;
    outputs.nodal = o.nodal;
    outputs.dipole = o.dipole;
    outputs.timing = o.timing;
    outputs.config_text = render_config(config);
    outputs.slices = config.output.slices;
    outputs.write_field = config.output.field;
    emit_report(config.output.dir, outputs);
    return o;
}

std::vector<ValidationCheck> validation_suite() {
    std::vector<ValidationCheck> checks;
    auto record = [&](std::string name, bool ok, std::string detail) {
        checks.push_back({std::move(name), ok, std::move(detail)});
    };
    std::mt19937_64 rng(20240611);

    // Dense operator against the matrix-free stencil.
    const GridSpec tiny = GridSpec::build(2, 1, {3.0}, {15});
    const Field v_tiny = potential_values(tiny);
    const oracle::DenseMatrix a = oracle::dense_operator_matrix(v_tiny);
    {
        double gap = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const Field x = random_field(tiny, rng);
            const Field y = apply_shifted_operator(x, v_tiny);
            gap = std::max(gap, max_relative_gap(y.values(), a.multiply(x.values())));
        }
        const auto& tol = oracle::tolerance("apply_shifted_operator");
        record("operator_vs_dense", gap <= tol.rel_tol, "max relative gap " + g17(gap));
        record("dense_symmetry", a.asymmetry() <= 1e-14, "max |A - A^T| " + g17(a.asymmetry()));
    }
    {
        const Field rhs = random_field(tiny, rng);
        const LinearSolve cg = solve_shifted_operator(v_tiny, rhs, 1e-12);
        const auto dense = oracle::dense_solve(a, rhs.values());
        const double gap = max_relative_gap(cg.solution.values(), dense);
        record("cg_vs_dense_solve", gap <= oracle::tolerance("solve_shifted_operator").rel_tol,
               "max relative gap " + g17(gap));
    }
    {
        const double dense = oracle::dense_eigenvalues(a).front();
        const Eigenpair ip = linear_ground_eigenpair(v_tiny, 1e-11);
        const double rel = std::abs(ip.eigenvalue - dense) / dense;
        record("eigenpair_vs_dense", rel <= oracle::tolerance("linear_ground_eigenpair").rel_tol,
               "inverse iteration " + g17(ip.eigenvalue) + ", dense " + g17(dense));
    }
    {
        const auto model = NonlinearityModel::pure_power(4.0);
        const EnergyFunctional functional(model, v_tiny);
        const Field u = random_field(tiny, rng);
        const double t = functional.nehari_scale(u);
        const auto scan = oracle::dense_scale_scan(u, model, v_tiny);
        const double rel = std::abs(scan.t_root - t) / t;
        const double resolution = scan.resolution - 1.0;
        record("nehari_scale_vs_scan",
               rel <= resolution && scan.sign_changes == 1 &&
                   std::abs(scan.t_peak - scan.t_root) / t <= resolution,
               "closed form " + g17(t) + ", scan " + g17(scan.t_root) + ", sign changes " +
                   std::to_string(scan.sign_changes));
    }
    {
        const auto model = NonlinearityModel::pure_power(4.0);
        const EnergyFunctional functional(model, v_tiny);
        Field u = smooth_random_field(tiny, rng);
        u *= functional.nehari_scale(u);
        std::vector<Field> dirs;
        for (int i = 0; i < 3; ++i) dirs.push_back(smooth_random_field(tiny, rng));
        const std::vector<double> eps{1e-2, 1e-3, 1e-4};
        const auto check = oracle::fd_gradient_check(functional, u, dirs, eps);
        const double bound = 1e-6 * (1.0 + std::abs(functional.energy(u).total));
        record("fd_gradient", check.observed_order >= 1.9 && check.defects.back() <= bound,
               "order " + g17(check.observed_order) + ", defect " + g17(check.defects.back()));
    }
    {
        const GridSpec g = GridSpec::build(2, 1, {8.0}, {127});
        const Eigenpair ip = linear_ground_eigenpair(potential_values(g), 1e-6);
        const double expected = 1.0 + std::pow(std::numbers::pi / 16.0, 2);
        record("oscillator_partial", std::abs(ip.eigenvalue - expected) <= 1e-2,
               "lambda " + g17(ip.eigenvalue) + ", expected " + g17(expected));
    }
    {
        const GridSpec g = GridSpec::build(2, 1, {8.0}, {127});
        const Eigenpair ip = linear_ground_eigenpair(harmonic_potential(g, 2), 1e-6);
        record("oscillator_full", std::abs(ip.eigenvalue - 2.0) <= 1e-2,
               "lambda " + g17(ip.eigenvalue) + ", expected 2");
    }
    return checks;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Positive and nodal ground states of -Lap u + |x|^2 u = f(u) under partial confinement",
                 "pcnls"};
    app.require_subcommand(1);
    std::vector<std::string> sets;

    std::string solve_config;
    std::string solve_out;
    auto* solve = app.add_subcommand("solve", "Run one configured scenario");
    solve->add_option("--config", solve_config, "Configuration file")->required();
    solve->add_option("--out", solve_out, "Output directory (overrides output.dir)");
    solve->add_option("--set", sets, "Override a configuration key, key=value");

    std::string analyze_field;
    std::string analyze_config;
    std::string analyze_thresholds;
    bool analyze_check = false;
    auto* analyze = app.add_subcommand("analyze", "Recompute diagnostics from a stored field");
    analyze->add_option("--field", analyze_field, "Field file (NLSF)")->required();
    analyze->add_option("--config", analyze_config,
                        "Configuration (default: config.txt next to the field)");
    analyze->add_option("--thresholds", analyze_thresholds,
                        "Comma-separated nodal thresholds relative to max|u|");
    analyze->add_flag("--check", analyze_check,
                      "Compare with summary.csv next to the field; exit 1 on mismatch");

    std::string dipole_config;
    std::string dipole_separations;
    std::string dipole_out;
    auto* dipole = app.add_subcommand("dipole", "Ground state followed by the dipole study");
    dipole->add_option("--config", dipole_config, "Configuration file")->required();
    dipole->add_option("--separations", dipole_separations, "Comma-separated separations")->required();
    dipole->add_option("--out", dipole_out, "Output directory (overrides output.dir)");

    auto* validate = app.add_subcommand("validate", "Run the oracle and eigenvalue validation suite");

    std::string sweep_config;
    std::string sweep_vary;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Repeat a scenario for several values of one key");
    sweep->add_option("--config", sweep_config, "Configuration file")->required();
    sweep->add_option("--vary", sweep_vary, "key=v1,v2,...")->required();
    sweep->add_option("--out", sweep_out, "Parent output directory (default: output.dir)");

    std::vector<std::string> argv_storage{"pcnls"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : argv_storage) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*solve) {
            std::vector<std::pair<std::string, std::string>> overrides;
            for (const auto& s : sets) overrides.push_back(split_assignment(s));
            if (!solve_out.empty()) overrides.emplace_back("output.dir", solve_out);
            const RunConfig config = load_config(solve_config, overrides);
            const ScenarioOutcome o = run_and_emit(config);
            out << summary_csv(o.result.report);
            if (!o.result.report.converged) {
                err << "solve: did not reach grad_tol within max_iters\n";
                return kExitFailure;
            }
            return kExitOk;
        }
        if (*analyze) {
            const std::filesystem::path field_path(analyze_field);
            const std::filesystem::path dir = field_path.parent_path();
            const RunConfig config =
                load_config(analyze_config.empty() ? dir / "config.txt" : std::filesystem::path(analyze_config));
            const Field u = read_field(field_path);
            if (!(u.grid() == config.grid)) {
                throw ValidationError("analyze: field grid does not match the configuration");
            }
            SolveReport report = diagnose_field(u, config.model, config.solver.constraint,
                                                config.solver.lin_tol);
            const std::filesystem::path stored_path = dir / "summary.csv";
            std::map<std::string, double> stored;
            if (std::filesystem::exists(stored_path)) {
                stored = parse_summary_csv(read_text_file(stored_path));
                // Iteration counts are a property of the run, not of the field.
                report.iterations = static_cast<int>(stored["iterations"]);
            }
            out << summary_csv(report);
            const auto thresholds = analyze_thresholds.empty()
                                        ? config.analysis.thresholds
                                        : parse_number_list(analyze_thresholds, "--thresholds");
            out << nodal_csv(nodal_sweep(u, thresholds), u.max_abs());
            if (analyze_check) {
                if (stored.empty()) throw ValidationError("analyze --check: no summary.csv next to the field");
                const auto recomputed = parse_summary_csv(summary_csv(report));
                bool ok = true;
                for (const auto& [name, value] : recomputed) {
                    const double want = stored.at(name);
                    if (std::abs(value - want) > 1e-12 * std::max(1.0, std::abs(want))) {
                        err << "analyze: " << name << " recomputed " << g17(value) << ", stored "
                            << g17(want) << "\n";
                        ok = false;
                    }
                }
                out << (ok ? "check: PASS\n" : "check: FAIL\n");
                return ok ? kExitOk : kExitFailure;
            }
            return kExitOk;
        }
        if (*dipole) {
            std::vector<std::pair<std::string, std::string>> overrides{
                {"analysis.dipole_separations", dipole_separations}};
            if (!dipole_out.empty()) overrides.emplace_back("output.dir", dipole_out);
            const RunConfig config = load_config(dipole_config, overrides);
            const ScenarioOutcome o = run_and_emit(config);
            out << dipole_csv(o.dipole);
            return o.result.report.converged ? kExitOk : kExitFailure;
        }
        if (*validate) {
            bool ok = true;
            for (const auto& c : validation_suite()) {
                out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
                ok = ok && c.passed;
            }
            return ok ? kExitOk : kExitFailure;
        }
        if (*sweep) {
            const auto [key, list] = split_assignment(sweep_vary);
            std::vector<std::string> values;
            std::stringstream ss(list);
            for (std::string v; std::getline(ss, v, ',');) {
                if (!v.empty()) values.push_back(v);
            }
            if (values.empty()) throw ValidationError("--vary: no values given");
            const RunConfig base = load_config(sweep_config);
            const std::filesystem::path parent = sweep_out.empty() ? base.output.dir : std::filesystem::path(sweep_out);
            std::vector<RunConfig> configs;
            for (const auto& v : values) {
                const std::string dir = (parent / (key + "=" + v)).string();
                configs.push_back(load_config(sweep_config, {{key, v}, {"output.dir", dir}}));
            }
            std::vector<std::optional<SolveReport>> reports(configs.size());
            run_tasks(configs.size(), [&](std::size_t i) { reports[i] = run_and_emit(configs[i]).result.report; });
            bool converged = true;
            out << "value,energy,nodal_total,converged,dir\n";
            for (std::size_t i = 0; i < configs.size(); ++i) {
                out << values[i] << "," << g17(reports[i]->final_energy) << "," << reports[i]->nodal_count
                    << "," << (reports[i]->converged ? 1 : 0) << "," << configs[i].output.dir.string() << "\n";
                converged = converged && reports[i]->converged;
            }
            return converged ? kExitOk : kExitFailure;
        }
    } catch (const ConfigError& e) {
        err << "configuration error:\n" << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace pcnls
