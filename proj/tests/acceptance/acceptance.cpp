// One test per acceptance criterion; each prints a single PASS/FAIL line.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "pcnls/analysis.hpp"
#include "pcnls/cli.hpp"
#include "pcnls/config.hpp"
#include "pcnls/field_io.hpp"
#include "pcnls/oracle.hpp"
#include "pcnls/report.hpp"
#include "pcnls/solver.hpp"
#include "pcnls/symmetry.hpp"

namespace pcnls {
namespace {

namespace fs = std::filesystem;

/// Prints "criterion N: PASS|FAIL <title>" plus the collected details when
/// the enclosing test ends.
class Verdict {
public:
    Verdict(int number, std::string title) : number_(number), title_(std::move(title)) {}
    ~Verdict() {
        const bool failed = ::testing::Test::HasFailure();
        std::printf("criterion %d: %s %s\n", number_, failed ? "FAIL" : "PASS", title_.c_str());
        std::printf("%s", notes_.str().c_str());
        std::fflush(stdout);
    }
    template <class T>
    Verdict& note(const std::string& name, const T& value) {
        notes_.precision(6);
        notes_ << "    " << name << " = " << value << "\n";
        return *this;
    }

private:
    int number_;
    std::string title_;
    std::ostringstream notes_;
};

RunConfig scenario(const std::string& name) { return load_config(fs::path(PCNLS_CONFIG_DIR) / name); }

SolveResult solve(const RunConfig& c) { return solve_constrained_ground_state(c.grid, c.model, c.solver); }

/// Lazily solved scenarios shared between criteria.
const SolveResult& cached(const std::string& name) {
    static std::map<std::string, std::unique_ptr<SolveResult>> cache;
    auto& slot = cache[name];
    if (!slot) slot = std::make_unique<SolveResult>(solve(scenario(name)));
    return *slot;
}

Field random_field(const GridSpec& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field u(g);
    for (double& v : u.values()) v = dist(rng);
    return u;
}

Field smooth_field(const GridSpec& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double a = dist(rng), b = dist(rng), c = dist(rng);
    return Field::sample(g, [&](std::span<const double> z) {
        double r2 = 0.0;
        for (double x : z) r2 += x * x;
        return (1.0 + a * z[0] + b * z[1] + c * z[0] * z[1]) * std::exp(-0.5 * r2);
    });
}

// ---------------------------------------------------------------------------

TEST(Acceptance, C1_DiscretizationValidity) {
    Verdict v(1, "discretization validity (oscillator eigenvalues)");
    const auto g = GridSpec::build(2, 1, {8.0, 8.0}, {255, 255});
    const Eigenpair partial = linear_ground_eigenpair(potential_values(g), 1e-10);
    const double expected = 1.0 + std::pow(std::numbers::pi / 16.0, 2);
    v.note("lambda_partial", partial.eigenvalue).note("expected_partial", expected);
    EXPECT_LE(std::abs(partial.eigenvalue - expected), 1e-2);

    // Full confinement: the same N = 2 grid with V = x_1^2 + x_2^2.
    const Eigenpair full = linear_ground_eigenpair(harmonic_potential(g, 2), 1e-10);
    v.note("lambda_full", full.eigenvalue);
    EXPECT_LE(std::abs(full.eigenvalue - 2.0), 1e-2);
}

TEST(Acceptance, C2_CalculusIdentities) {
    Verdict v(2, "calculus identities (summation by parts, gradient check)");
    const auto g = GridSpec::build(3, 2, {3.0, 3.0, 4.0}, {17, 19, 21});
    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Field u = random_field(g, rng);
        const double lhs = -integrate_product(u, laplacian_apply(u));
        const double rhs = dirichlet_energy(u);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    v.note("sbp_max_rel", worst);
    EXPECT_LE(worst, 1e-12);

    const auto g2 = GridSpec::build(2, 1, {4.0, 5.0}, {39, 49});
    const EnergyFunctional f(NonlinearityModel::pure_power(4.0), potential_values(g2));
    Field u = smooth_field(g2, rng);
    u *= f.nehari_scale(u);
    std::vector<Field> dirs;
    for (int i = 0; i < 4; ++i) dirs.push_back(smooth_field(g2, rng));
    const std::vector<double> eps{1e-2, 1e-3, 1e-4};
    const auto check = oracle::fd_gradient_check(f, u, dirs, eps);
    const double bound = 1e-6 * (1.0 + std::abs(f.energy(u).total));
    v.note("observed_order", check.observed_order).note("defect", check.defects.back()).note("bound", bound);
    EXPECT_GE(check.observed_order, 1.9);
    EXPECT_LE(check.defects.back(), bound);
}

TEST(Acceptance, C3_NehariMachinery) {
    Verdict v(3, "Nehari machinery (closed form, root finder, scan, energy identity)");
    const auto g = GridSpec::build(2, 1, {3.0, 4.0}, {23, 31});
    const Field pot = potential_values(g);
    const auto model = NonlinearityModel::pure_power(4.0);
    const EnergyFunctional f(model, pot);
    std::mt19937_64 rng(3);
    double worst_root = 0.0, worst_scan = 0.0, worst_peak = 0.0, resolution = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Field u = random_field(g, rng);
        const double t = f.nehari_scale(u);
        // Bisection on phi(t) = Q(u) - t^2 int u^4, from quantities computed here.
        double q = -integrate_product(u, laplacian_apply(u)) + integrate_product(u, hadamard(pot, u));
        double m4 = 0.0;
        for (double x : u.values()) m4 += x * x * x * x;
        m4 *= g.cell_volume();
        double lo = 1e-6, hi = 1e6;
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            (q - mid * mid * m4 > 0.0 ? lo : hi) = mid;
        }
        worst_root = std::max(worst_root, std::abs(t - lo) / lo);
        const auto scan = oracle::dense_scale_scan(u, model, pot);
        resolution = scan.resolution;
        EXPECT_EQ(scan.sign_changes, 1);
        worst_scan = std::max(worst_scan, std::abs(std::log(t / scan.t_root)));
        worst_peak = std::max(worst_peak, std::abs(std::log(scan.t_peak / scan.t_root)));
        worst_peak = std::max(worst_peak, std::abs(f.fibering_max(u).t_max - t) / t);
    }
    v.note("closed_vs_bisection_rel", worst_root).note("closed_vs_scan_log", worst_scan);
    v.note("peak_vs_root", worst_peak).note("scan_log_resolution", std::log(resolution));
    EXPECT_LE(worst_root, 1e-8);
    EXPECT_LE(worst_scan, std::log(resolution));
    EXPECT_LE(worst_peak, std::log(resolution));

    // Every projected iterate of a solve satisfies I = (1/2 - 1/p) ||u||^2.
    for (const char* name : {"ground_state_2d.conf", "kodd1_3d.conf"}) {
        const auto& trace = cached(name).report.trace;
        double worst_identity = 0.0;
        for (const auto& e : trace) {
            worst_identity = std::max(worst_identity, std::abs(e.energy - 0.25 * e.h_norm_sq) / e.energy);
        }
        v.note(std::string("identity_rel[") + name + "]", worst_identity);
        EXPECT_LE(worst_identity, 1e-10);
        EXPECT_GT(trace.size(), 1u);
    }
}

TEST(Acceptance, C4_PositiveGroundState) {
    Verdict v(4, "positive ground state (N=2, m=1, p=4)");
    const RunConfig c = scenario("ground_state_2d.conf");
    ASSERT_EQ(c.grid.points(0), 127u);
    ASSERT_EQ(c.grid.points(1), 191u);
    ASSERT_EQ(c.solver.grad_tol, 1e-6);
    const auto& r = cached("ground_state_2d.conf");
    const Field& u = r.field;
    const GridSpec& g = u.grid();
    v.note("converged", r.report.converged).note("iterations", r.report.iterations);
    v.note("energy", r.report.final_energy).note("min", r.report.min_interior_value);
    EXPECT_TRUE(r.report.converged);
    EXPECT_GT(min_value(u), 0.0);

    const int nodal = count_nodal_domains(u, default_nodal_threshold(u)).total();
    v.note("nodal_total", nodal);
    EXPECT_EQ(nodal, 1);

    const double reflection = transform_residual(u, SignedPermutation::reflection(2, 0), 1);
    v.note("x_reflection_residual", reflection);
    EXPECT_LE(reflection, 1e-3);

    const auto com = center_of_mass(u);
    const auto y = radial_symmetry_residual(u, RadialBlock::y_block(g), com);
    const auto x = radial_symmetry_residual(u, RadialBlock::x_block(g));
    v.note("y_center", com[0]).note("y_radial_residual", y.residual);
    v.note("x_monotonicity_defect", x.monotonicity_defect).note("y_monotonicity_defect", y.monotonicity_defect);
    EXPECT_LE(y.residual, 1e-2);
    EXPECT_LE(x.monotonicity_defect, 1e-2 * u.max_abs());
    EXPECT_LE(y.monotonicity_defect, 1e-2 * u.max_abs());

    const double decay = decay_metric(u);
    v.note("decay_metric", decay);
    EXPECT_LE(decay, 1e-4);
}

bool zero_on_hyperplanes(const Field& u, int k, double* worst) {
    const GridSpec& g = u.grid();
    std::vector<std::size_t> idx(static_cast<std::size_t>(g.dims()));
    *worst = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        g.unflatten(p, idx);
        for (int a = 0; a < k; ++a) {
            if (2 * idx[a] + 1 == g.points(a)) *worst = std::max(*worst, std::abs(u[p]));
        }
    }
    return *worst <= 1e-12;
}

TEST(Acceptance, C5_KOddNodalCounts) {
    Verdict v(5, "k-odd nodal counts (N=3, m=2, p=4)");
    const double c = cached("ground_state_3d.conf").report.final_energy;
    v.note("c", c);
    EXPECT_GT(c, 0.0);
    for (int k : {1, 2}) {
        const std::string name = "kodd" + std::to_string(k) + "_3d.conf";
        const auto& r = cached(name);
        const Field& u = r.field;
        const int nodal = count_nodal_domains(u, 1e-6 * u.max_abs()).total();
        double worst = 0.0;
        const bool zeros = zero_on_hyperplanes(u, k, &worst);
        const std::string tag = "[k=" + std::to_string(k) + "]";
        v.note("converged" + tag, r.report.converged).note("nodal_total" + tag, nodal);
        v.note("hyperplane_max" + tag, worst).note("m_k" + tag, r.report.final_energy);
        EXPECT_TRUE(r.report.converged);
        EXPECT_EQ(nodal, 1 << k);
        EXPECT_TRUE(zeros);
        EXPECT_GE(r.report.final_energy, c - 1e-6);
    }
}

TEST(Acceptance, C6_CyclicSaddle) {
    Verdict v(6, "cyclic-odd saddle (l=2, N=3, m=2, p=4)");
    const RunConfig cfg = scenario("cyclic2_3d.conf");
    const auto& r = cached("cyclic2_3d.conf");
    const Field& u = r.field;
    const int nodal = count_nodal_domains(u, 1e-6 * u.max_abs()).total();
    v.note("converged", r.report.converged).note("nodal_total", nodal);
    EXPECT_TRUE(r.report.converged);
    EXPECT_EQ(nodal, 4);

    double worst_axis = 0.0;
    for (const auto& axis : cyclic_symmetry_axes(2)) {
        worst_axis = std::max(worst_axis, transform_residual(u, axis, 1));
    }
    v.note("axis_reflection_residual", worst_axis);
    EXPECT_LE(worst_axis, 1e-3);

    const Field sector = fold_sector(u, 2);
    const Field back = unfold_sector(sector, 2);
    double round_trip = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) round_trip = std::max(round_trip, std::abs(back[i] - u[i]));
    v.note("round_trip_max", round_trip);
    EXPECT_LE(round_trip, 1e-14);

    const EnergyFunctional f(cfg.model, potential_values(u.grid()));
    const double full = f.energy(back).total;
    const double sec = sector_energy(sector, 2, f);
    v.note("I_unfold", full).note("I_sector", sec);
    EXPECT_LE(std::abs(full - sec), 1e-10 * std::abs(full));
}

TEST(Acceptance, C7_DipoleMechanism) {
    Verdict v(7, "dipole construction (gap to 2c, splitting identity)");
    const RunConfig cfg = scenario("dipole_2d.conf");
    ASSERT_EQ(cfg.grid.axis(1).half_width, 24.0);
    const auto& r = cached("dipole_2d.conf");
    EXPECT_TRUE(r.report.converged);
    const EnergyFunctional f(cfg.model, potential_values(cfg.grid));
    const std::vector<double> seps{2.0, 4.0, 6.0, 8.0};
    const auto study = dipole_study(r.field, f, seps);
    for (std::size_t i = 0; i < study.size(); ++i) {
        v.note("gap[k=" + std::to_string(static_cast<int>(seps[i])) + "]", study[i].gap);
        if (i > 0) EXPECT_LE(study[i].gap, study[i - 1].gap);
    }
    EXPECT_LE(study.back().gap, 0.05 * study.back().two_c);

    // Hard-truncated ground state, translated beyond its support.
    const Field& u = r.field;
    const Field cut = truncate_below(u, 1e-3 * u.max_abs());
    const GridSpec& g = cut.grid();
    std::vector<std::size_t> idx(2);
    double reach = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (cut[p] == 0.0) continue;
        g.unflatten(p, idx);
        reach = std::max(reach, std::abs(g.coordinate(1, idx[1])));
    }
    const double h = g.spacing(1);
    const double k = h * std::ceil((reach + h) / h);
    v.note("support_reach", reach).note("separation", k);
    ASSERT_LT(k + reach, g.axis(1).half_width);
    const double ks[] = {k};
    const auto split = dipole_study(cut, f, ks).front();
    const double rel = std::abs(split.raw_energy - split.two_c) / split.two_c;
    v.note("overlap", split.overlap).note("identity_rel", rel);
    EXPECT_EQ(split.overlap, 0.0);
    EXPECT_LE(rel, 1e-12);
}

TEST(Acceptance, C8_DeterminismAndIo) {
    Verdict v(8, "determinism and I/O");
    const fs::path root = fs::temp_directory_path() / "pcnls_acceptance_c8";
    fs::remove_all(root);
    const std::string config = (fs::path(PCNLS_CONFIG_DIR) / "ground_state_2d.conf").string();
    std::ostringstream out, err;
    for (const char* run : {"a", "b"}) {
        const int code = run_cli({"solve", "--config", config, "--out", (root / run).string()}, out, err);
        EXPECT_EQ(code, kExitOk) << err.str();
    }
    const bool same_field = read_text_file(root / "a" / "field.nlsf") == read_text_file(root / "b" / "field.nlsf");
    const bool same_summary = read_text_file(root / "a" / "summary.csv") == read_text_file(root / "b" / "summary.csv");
    v.note("field_bit_identical", same_field).note("summary_identical", same_summary);
    EXPECT_TRUE(same_field);
    EXPECT_TRUE(same_summary);

    const Field u = read_field(root / "a" / "field.nlsf");
    write_field(root / "copy.nlsf", u);
    const bool round_trip = read_text_file(root / "copy.nlsf") == read_text_file(root / "a" / "field.nlsf") &&
                            encode_field(read_field(root / "copy.nlsf")) == encode_field(u);
    v.note("round_trip_bit_exact", round_trip);
    EXPECT_TRUE(round_trip);

    std::ostringstream aout, aerr;
    const int code = run_cli({"analyze", "--field", (root / "a" / "field.nlsf").string(), "--check"}, aout, aerr);
    v.note("analyze_check_exit", code);
    EXPECT_EQ(code, kExitOk) << aerr.str();
    EXPECT_NE(aout.str().find("check: PASS"), std::string::npos);
    fs::remove_all(root);
}

TEST(Acceptance, C9_HypothesisChecker) {
    Verdict v(9, "hypothesis checker");
    const auto quartic = check_hypotheses(NonlinearityModel::pure_power(4.0), 3);
    const auto mixed = check_hypotheses(NonlinearityModel::from_terms({{1.0, 3.0}, {1.0, 5.0}}), 3);
    const auto seventh = check_hypotheses(NonlinearityModel::pure_power(7.0), 3);
    v.note("p4_N3", quartic.all_passed()).note("p3+p5_N3", mixed.all_passed());
    v.note("p7_N3_first_failure", seventh.first_failure());
    EXPECT_TRUE(quartic.all_passed());
    EXPECT_TRUE(mixed.all_passed());
    EXPECT_FALSE(seventh.all_passed());
    EXPECT_EQ(seventh.first_failure(), "f2");
}

}  // namespace
}  // namespace pcnls
