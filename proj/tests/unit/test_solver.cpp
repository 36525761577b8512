#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "pcnls/analysis.hpp"
#include "pcnls/errors.hpp"
#include "pcnls/field_io.hpp"
#include "pcnls/solver.hpp"
#include "support.hpp"

namespace pcnls {
namespace {

using testing::bitwise_equal;

GridSpec small2d() { return GridSpec::build(2, 1, {4.0, 6.0}, {31, 47}); }
GridSpec small3d() { return GridSpec::build(3, 2, {4.0, 4.0, 5.0}, {23, 23, 29}); }

SolverConfig base_config() {
    SolverConfig c;
    c.grad_tol = 1e-6;
    c.seed = 3;
    return c;
}

TEST(SolverConfig, RejectsBadValues) {
    EXPECT_NO_THROW(base_config().validate());
    auto c = base_config();
    c.grad_tol = 0.0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = base_config();
    c.max_iters = -1;
    EXPECT_THROW(c.validate(), ValidationError);
    c = base_config();
    c.step = FixedStep{-1.0};
    EXPECT_THROW(c.validate(), ValidationError);
    c = base_config();
    c.step = ArmijoStep{.c1 = 1.5};
    EXPECT_THROW(c.validate(), ValidationError);
    c = base_config();
    c.init.kind = InitSpec::Kind::File;
    EXPECT_THROW(c.validate(), ValidationError);
    c = base_config();
    c.lin_tol = 1.0;
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(ValidateConstraint, OddReflectionsNeedOddNodeCounts) {
    const auto even = GridSpec::build(3, 2, {4.0}, {22, 23, 23});
    EXPECT_THROW(validate_constraint(even, SymmetryConstraint::k_odd(1)), ValidationError);
    EXPECT_NO_THROW(validate_constraint(even, SymmetryConstraint::full_space()));
    EXPECT_NO_THROW(validate_constraint(small3d(), SymmetryConstraint::k_odd(2)));
    EXPECT_THROW(validate_constraint(small3d(), SymmetryConstraint::k_odd(3)), ValidationError);
}

TEST(Eigenpair, OscillatorWithDirichletBox) {
    // Harmonic oscillator in x_1 (lambda = 1) plus the box mode in y.
    const auto g = GridSpec::build(2, 1, {6.0, 6.0}, {95, 95});
    const auto ep = linear_ground_eigenpair(potential_values(g), 1e-10);
    const double exact = 1.0 + std::pow(std::numbers::pi / 12.0, 2);
    EXPECT_NEAR(ep.eigenvalue, exact, 1e-2);
    EXPECT_NEAR(l2_norm(ep.vector), 1.0, 1e-12);
    EXPECT_GE(min_value(ep.vector), 0.0);
    EXPECT_LE(ep.residual, 1e-8);
}

TEST(Eigenpair, RejectsBadArguments) {
    const auto g = small2d();
    EXPECT_THROW(linear_ground_eigenpair(potential_values(g), 0.0), ValidationError);
    EXPECT_THROW(linear_ground_eigenpair(potential_values(g), 1e-10, 0), ValidationError);
    EXPECT_THROW(linear_ground_eigenpair(potential_values(g), 1e-14, 1), ConvergenceError);
}

TEST(InitialField, SymmetryFactorsAndFileGrid) {
    const auto g = small3d();
    auto c = base_config();
    c.constraint = SymmetryConstraint::k_odd(2);
    const Field u = initial_field(g, c, 1);
    EXPECT_LE(symmetry_residual(u, c.constraint), 1e-14);
    c.init.kind = InitSpec::Kind::Random;
    EXPECT_FALSE(bitwise_equal(initial_field(g, c, 1), initial_field(g, c, 2)));
    EXPECT_TRUE(bitwise_equal(initial_field(g, c, 1), initial_field(g, c, 1)));

    const auto path = std::filesystem::temp_directory_path() / "pcnls_solver_init.nlsf";
    write_field(path, Field(small2d()));
    c.init.kind = InitSpec::Kind::File;
    c.init.path = path.string();
    EXPECT_THROW(initial_field(g, c, 1), ValidationError);
    std::filesystem::remove(path);
}

TEST(Solver, ZeroModelIsRejected) {
    EXPECT_THROW(solve_constrained_ground_state(small2d(), NonlinearityModel::zero(), base_config()),
                 ValidationError);
}

struct GroundState2d : ::testing::Test {
    static void SetUpTestSuite() {
        result = new SolveResult(solve_constrained_ground_state(
            small2d(), NonlinearityModel::pure_power(4.0), base_config()));
    }
    static void TearDownTestSuite() {
        delete result;
        result = nullptr;
    }
    static SolveResult* result;
};
SolveResult* GroundState2d::result = nullptr;

TEST_F(GroundState2d, ConvergesToAPositiveNehariPoint) {
    const auto& r = result->report;
    ASSERT_TRUE(r.converged);
    EXPECT_LE(r.grad_residual, 1e-6);
    EXPECT_LE(r.nehari_residual, 1e-10);
    EXPECT_GT(r.final_energy, 0.0);
    EXPECT_GT(r.min_interior_value, 0.0);
    EXPECT_EQ(r.nodal_count, 1);
    EXPECT_NEAR(r.final_energy, 0.25 * r.h_norm_sq, 1e-10 * r.final_energy);
}

TEST_F(GroundState2d, TraceEnergiesDecrease) {
    const auto& trace = result->report.trace;
    ASSERT_GE(trace.size(), 2u);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        EXPECT_LE(trace[i].energy, trace[i - 1].energy + 1e-12 * std::abs(trace[i - 1].energy));
    }
    EXPECT_EQ(result->report.iterations + 1, static_cast<int>(trace.size()));
}

TEST_F(GroundState2d, BelowEveryProjectedTrialFunction) {
    const auto g = small2d();
    const EnergyFunctional f(NonlinearityModel::pure_power(4.0), potential_values(g));
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const Field w = testing::smooth_random_field(g, rng);
        EXPECT_GE(f.fibering_max(w).energy, result->report.final_energy * (1.0 - 1e-9));
    }
    for (double width : {0.5, 1.0, 2.0}) {
        EXPECT_GE(f.fibering_max(testing::gaussian(g, width)).energy, result->report.final_energy);
    }
}

TEST_F(GroundState2d, DiagnoseReproducesReport) {
    const auto d = diagnose_field(result->field, NonlinearityModel::pure_power(4.0),
                                  SymmetryConstraint::full_space(), base_config().lin_tol);
    EXPECT_EQ(d.final_energy, result->report.final_energy);
    EXPECT_EQ(d.grad_residual, result->report.grad_residual);
    EXPECT_EQ(d.nodal_count, result->report.nodal_count);
    EXPECT_EQ(d.decay_metric, result->report.decay_metric);
}

TEST_F(GroundState2d, ReproducibleBitForBit) {
    const auto again =
        solve_constrained_ground_state(small2d(), NonlinearityModel::pure_power(4.0), base_config());
    EXPECT_TRUE(bitwise_equal(again.field, result->field));
    EXPECT_EQ(again.report.iterations, result->report.iterations);
}

TEST_F(GroundState2d, FixedStepReachesTheSameLevel) {
    auto c = base_config();
    c.step = FixedStep{0.5};
    c.max_iters = 2000;
    const auto r = solve_constrained_ground_state(small2d(), NonlinearityModel::pure_power(4.0), c);
    ASSERT_TRUE(r.report.converged);
    EXPECT_NEAR(r.report.final_energy, result->report.final_energy, 1e-8 * r.report.final_energy);
}

TEST(Solver, IterationCapReportsNonConvergence) {
    auto c = base_config();
    c.max_iters = 1;
    const auto r = solve_constrained_ground_state(small2d(), NonlinearityModel::pure_power(4.0), c);
    EXPECT_FALSE(r.report.converged);
    EXPECT_EQ(r.report.iterations, 1);
}

TEST(Solver, KOddOneHasTwoDomainsAndExactZeros) {
    auto c = base_config();
    c.constraint = SymmetryConstraint::k_odd(1);
    const auto g = small3d();
    const auto r = solve_constrained_ground_state(g, NonlinearityModel::pure_power(4.0), c);
    ASSERT_TRUE(r.report.converged);
    EXPECT_EQ(r.report.nodal_count, 2);
    EXPECT_EQ(r.report.symmetry_residual, 0.0);
    std::vector<std::size_t> idx(3);
    for (std::size_t p = 0; p < g.size(); ++p) {
        g.unflatten(p, idx);
        if (idx[0] == 11) EXPECT_EQ(r.field[p], 0.0);
    }
    auto full = base_config();
    const auto ground = solve_constrained_ground_state(g, NonlinearityModel::pure_power(4.0), full);
    EXPECT_GT(r.report.final_energy, ground.report.final_energy);
}

TEST(MultiStart, KeepsTheLowestConvergedRun) {
    auto c = base_config();
    c.init.kind = InitSpec::Kind::Random;
    const auto m = multi_start(small2d(), NonlinearityModel::pure_power(4.0), c, 3);
    ASSERT_EQ(m.reports.size(), 3u);
    for (const auto& r : m.reports) {
        if (r.converged) EXPECT_LE(m.best.report.final_energy, r.final_energy);
    }
    EXPECT_GE(m.energy_spread, 0.0);
    EXPECT_LE(m.energy_spread, 1e-6);
    EXPECT_THROW(multi_start(small2d(), NonlinearityModel::pure_power(4.0), c, 0), ValidationError);
}

}  // namespace
}  // namespace pcnls
