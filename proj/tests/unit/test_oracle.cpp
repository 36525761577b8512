#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pcnls/errors.hpp"
#include "pcnls/oracle.hpp"
#include "pcnls/solver.hpp"
#include "support.hpp"

namespace pcnls {
namespace {

using oracle::tolerance;
using testing::random_field;
using testing::smooth_random_field;

std::vector<GridSpec> tiny_grids() {
    return {
        GridSpec::build(2, 1, {2.0, 3.0}, {7, 9}),
        GridSpec::build(3, 1, {2.0, 2.5, 3.0}, {5, 7, 9}),
        GridSpec::build(3, 2, {2.0}, {7, 7, 5}),
        GridSpec::build(4, 2, {2.0}, {5, 5, 5, 3}),
    };
}

TEST(Tolerances, RegistryLookup) {
    EXPECT_FALSE(oracle::tolerances().empty());
    EXPECT_EQ(tolerance("laplacian_apply").name, "laplacian_apply");
    EXPECT_THROW(tolerance("no_such_operation"), std::out_of_range);
    const auto& t = tolerance("nehari_scale");
    EXPECT_TRUE(t.accepts(1.0 + 0.5 * t.rel_tol, 1.0));
    EXPECT_FALSE(t.accepts(1.0 + 4.0 * t.rel_tol + t.abs_tol, 1.0));
}

TEST(DenseMatrix, SymmetricAndPositive) {
    for (const auto& g : tiny_grids()) {
        const auto a = oracle::dense_operator_matrix(potential_values(g));
        EXPECT_EQ(a.n, g.size());
        EXPECT_EQ(a.asymmetry(), 0.0);
        EXPECT_GT(oracle::dense_eigenvalues(a).front(), 0.0);
    }
    EXPECT_THROW(oracle::dense_operator_matrix(potential_values(GridSpec::build(2, 1, {4.0}, {65, 65}))),
                 ValidationError);
}

TEST(OracleAgreement, ShiftedOperatorAndLaplacian) {
    std::mt19937_64 rng(31);
    const auto& tol = tolerance("apply_shifted_operator");
    const auto& ltol = tolerance("laplacian_apply");
    for (const auto& g : tiny_grids()) {
        const Field v = potential_values(g);
        const auto a = oracle::dense_operator_matrix(v);
        const auto lap = oracle::dense_operator_matrix(Field(g));
        for (int trial = 0; trial < 10; ++trial) {
            const Field u = random_field(g, rng);
            const auto want = a.multiply(u.values());
            const Field got = apply_shifted_operator(u, v);
            const auto want_lap = lap.multiply(u.values());
            const Field got_lap = laplacian_apply(u);
            for (std::size_t i = 0; i < g.size(); ++i) {
                EXPECT_TRUE(tol.accepts(got[i], want[i])) << got[i] << " vs " << want[i];
                EXPECT_TRUE(ltol.accepts(-got_lap[i], want_lap[i]));
            }
        }
    }
}

TEST(OracleAgreement, ShiftedSolve) {
    std::mt19937_64 rng(32);
    const auto& tol = tolerance("solve_shifted_operator");
    for (const auto& g : tiny_grids()) {
        const Field v = potential_values(g);
        const auto a = oracle::dense_operator_matrix(v);
        const Field rhs = random_field(g, rng);
        const auto want = oracle::dense_solve(a, rhs.values());
        const auto got = solve_shifted_operator(v, rhs, 1e-13).solution;
        double scale = 0.0;
        for (double w : want) scale = std::max(scale, std::abs(w));
        for (std::size_t i = 0; i < g.size(); ++i) {
            EXPECT_TRUE(tol.accepts(got[i], want[i]) || std::abs(got[i] - want[i]) <= tol.rel_tol * scale);
        }
    }
}

TEST(OracleAgreement, GroundEigenvalue) {
    const auto& tol = tolerance("linear_ground_eigenpair");
    for (const auto& g : tiny_grids()) {
        const Field v = potential_values(g);
        const double want = oracle::dense_eigenvalues(oracle::dense_operator_matrix(v)).front();
        EXPECT_TRUE(tol.accepts(linear_ground_eigenpair(v, 1e-12).eigenvalue, want));
    }
}

TEST(OracleAgreement, SpectrumOfSeparableOperator) {
    // Without potential the spectrum is sums of 1D Dirichlet eigenvalues.
    const auto g = GridSpec::build(2, 1, {2.0, 3.0}, {7, 9});
    const auto ev = oracle::dense_eigenvalues(oracle::dense_operator_matrix(Field(g)));
    auto one_d = [&](int axis, int k) {
        const double h = g.spacing(axis);
        const double n = static_cast<double>(g.points(axis));
        const double s = std::sin(k * std::numbers::pi / (2.0 * (n + 1.0)));
        return 4.0 * s * s / (h * h);
    };
    EXPECT_NEAR(ev.front(), one_d(0, 1) + one_d(1, 1), 1e-12 * ev.front());
    EXPECT_NEAR(ev.back(), one_d(0, 7) + one_d(1, 9), 1e-12 * ev.back());
}

TEST(OracleAgreement, NehariScaleAndFiberingPeak) {
    std::mt19937_64 rng(33);
    const auto& root_tol = tolerance("nehari_scale");
    for (const auto& g : tiny_grids()) {
        const Field v = potential_values(g);
        for (const auto& model :
             {NonlinearityModel::pure_power(4.0), NonlinearityModel::from_terms({{1.0, 3.0}, {0.5, 5.0}})}) {
            const EnergyFunctional f(model, v);
            const Field u = random_field(g, rng);
            const auto scan = oracle::dense_scale_scan(u, model, v);
            EXPECT_EQ(scan.sign_changes, 1);
            const double t = f.nehari_scale(u);
            EXPECT_LE(std::abs(std::log(t / scan.t_root)), std::log(scan.resolution));
            EXPECT_LE(std::abs(std::log(f.fibering_max(u).t_max / scan.t_peak)), std::log(scan.resolution));
            EXPECT_GE(f.fibering_max(u).energy, scan.peak_energy * (1.0 - 1e-12));
            EXPECT_TRUE(root_tol.accepts(f.nehari_scale(2.0 * u), 0.5 * t));
        }
    }
}

TEST(OracleAgreement, GradientCheckOrder) {
    const auto g = GridSpec::build(2, 1, {2.0, 3.0}, {15, 19});
    std::mt19937_64 rng(34);
    const EnergyFunctional f(NonlinearityModel::from_terms({{1.0, 3.0}, {1.0, 4.0}}), potential_values(g));
    const Field u = smooth_random_field(g, rng);
    std::vector<Field> dirs;
    for (int i = 0; i < 3; ++i) dirs.push_back(smooth_random_field(g, rng));
    const double eps[] = {1e-3, 5e-4, 2.5e-4};
    const auto check = oracle::fd_gradient_check(f, u, dirs, eps);
    EXPECT_EQ(check.defects.size(), 3u);
    EXPECT_GE(check.observed_order, 1.9);
    EXPECT_LE(check.defects.back(), 1e-6 * (1.0 + std::abs(f.energy(u).total)));
}

TEST(OracleAgreement, ScanRejectsZeroField) {
    const auto g = tiny_grids().front();
    EXPECT_THROW(oracle::dense_scale_scan(Field(g), NonlinearityModel::pure_power(4.0), potential_values(g)),
                 DomainError);
}

}  // namespace
}  // namespace pcnls
