#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pcnls/grid.hpp"
#include "pcnls/model.hpp"
#include "pcnls/symmetry.hpp"
#include "pcnls/variational.hpp"

namespace pcnls {

struct FixedStep {
    double eta = 1.0;
};

struct ArmijoStep {
    double c1 = 1e-4;
    double backtrack = 0.5;
    double initial_step = 1.0;
    int max_backtracks = 40;
};

using StepRule = std::variant<FixedStep, ArmijoStep>;

struct InitSpec {
    enum class Kind { GaussianBump, Random, File };
    Kind kind = Kind::GaussianBump;
    std::vector<double> center;  // empty = origin
    double width = 1.0;
    std::string path;  // Kind::File
};

struct SolverConfig {
    int max_iters = 500;
    /// Stop when ||g||_H / ||u||_H <= grad_tol, g the Sobolev gradient.
    double grad_tol = 1e-6;
    StepRule step = ArmijoStep{};
    double lin_tol = 1e-9;
    std::uint64_t seed = 0;
    InitSpec init;
    SymmetryConstraint constraint = SymmetryConstraint::full_space();

    /// Throws ValidationError.
    void validate() const;
};

struct TraceEntry {
    double energy = 0.0;
    double residual = 0.0;  // ||g||_H / ||u||_H at this iterate
    double h_norm_sq = 0.0;
};

struct SolveReport {
    double final_energy = 0.0;
    double h_norm_sq = 0.0;
    double nehari_residual = 0.0;
    double grad_residual = 0.0;
    int iterations = 0;
    int nodal_count = 0;
    double symmetry_residual = 0.0;
    double decay_metric = 0.0;
    double min_interior_value = 0.0;
    bool converged = false;
    /// Interpolated (non grid-exact) symmetry group in use.
    bool approximate_symmetry = false;
    std::vector<TraceEntry> trace;
};

struct SolveResult {
    Field field;
    SolveReport report;
};

/// Checks that the constraint can be realised on the grid: group closure and
/// parity, matching axes, and odd node counts on every axis an odd
/// reflection acts on. Throws ValidationError.
void validate_constraint(const GridSpec& grid, const SymmetryConstraint& c);

/// Field-derived part of a SolveReport (everything except iterations,
/// convergence and trace), recomputed from scratch. The solver fills its
/// final report with this, so a stored field reproduces it exactly.
SolveReport diagnose_field(const Field& u, const NonlinearityModel& model,
                           const SymmetryConstraint& constraint, double lin_tol);

/// Seed field for the given constraint, before symmetrisation and projection.
Field initial_field(const GridSpec& grid, const SolverConfig& config, std::uint64_t seed);

/// Nehari-projected Sobolev-gradient descent inside the constraint's invariant
/// subspace. For the full space the truncated functional I_+ is minimised and
/// the absolute value returned, so the result is a nonnegative ground state.
SolveResult solve_constrained_ground_state(const GridSpec& grid, const NonlinearityModel& model,
                                           const SolverConfig& config);

struct MultiStartResult {
    SolveResult best;
    std::vector<SolveReport> reports;
    /// (max - min) / |min| of final energies over converged starts.
    double energy_spread = 0.0;
};

/// Runs seeds seed, seed+1, ..., seed+n_starts-1 and keeps the lowest-energy
/// converged run. Throws ConvergenceError if no start converges.
MultiStartResult multi_start(const GridSpec& grid, const NonlinearityModel& model,
                             const SolverConfig& config, int n_starts);

struct Eigenpair {
    double eigenvalue = 0.0;
    Field vector;  // L^2-normalised, nonnegative
    int iterations = 0;
    double residual = 0.0;  // ||A phi - lambda phi||_2
};

/// Inverse power iteration (shift 0) on -Delta_h + V.
Eigenpair linear_ground_eigenpair(const Field& potential, double tol, int max_iters = 2000);

}  // namespace pcnls
