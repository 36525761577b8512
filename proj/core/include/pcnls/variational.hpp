#pragma once

#include <vector>

#include "pcnls/grid.hpp"
#include "pcnls/model.hpp"

namespace pcnls {

struct EnergyBreakdown {
    double h_norm_sq = 0.0;       // kinetic_part + potential_part
    double potential_part = 0.0;  // int V u^2
    double kinetic_part = 0.0;    // int |grad u|^2
    double nonlinear_part = 0.0;  // int F(u)
    double total = 0.0;           // h_norm_sq / 2 - nonlinear_part
};

/// Which argument the primitive F is evaluated at. `PositivePart` gives the
/// truncated functional I_+(u) = ||u||^2/2 - int F(u^+), whose nontrivial
/// critical points are nonnegative.
enum class NonlinearPart { Full, PositivePart };

struct FiberingPeak {
    double t_max = 0.0;
    double energy = 0.0;  // I(t_max u)
};

struct LinearSolve {
    Field solution;
    int iterations = 0;
    double relative_residual = 0.0;
};

/// Q(u) = dirichlet_energy(u) + int V u^2.
double h_norm_sq(const Field& u, const Field& potential);
/// Polarisation (Q(u+v) - Q(u-v)) / 4 of the H norm.
double h_inner_product(const Field& u, const Field& v, const Field& potential);
/// (-Delta_h + V) u.
Field apply_shifted_operator(const Field& u, const Field& potential);

/// Jacobi-preconditioned conjugate gradients for (-Delta_h + V) x = rhs,
/// started from zero. Stops at ||rhs - A x||_2 <= tol ||rhs||_2.
/// Throws ConvergenceError past `max_iters` (0 selects a size-based cap).
LinearSolve solve_shifted_operator(const Field& potential, const Field& rhs, double tol,
                                   int max_iters = 0);

/// I(u) = ||u||^2/2 - int F(u) on a fixed grid and potential.
class EnergyFunctional {
public:
    EnergyFunctional(NonlinearityModel model, Field potential,
                     NonlinearPart part = NonlinearPart::Full);

    const NonlinearityModel& model() const { return model_; }
    const Field& potential() const { return potential_; }
    const GridSpec& grid() const { return potential_.grid(); }
    NonlinearPart part() const { return part_; }

    /// Throws NumericalError naming the non-finite part.
    EnergyBreakdown energy(const Field& u) const;

    /// L^2 representative -Delta_h u + V u - f(u) of I'(u).
    Field first_variation(const Field& u) const;

    /// Solution g of (-Delta_h + V) g = first_variation(u), i.e. the gradient
    /// of I in the H inner product.
    Field sobolev_gradient(const Field& u, double lin_tol) const;

    /// <I'(u), u> = ||u||^2 - int f(u) u.
    double nehari_residual(const Field& u) const;

    /// The unique t > 0 with t u on the Nehari set. Closed form for a single
    /// power, bracketed safeguarded Newton otherwise. Throws DomainError when
    /// u == 0 or the nonlinear moments vanish.
    double nehari_scale(const Field& u) const;

    /// Maximiser of t -> I(t u) by log-grid bracketing over [1e-6, 1e6] and
    /// golden-section refinement. Independent of nehari_scale().
    FiberingPeak fibering_max(const Field& u) const;

    /// Scalar data for t -> I(t u): Q(u) and a_j int |u|^{p_j} per term.
    struct Moments {
        double q = 0.0;
        std::vector<double> weighted;  // a_j int |w|^{p_j}, w = u or u^+
    };
    Moments moments(const Field& u) const;
    double fibering_energy(const Moments& m, double t) const;
    double fibering_residual(const Moments& m, double t) const;

private:
    double nonlinear_argument(double s) const {
        return part_ == NonlinearPart::PositivePart ? (s > 0.0 ? s : 0.0) : s;
    }

    NonlinearityModel model_;
    Field potential_;
    NonlinearPart part_;
};

}  // namespace pcnls
