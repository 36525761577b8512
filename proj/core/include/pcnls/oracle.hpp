#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pcnls/grid.hpp"
#include "pcnls/model.hpp"
#include "pcnls/variational.hpp"

namespace pcnls::oracle {

/// Brute-force references for the main build. Nothing here calls the
/// operation it is meant to check: matrices are assembled from the stencil
/// directly and scalar roots are found by exhaustive scans.

/// Tolerance pairing for one main-build operation.
struct OracleTolerance {
    std::string name;
    double abs_tol = 0.0;
    double rel_tol = 0.0;

    /// |got - want| <= abs_tol + rel_tol |want|.
    bool accepts(double got, double want) const;
};

/// Every registered tolerance.
const std::vector<OracleTolerance>& tolerances();
/// Throws std::out_of_range for an unknown name.
const OracleTolerance& tolerance(const std::string& name);

inline constexpr std::size_t kMaxDensePoints = 4096;

/// Row-major square matrix.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> entries;

    double operator()(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
    double& operator()(std::size_t i, std::size_t j) { return entries[i * n + j]; }
    std::vector<double> multiply(std::span<const double> x) const;
    double asymmetry() const;  // max |A - A^T|
};

/// Explicit matrix of -Delta_h + V on the interior nodes. Throws
/// ValidationError above kMaxDensePoints nodes.
DenseMatrix dense_operator_matrix(const Field& potential);

/// Cholesky solve A x = b. Throws NumericalError if A is not positive definite.
std::vector<double> dense_solve(const DenseMatrix& a, std::span<const double> rhs);

/// All eigenvalues in ascending order (symmetric eigensolver).
std::vector<double> dense_eigenvalues(const DenseMatrix& a);

struct ScaleScan {
    double t_root = 0.0;       // grid point minimising |<I'(tu), tu>| / (t^2 Q(u))
    double t_peak = 0.0;       // grid point maximising I(tu)
    double peak_energy = 0.0;  // I(t_peak u)
    int sign_changes = 0;      // sign changes of the Nehari residual along the grid
    double resolution = 0.0;   // ratio between neighbouring grid points
};

/// Evaluates t -> I(tu) and the Nehari residual on `samples` log-spaced
/// points over [t_lo, t_hi]. Q(u) is recomputed from an explicit edge loop.
/// Throws DomainError for u == 0.
ScaleScan dense_scale_scan(const Field& u, const NonlinearityModel& model, const Field& potential,
                           NonlinearPart part = NonlinearPart::Full, std::size_t samples = 10000,
                           double t_lo = 1e-6, double t_hi = 1e6);

struct GradientCheck {
    std::vector<double> epsilons;
    std::vector<double> defects;  // max over directions, per epsilon
    double max_defect = 0.0;
    /// Smallest log(d_i / d_{i+1}) / log(e_i / e_{i+1}) over consecutive epsilons.
    double observed_order = 0.0;
};

/// Central differences (I(u + e v) - I(u - e v)) / (2e) against
/// int v first_variation(u) for every direction v.
GradientCheck fd_gradient_check(const EnergyFunctional& functional, const Field& u,
                                std::span<const Field> directions, std::span<const double> epsilons);

}  // namespace pcnls::oracle
