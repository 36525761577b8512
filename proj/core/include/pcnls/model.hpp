#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcnls/grid.hpp"

namespace pcnls {

/// One term a |s|^{p-2} s of the nonlinearity.
struct PowerTerm {
    double coefficient = 1.0;
    double exponent = 4.0;

    bool operator==(const PowerTerm&) const = default;
};

/// f(s) = sum_j a_j |s|^{p_j - 2} s with a_j > 0 and p_j > 2.
///
/// Restricting f to positive sums of pure powers makes the structural
/// hypotheses (superlinear at zero, subcritical growth, Ambrosetti-Rabinowitz
/// type bound, monotone f(s)/|s|) checkable in closed form; see
/// check_hypotheses().
class NonlinearityModel {
public:
    /// Throws ValidationError for an empty list, a_j <= 0 or p_j <= 2.
    static NonlinearityModel from_terms(std::vector<PowerTerm> terms);
    static NonlinearityModel pure_power(double exponent, double coefficient = 1.0);
    /// f == 0. Only meaningful for linear validation runs; it has no Nehari set.
    static NonlinearityModel zero();

    const std::vector<PowerTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_pure_power() const { return terms_.size() == 1; }

    /// gamma = min_j p_j.
    double gamma() const;
    /// (min_j p_j - 2, max_j p_j - 2).
    std::pair<double, double> sigma_bounds() const;

    double f(double s) const;
    double F(double s) const;
    double fprime(double s) const;

    bool operator==(const NonlinearityModel&) const = default;

private:
    std::vector<PowerTerm> terms_;
};

/// V(z) = x_1^2 + ... + x_m^2 with m = grid.confined_dims().
Field potential_values(const GridSpec& grid);
/// Harmonic potential over the first `confined` axes; `confined` may equal
/// grid.dims() (full confinement, used for validating the discretisation).
Field harmonic_potential(const GridSpec& grid, int confined);

struct HypothesisCheck {
    std::string name;  // "f1", "f2", "f3", "f4", "fprime_growth"
    bool passed = false;
    std::string detail;
};

struct HypothesisReport {
    std::vector<HypothesisCheck> checks;
    double gamma = 0.0;
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    /// C in f'(s) <= C (s^sigma1 + s^sigma2), s >= 0.
    double growth_constant = 0.0;
    /// 2N/(N-2), or nullopt for N = 2 where no upper bound applies.
    std::optional<double> critical_exponent;

    bool all_passed() const;
    /// Name of the first failing hypothesis, empty when all pass.
    std::string first_failure() const;
};

HypothesisReport check_hypotheses(const NonlinearityModel& model, int n_dims);

}  // namespace pcnls
