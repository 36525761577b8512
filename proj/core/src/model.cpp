#include "pcnls/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pcnls/errors.hpp"

namespace pcnls {

NonlinearityModel NonlinearityModel::from_terms(std::vector<PowerTerm> terms) {
    if (terms.empty()) throw ValidationError("model: at least one power term required");
    for (const auto& t : terms) {
        if (!(t.coefficient > 0.0) || !std::isfinite(t.coefficient)) {
            throw ValidationError("model: coefficients must be positive");
        }
        if (!(t.exponent > 2.0) || !std::isfinite(t.exponent)) {
            std::ostringstream msg;
            msg << "model: exponent " << t.exponent << " must exceed 2";
            throw ValidationError(msg.str());
        }
    }
    NonlinearityModel m;
    m.terms_ = std::move(terms);
    return m;
}

NonlinearityModel NonlinearityModel::pure_power(double exponent, double coefficient) {
    return from_terms({PowerTerm{coefficient, exponent}});
}

NonlinearityModel NonlinearityModel::zero() { return NonlinearityModel{}; }

double NonlinearityModel::gamma() const {
    if (terms_.empty()) return 0.0;
    double g = terms_.front().exponent;
    for (const auto& t : terms_) g = std::min(g, t.exponent);
    return g;
}

std::pair<double, double> NonlinearityModel::sigma_bounds() const {
    if (terms_.empty()) return {0.0, 0.0};
    double lo = terms_.front().exponent, hi = lo;
    for (const auto& t : terms_) {
        lo = std::min(lo, t.exponent);
        hi = std::max(hi, t.exponent);
    }
    return {lo - 2.0, hi - 2.0};
}

double NonlinearityModel::f(double s) const {
    const double a = std::abs(s);
    double out = 0.0;
    for (const auto& t : terms_) out += t.coefficient * std::pow(a, t.exponent - 2.0) * s;
    return out;
}

double NonlinearityModel::F(double s) const {
    const double a = std::abs(s);
    double out = 0.0;
    for (const auto& t : terms_) out += t.coefficient / t.exponent * std::pow(a, t.exponent);
    return out;
}

double NonlinearityModel::fprime(double s) const {
    const double a = std::abs(s);
    double out = 0.0;
    for (const auto& t : terms_) {
        out += t.coefficient * (t.exponent - 1.0) * std::pow(a, t.exponent - 2.0);
    }
    return out;
}

Field harmonic_potential(const GridSpec& grid, int confined) {
    if (confined < 0 || confined > grid.dims()) {
        throw ValidationError("potential: confined axis count out of range");
    }
    return Field::sample(grid, [confined](std::span<const double> z) {
        double v = 0.0;
        for (int a = 0; a < confined; ++a) v += z[a] * z[a];
        return v;
    });
}

Field potential_values(const GridSpec& grid) {
    return harmonic_potential(grid, grid.confined_dims());
}

bool HypothesisReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string HypothesisReport::first_failure() const {
    for (const auto& c : checks) {
        if (!c.passed) return c.name;
    }
    return {};
}

HypothesisReport check_hypotheses(const NonlinearityModel& model, int n_dims) {
    HypothesisReport report;
    if (n_dims >= 3) report.critical_exponent = 2.0 * n_dims / (n_dims - 2.0);

    const auto& terms = model.terms();
    const bool nonempty = !terms.empty();
    report.gamma = model.gamma();
    std::tie(report.sigma1, report.sigma2) = model.sigma_bounds();

    auto add = [&](std::string name, bool ok, std::string detail) {
        report.checks.push_back({std::move(name), ok, std::move(detail)});
    };

    // f1: f(s) = o(|s|) at 0 holds iff every exponent exceeds 2.
    const bool super = nonempty && std::all_of(terms.begin(), terms.end(),
                                               [](const auto& t) { return t.exponent > 2.0; });
    add("f1", super, super ? "all exponents > 2" : "need every exponent > 2 and a nonempty model");

    // f2: subcritical growth 2 < p_j < 2*.
    {
        bool ok = super;
        std::ostringstream detail;
        if (report.critical_exponent) {
            for (const auto& t : terms) {
                if (!(t.exponent < *report.critical_exponent)) {
                    ok = false;
                    detail << "exponent " << t.exponent << " >= 2* = " << *report.critical_exponent
                           << "; ";
                }
            }
            if (ok) detail << "all exponents below 2* = " << *report.critical_exponent;
        } else {
            detail << "N = 2: no upper exponent bound enforced";
        }
        add("f2", ok, detail.str());
    }

    // f3: gamma F(s) <= f(s) s termwise, since gamma / p_j <= 1.
    {
        const bool ok = super && report.gamma > 2.0;
        std::ostringstream detail;
        detail << "gamma = " << report.gamma
               << (ok ? "; gamma*a_j/p_j <= a_j for every term" : "; gamma > 2 required");
        add("f3", ok, detail.str());
    }

    // f4: f(s)/|s| = sign(s) sum a_j |s|^{p_j-2} is strictly increasing on each
    // half line when every p_j > 2 and a_j > 0.
    add("f4", super, super ? "f(s)/|s| strictly increasing on both half lines"
                           : "requires exponents > 2");

    // f'(s) = sum a_j (p_j-1) s^{p_j-2} <= C (s^sigma1 + s^sigma2) with
    // C = sum a_j (p_j-1), because s^q <= s^sigma1 + s^sigma2 for sigma1 <= q <= sigma2.
    {
        double c = 0.0;
        for (const auto& t : terms) c += t.coefficient * (t.exponent - 1.0);
        report.growth_constant = c;
        const bool ok = super && report.sigma1 > 0.0;
        std::ostringstream detail;
        detail << "sigma1 = " << report.sigma1 << ", sigma2 = " << report.sigma2 << ", C = " << c;
        add("fprime_growth", ok, detail.str());
    }
    return report;
}

}  // namespace pcnls
