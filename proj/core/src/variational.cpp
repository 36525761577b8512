#include "pcnls/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pcnls/errors.hpp"

namespace pcnls {

double h_norm_sq(const Field& u, const Field& potential) {
    require_same_grid(u, potential, "h_norm_sq");
    std::vector<double> vu2(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) vu2[i] = potential[i] * u[i] * u[i];
    return dirichlet_energy(u) + u.grid().cell_volume() * pairwise_sum(vu2);
}

double h_inner_product(const Field& u, const Field& v, const Field& potential) {
    require_same_grid(u, v, "h_inner_product");
    return 0.25 * (h_norm_sq(u + v, potential) - h_norm_sq(u - v, potential));
}

Field apply_shifted_operator(const Field& u, const Field& potential) {
    require_same_grid(u, potential, "apply_shifted_operator");
    Field out = laplacian_apply(u);
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = potential[i] * u[i] - o[i];
    return out;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

LinearSolve solve_shifted_operator(const Field& potential, const Field& rhs, double tol,
                                   int max_iters) {
    require_same_grid(potential, rhs, "solve_shifted_operator");
    if (!(tol > 0.0)) throw ValidationError("linear solve: tolerance must be positive");
    const GridSpec& g = rhs.grid();
    if (max_iters <= 0) max_iters = static_cast<int>(std::max<std::size_t>(2000, 4 * g.size()));

    LinearSolve out{Field(g), 0, 0.0};
    const double bnorm = std::sqrt(dot(rhs.values(), rhs.values()));
    if (bnorm == 0.0) return out;

    double stencil_diag = 0.0;
    for (int a = 0; a < g.dims(); ++a) stencil_diag += 2.0 / (g.spacing(a) * g.spacing(a));
    std::vector<double> inv_diag(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) inv_diag[i] = 1.0 / (stencil_diag + potential[i]);

    Field& x = out.solution;
    Field r = rhs;
    Field z(g);
    for (std::size_t i = 0; i < g.size(); ++i) z[i] = inv_diag[i] * r[i];
    Field p = z;
    double rz = dot(r.values(), z.values());

    for (int it = 1; it <= max_iters; ++it) {
        const Field ap = apply_shifted_operator(p, potential);
        const double pap = dot(p.values(), ap.values());
        if (!(pap > 0.0)) {
            throw NumericalError("linear solve: operator lost positive definiteness");
        }
        const double alpha = rz / pap;
        x.axpy(alpha, p);
        r.axpy(-alpha, ap);
        const double rnorm = std::sqrt(dot(r.values(), r.values()));
        out.iterations = it;
        out.relative_residual = rnorm / bnorm;
        if (out.relative_residual <= tol) return out;
        for (std::size_t i = 0; i < g.size(); ++i) z[i] = inv_diag[i] * r[i];
        const double rz_next = dot(r.values(), z.values());
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < g.size(); ++i) p[i] = z[i] + beta * p[i];
    }
    std::ostringstream msg;
    msg << "linear solve: no convergence after " << max_iters
        << " iterations (relative residual " << out.relative_residual << ", target " << tol << ")";
    throw ConvergenceError(msg.str());
}

EnergyFunctional::EnergyFunctional(NonlinearityModel model, Field potential, NonlinearPart part)
    : model_(std::move(model)), potential_(std::move(potential)), part_(part) {}

EnergyBreakdown EnergyFunctional::energy(const Field& u) const {
    require_same_grid(u, potential_, "energy");
    EnergyBreakdown e;
    const double vol = grid().cell_volume();
    std::vector<double> buf(u.size());

    e.kinetic_part = dirichlet_energy(u);
    if (!std::isfinite(e.kinetic_part)) throw NumericalError("energy: kinetic part overflowed");

    for (std::size_t i = 0; i < u.size(); ++i) buf[i] = potential_[i] * u[i] * u[i];
    e.potential_part = vol * pairwise_sum(buf);
    if (!std::isfinite(e.potential_part)) throw NumericalError("energy: potential part overflowed");

    for (std::size_t i = 0; i < u.size(); ++i) buf[i] = model_.F(nonlinear_argument(u[i]));
    e.nonlinear_part = vol * pairwise_sum(buf);
    if (!std::isfinite(e.nonlinear_part)) throw NumericalError("energy: nonlinear part overflowed");

    e.h_norm_sq = e.kinetic_part + e.potential_part;
    e.total = 0.5 * e.h_norm_sq - e.nonlinear_part;
    if (!std::isfinite(e.total)) throw NumericalError("energy: total overflowed");
    return e;
}

Field EnergyFunctional::first_variation(const Field& u) const {
    Field r = apply_shifted_operator(u, potential_);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= model_.f(nonlinear_argument(u[i]));
    return r;
}

Field EnergyFunctional::sobolev_gradient(const Field& u, double lin_tol) const {
    const Field r = first_variation(u);
    try {
        return solve_shifted_operator(potential_, r, lin_tol).solution;
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string("descent direction: ") + e.what());
    }
}

double EnergyFunctional::nehari_residual(const Field& u) const {
    require_same_grid(u, potential_, "nehari_residual");
    std::vector<double> buf(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double s = nonlinear_argument(u[i]);
        buf[i] = model_.f(s) * s;
    }
    return h_norm_sq(u, potential_) - grid().cell_volume() * pairwise_sum(buf);
}

EnergyFunctional::Moments EnergyFunctional::moments(const Field& u) const {
    require_same_grid(u, potential_, "moments");
    Moments m;
    m.q = h_norm_sq(u, potential_);
    std::vector<double> buf(u.size());
    for (const auto& t : model_.terms()) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            buf[i] = std::pow(std::abs(nonlinear_argument(u[i])), t.exponent);
        }
        m.weighted.push_back(t.coefficient * grid().cell_volume() * pairwise_sum(buf));
    }
    return m;
}

double EnergyFunctional::fibering_energy(const Moments& m, double t) const {
    double nl = 0.0;
    const auto& terms = model_.terms();
    for (std::size_t j = 0; j < terms.size(); ++j) {
        nl += std::pow(t, terms[j].exponent) * m.weighted[j] / terms[j].exponent;
    }
    return 0.5 * t * t * m.q - nl;
}

double EnergyFunctional::fibering_residual(const Moments& m, double t) const {
    double nl = 0.0;
    const auto& terms = model_.terms();
    for (std::size_t j = 0; j < terms.size(); ++j) {
        nl += std::pow(t, terms[j].exponent) * m.weighted[j];
    }
    return t * t * m.q - nl;
}

namespace {

void require_fiberable(const Field& u, const NonlinearityModel& model,
                       const EnergyFunctional::Moments& m) {
    if (u.is_zero()) throw DomainError("Nehari projection undefined for u = 0");
    if (model.is_zero()) throw DomainError("Nehari projection undefined for f = 0");
    const bool any = std::any_of(m.weighted.begin(), m.weighted.end(),
                                 [](double w) { return w > 0.0; });
    if (!any || !(m.q > 0.0)) {
        throw DomainError("Nehari projection undefined: nonlinear moments vanish");
    }
}

}  // namespace

double EnergyFunctional::nehari_scale(const Field& u) const {
    const Moments m = moments(u);
    require_fiberable(u, model_, m);
    const auto& terms = model_.terms();
    if (terms.size() == 1) {
        return std::pow(m.q / m.weighted[0], 1.0 / (terms[0].exponent - 2.0));
    }

    // phi(t) = Q - sum_j t^{p_j - 2} M_j is strictly decreasing on t > 0.
    auto phi = [&](double t) {
        double s = m.q;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            s -= std::pow(t, terms[j].exponent - 2.0) * m.weighted[j];
        }
        return s;
    };
    auto dphi = [&](double t) {
        double s = 0.0;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            const double q = terms[j].exponent - 2.0;
            s -= q * std::pow(t, q - 1.0) * m.weighted[j];
        }
        return s;
    };

    double lo = 1.0, hi = 1.0;
    if (phi(1.0) > 0.0) {
        while (phi(hi) > 0.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300) throw NumericalError("nehari_scale: bracket overflow");
        }
    } else {
        while (phi(lo) <= 0.0) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-300) throw NumericalError("nehari_scale: bracket underflow");
        }
    }

    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double val = phi(t);
        if (std::abs(val) <= 1e-15 * m.q) return t;
        if (val > 0.0) lo = t; else hi = t;
        const double d = dphi(t);
        double next = d < 0.0 ? t - val / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return next;
        t = next;
    }
    return t;
}

FiberingPeak EnergyFunctional::fibering_max(const Field& u) const {
    const Moments m = moments(u);
    require_fiberable(u, model_, m);

    constexpr double kLogMin = -6.0, kLogMax = 6.0;
    constexpr int kSamples = 241;
    auto energy_at = [&](double log_t) { return fibering_energy(m, std::pow(10.0, log_t)); };

    int best = 0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < kSamples; ++k) {
        const double lt = kLogMin + (kLogMax - kLogMin) * k / (kSamples - 1);
        const double v = energy_at(lt);
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    const double step = (kLogMax - kLogMin) / (kSamples - 1);
    double a = kLogMin + step * std::max(best - 1, 0);
    double b = kLogMin + step * std::min(best + 1, kSamples - 1);

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = energy_at(c), fd = energy_at(d);
    while (b - a > 1e-13) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = energy_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = energy_at(d);
        }
    }
    const double t = std::pow(10.0, 0.5 * (a + b));
    return {t, fibering_energy(m, t)};
}

}  // namespace pcnls
