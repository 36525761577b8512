#include "pcnls/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pcnls/errors.hpp"

namespace pcnls::oracle {

bool OracleTolerance::accepts(double got, double want) const {
    return std::abs(got - want) <= abs_tol + rel_tol * std::abs(want);
}

const std::vector<OracleTolerance>& tolerances() {
    static const std::vector<OracleTolerance> table = {
        {"laplacian_apply", 1e-12, 1e-12},
        {"apply_shifted_operator", 1e-12, 1e-12},
        {"solve_shifted_operator", 0.0, 1e-8},
        {"linear_ground_eigenpair", 0.0, 1e-8},
        {"nehari_scale", 0.0, 1e-8},
        {"fibering_max", 0.0, 1e-8},
        {"first_variation", 0.0, 1e-6},
        {"summation_by_parts", 0.0, 1e-12},
    };
    return table;
}

const OracleTolerance& tolerance(const std::string& name) {
    for (const auto& t : tolerances()) {
        if (t.name == name) return t;
    }
    throw std::out_of_range("no oracle tolerance registered for " + name);
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
    if (x.size() != n) throw ValidationError("dense multiply: size mismatch");
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += entries[i * n + j] * x[j];
        y[i] = s;
    }
    return y;
}

double DenseMatrix::asymmetry() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            worst = std::max(worst, std::abs(entries[i * n + j] - entries[j * n + i]));
        }
    }
    return worst;
}

DenseMatrix dense_operator_matrix(const Field& potential) {
    const GridSpec& g = potential.grid();
    if (g.size() > kMaxDensePoints) {
        throw ValidationError("dense operator: " + std::to_string(g.size()) +
                              " nodes exceed the cap of " + std::to_string(kMaxDensePoints));
    }
    DenseMatrix a{g.size(), std::vector<double>(g.size() * g.size(), 0.0)};
    std::vector<std::size_t> idx(static_cast<std::size_t>(g.dims()));
    for (std::size_t p = 0; p < g.size(); ++p) {
        g.unflatten(p, idx);
        double diag = potential[p];
        for (int ax = 0; ax < g.dims(); ++ax) {
            const double w = 1.0 / (g.spacing(ax) * g.spacing(ax));
            diag += 2.0 * w;
            const std::size_t s = g.stride(ax);
            if (idx[ax] > 0) a(p, p - s) = -w;
            if (idx[ax] + 1 < g.points(ax)) a(p, p + s) = -w;
        }
        a(p, p) = diag;
    }
    return a;
}

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
    Eigen::MatrixXd m(a.n, a.n);
    for (std::size_t i = 0; i < a.n; ++i) {
        for (std::size_t j = 0; j < a.n; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
        }
    }
    return m;
}

}  // namespace

std::vector<double> dense_solve(const DenseMatrix& a, std::span<const double> rhs) {
    if (rhs.size() != a.n) throw ValidationError("dense solve: size mismatch");
    const Eigen::LLT<Eigen::MatrixXd> llt(to_eigen(a));
    if (llt.info() != Eigen::Success) throw NumericalError("dense solve: matrix not positive definite");
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    const Eigen::VectorXd x = llt.solve(b);
    return {x.data(), x.data() + x.size()};
}

std::vector<double> dense_eigenvalues(const DenseMatrix& a) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(a), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

ScaleScan dense_scale_scan(const Field& u, const NonlinearityModel& model, const Field& potential,
                           NonlinearPart part, std::size_t samples, double t_lo, double t_hi) {
    if (u.is_zero()) throw DomainError("scale scan undefined for u = 0");
    if (samples < 2 || !(t_lo > 0.0 && t_hi > t_lo)) {
        throw ValidationError("scale scan: need >= 2 samples on 0 < t_lo < t_hi");
    }
    const GridSpec& g = u.grid();
    const double vol = g.cell_volume();

    // Q(u) from an explicit loop over every edge, boundary edges included.
    double kinetic = 0.0;
    double potential_part = 0.0;
    std::vector<std::size_t> idx(static_cast<std::size_t>(g.dims()));
    for (std::size_t p = 0; p < g.size(); ++p) {
        g.unflatten(p, idx);
        potential_part += potential[p] * u[p] * u[p];
        for (int ax = 0; ax < g.dims(); ++ax) {
            const double w = 1.0 / (g.spacing(ax) * g.spacing(ax));
            const double next = idx[ax] + 1 < g.points(ax) ? u[p + g.stride(ax)] : 0.0;
            kinetic += w * (next - u[p]) * (next - u[p]);
            if (idx[ax] == 0) kinetic += w * u[p] * u[p];
        }
    }
    const double q = vol * (kinetic + potential_part);

    // a_j int |w|^{p_j}, with w = u or u^+.
    std::vector<double> moment;
    for (const auto& term : model.terms()) {
        double s = 0.0;
        for (double v : u.values()) {
            const double w = part == NonlinearPart::PositivePart ? std::max(v, 0.0) : v;
            s += std::pow(std::abs(w), term.exponent);
        }
        moment.push_back(term.coefficient * vol * s);
    }
    const auto& terms = model.terms();
    auto energy = [&](double t) {
        double e = 0.5 * t * t * q;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            e -= std::pow(t, terms[j].exponent) * moment[j] / terms[j].exponent;
        }
        return e;
    };
    auto relative_residual = [&](double t) {
        double r = q;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            r -= std::pow(t, terms[j].exponent - 2.0) * moment[j];
        }
        return r / q;
    };

    ScaleScan scan;
    scan.resolution = std::pow(t_hi / t_lo, 1.0 / static_cast<double>(samples - 1));
    const double log_lo = std::log(t_lo);
    const double step = (std::log(t_hi) - log_lo) / static_cast<double>(samples - 1);
    double best_residual = std::numeric_limits<double>::infinity();
    scan.peak_energy = -std::numeric_limits<double>::infinity();
    double prev = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = std::exp(log_lo + step * static_cast<double>(i));
        const double r = relative_residual(t);
        const double e = energy(t);
        if (std::abs(r) < best_residual) {
            best_residual = std::abs(r);
            scan.t_root = t;
        }
        if (e > scan.peak_energy) {
            scan.peak_energy = e;
            scan.t_peak = t;
        }
        if (i > 0 && ((prev > 0.0 && r < 0.0) || (prev < 0.0 && r > 0.0))) ++scan.sign_changes;
        if (r != 0.0) prev = r;
    }
    return scan;
}

GradientCheck fd_gradient_check(const EnergyFunctional& functional, const Field& u,
                                std::span<const Field> directions, std::span<const double> epsilons) {
    GradientCheck out;
    out.epsilons.assign(epsilons.begin(), epsilons.end());
    out.defects.assign(epsilons.size(), 0.0);
    const Field r = functional.first_variation(u);
    for (const Field& v : directions) {
        const double analytic = integrate_product(v, r);
        for (std::size_t i = 0; i < epsilons.size(); ++i) {
            const double e = epsilons[i];
            Field plus = u;
            plus.axpy(e, v);
            Field minus = u;
            minus.axpy(-e, v);
            const double fd =
                (functional.energy(plus).total - functional.energy(minus).total) / (2.0 * e);
            out.defects[i] = std::max(out.defects[i], std::abs(fd - analytic));
        }
    }
    for (double d : out.defects) out.max_defect = std::max(out.max_defect, d);
    out.observed_order = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < out.defects.size(); ++i) {
        const double order = std::log(out.defects[i] / out.defects[i + 1]) /
                             std::log(out.epsilons[i] / out.epsilons[i + 1]);
        out.observed_order = std::min(out.observed_order, order);
    }
    if (out.defects.size() < 2) out.observed_order = 0.0;
    return out;
}

}  // namespace pcnls::oracle
