#include "pcnls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "pcnls/analysis.hpp"
#include "pcnls/errors.hpp"
#include "pcnls/field_io.hpp"
#include "pcnls/parallel.hpp"

namespace pcnls {

namespace {

constexpr int kMaxReseeds = 8;

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Axes on which the constraint imposes an odd reflection.
std::vector<int> odd_axes(const SymmetryConstraint& c, int dims) {
    std::vector<int> out;
    using Kind = SymmetryConstraint::Kind;
    switch (c.kind()) {
        case Kind::FullSpace: break;
        case Kind::KOdd:
            for (int i = 0; i < c.k(); ++i) out.push_back(i);
            break;
        case Kind::CyclicOdd: out = {0, 1}; break;
        case Kind::GInvariant:
            for (const auto& g : c.generators()) {
                if (g.parity > 0) continue;
                for (int i = 0; i < std::min(g.map.dims(), dims); ++i) {
                    const auto iu = static_cast<std::size_t>(i);
                    if (g.map.source[iu] != i || g.map.sign[iu] != 1) out.push_back(i);
                }
            }
            break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void require_odd_points(const GridSpec& grid, const SymmetryConstraint& c) {
    for (int a : odd_axes(c, grid.dims())) {
        if (a < grid.dims() && grid.points(a) % 2 == 0) {
            std::ostringstream msg;
            msg << c.describe() << ": axis " << a + 1
                << " needs an odd node count so the odd hyperplane is a grid plane (n = "
                << grid.points(a) << ")";
            throw ValidationError(msg.str());
        }
    }
}

}  // namespace

void validate_constraint(const GridSpec& grid, const SymmetryConstraint& c) {
    require_odd_points(grid, c);
    (void)SymmetryGroup::resolve(c, grid);
}

namespace {

std::vector<double> padded_center(const GridSpec& grid, const std::vector<double>& center) {
    if (center.size() > static_cast<std::size_t>(grid.dims())) {
        throw ValidationError("init: center has more entries than the grid has axes");
    }
    std::vector<double> c(center);
    c.resize(static_cast<std::size_t>(grid.dims()), 0.0);
    return c;
}

// Angular factor carrying the constraint's odd structure; 1 when there is none.
double symmetry_factor(const SymmetryConstraint& c, std::span<const double> z) {
    using Kind = SymmetryConstraint::Kind;
    switch (c.kind()) {
        case Kind::KOdd: {
            double p = 1.0;
            for (int i = 0; i < c.k(); ++i) p *= z[static_cast<std::size_t>(i)];
            return p;
        }
        case Kind::CyclicOdd: {
            // Im (x1 + i x2)^l for even l, Re for odd l: odd in x1, invariant
            // under the 2 pi / l rotation.
            const auto w = std::pow(std::complex<double>(z[0], z[1]), c.l());
            return c.l() % 2 == 0 ? w.imag() : w.real();
        }
        default: return 1.0;
    }
}

}  // namespace

void SolverConfig::validate() const {
    if (max_iters < 0) throw ValidationError("solver: max_iters must be >= 0");
    if (!(grad_tol > 0.0)) throw ValidationError("solver: grad_tol must be > 0");
    if (!(lin_tol > 0.0 && lin_tol < 1.0)) throw ValidationError("solver: lin_tol must lie in (0, 1)");
    if (const auto* f = std::get_if<FixedStep>(&step)) {
        if (!(f->eta > 0.0 && std::isfinite(f->eta))) {
            throw ValidationError("solver: fixed step eta must be > 0");
        }
    } else {
        const auto& a = std::get<ArmijoStep>(step);
        if (!(a.c1 > 0.0 && a.c1 < 1.0)) throw ValidationError("solver: armijo c1 must lie in (0, 1)");
        if (!(a.backtrack > 0.0 && a.backtrack < 1.0)) {
            throw ValidationError("solver: backtrack factor must lie in (0, 1)");
        }
        if (!(a.initial_step > 0.0 && std::isfinite(a.initial_step))) {
            throw ValidationError("solver: initial step must be > 0");
        }
        if (a.max_backtracks < 1) throw ValidationError("solver: max_backtracks must be >= 1");
    }
    if (!(init.width > 0.0 && std::isfinite(init.width))) {
        throw ValidationError("init: width must be > 0");
    }
    if (init.kind == InitSpec::Kind::File && init.path.empty()) {
        throw ValidationError("init: file initialisation needs a path");
    }
}

SolveReport diagnose_field(const Field& u, const NonlinearityModel& model,
                           const SymmetryConstraint& constraint, double lin_tol) {
    if (u.is_zero()) throw DomainError("diagnostics undefined for u = 0");
    const EnergyFunctional functional(model, potential_values(u.grid()));
    const EnergyBreakdown e = functional.energy(u);
    const Field g = functional.sobolev_gradient(u, lin_tol);

    SolveReport r;
    r.final_energy = e.total;
    r.h_norm_sq = e.h_norm_sq;
    r.nehari_residual = std::abs(functional.nehari_residual(u)) / e.h_norm_sq;
    r.grad_residual = std::sqrt(h_norm_sq(g, functional.potential()) / e.h_norm_sq);
    r.nodal_count = count_nodal_domains(u, default_nodal_threshold(u)).total();
    r.symmetry_residual = constraint.kind() == SymmetryConstraint::Kind::FullSpace
                              ? 0.0
                              : symmetry_residual(u, constraint);
    r.decay_metric = decay_metric(u);
    r.min_interior_value = min_value(u);
    r.approximate_symmetry = !constraint.grid_exact();
    return r;
}

Field initial_field(const GridSpec& grid, const SolverConfig& config, std::uint64_t seed) {
    const InitSpec& init = config.init;
    if (init.kind == InitSpec::Kind::File) {
        Field u = read_field(init.path);
        if (!(u.grid() == grid)) {
            throw ValidationError("init: field file " + init.path + " was written on a different grid");
        }
        return u;
    }
    const auto center = padded_center(grid, init.center);
    const double inv_two_w2 = 1.0 / (2.0 * init.width * init.width);
    std::mt19937_64 rng(seed);
    const auto& c = config.constraint;

    // Random low-order polynomial modulation so that generic groups keep a
    // nonzero average; skipped for the constraints with a built-in factor.
    const int m = grid.confined_dims();
    std::vector<double> linear(static_cast<std::size_t>(m));
    std::vector<double> quadratic(static_cast<std::size_t>(m * m));
    const bool modulate = c.kind() == SymmetryConstraint::Kind::GInvariant;
    if (modulate) {
        for (double& v : linear) v = 2.0 * uniform01(rng) - 1.0;
        for (double& v : quadratic) v = 2.0 * uniform01(rng) - 1.0;
    }

    Field u = Field::sample(grid, [&](std::span<const double> z) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < z.size(); ++a) {
            const double d = z[a] - center[a];
            r2 += d * d;
        }
        double v = std::exp(-r2 * inv_two_w2) * symmetry_factor(c, z);
        if (modulate) {
            double poly = 1.0;
            for (int i = 0; i < m; ++i) {
                const auto iu = static_cast<std::size_t>(i);
                poly += linear[iu] * z[iu] / init.width;
                for (int j = 0; j < m; ++j) {
                    poly += quadratic[iu * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)] *
                            z[iu] * z[static_cast<std::size_t>(j)] / (init.width * init.width);
                }
            }
            v *= poly;
        }
        return v;
    });
    if (init.kind == InitSpec::Kind::Random) {
        for (double& v : u.values()) v *= 2.0 * uniform01(rng) - 1.0;
    }
    if (c.kind() == SymmetryConstraint::Kind::FullSpace) u = abs(std::move(u));
    return u;
}

SolveResult solve_constrained_ground_state(const GridSpec& grid, const NonlinearityModel& model,
                                           const SolverConfig& config) {
    config.validate();
    if (model.is_zero()) throw ValidationError("solver: f == 0 has no Nehari set");
    require_odd_points(grid, config.constraint);

    const bool full_space = config.constraint.kind() == SymmetryConstraint::Kind::FullSpace;
    const EnergyFunctional functional(model, potential_values(grid),
                                      full_space ? NonlinearPart::PositivePart : NonlinearPart::Full);
    const SymmetryGroup group = SymmetryGroup::resolve(config.constraint, grid);

    Field u(grid);
    for (int attempt = 0; attempt < kMaxReseeds && u.is_zero(); ++attempt) {
        const std::uint64_t seed = config.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt);
        u = group.symmetrize(initial_field(grid, config, seed));
        if (config.init.kind == InitSpec::Kind::File) break;
    }
    if (u.is_zero()) {
        throw DomainError("solver: the initial field vanishes after symmetrisation");
    }
    u *= functional.nehari_scale(u);

    SolveReport report;
    const Field& V = functional.potential();
    double energy = functional.energy(u).total;
    int steps = 0;
    bool converged = false;
    for (;;) {
        const Field g = group.symmetrize(functional.sobolev_gradient(u, config.lin_tol));
        const double qu = h_norm_sq(u, V);
        const double qg = h_norm_sq(g, V);
        const double residual = std::sqrt(qg / qu);
        report.trace.push_back({energy, residual, qu});
        if (residual <= config.grad_tol) {
            converged = true;
            break;
        }
        if (steps >= config.max_iters) break;

        auto candidate = [&](double eta) {
            Field w = u;
            w.axpy(-eta, g);
            w = group.symmetrize(w);
            if (!w.all_finite()) throw NumericalError("solver: non-finite iterate");
            if (w.is_zero()) return std::pair<Field, double>{std::move(w), std::numeric_limits<double>::infinity()};
            w *= functional.nehari_scale(w);
            const double ew = functional.energy(w).total;
            return std::pair<Field, double>{std::move(w), ew};
        };

        bool accepted = false;
        if (const auto* fixed = std::get_if<FixedStep>(&config.step)) {
            auto [w, ew] = candidate(fixed->eta);
            if (ew > energy + 1e-12 * std::abs(energy)) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "solver: fixed step " << fixed->eta << " raised the energy from " << energy
                    << " to " << ew << " at iteration " << steps;
                throw InternalConsistencyError(msg.str());
            }
            u = std::move(w);
            energy = ew;
            accepted = true;
        } else {
            const auto& armijo = std::get<ArmijoStep>(config.step);
            double eta = armijo.initial_step;
            for (int k = 0; k <= armijo.max_backtracks; ++k, eta *= armijo.backtrack) {
                auto [w, ew] = candidate(eta);
                if (ew <= energy - armijo.c1 * eta * qg) {
                    u = std::move(w);
                    energy = ew;
                    accepted = true;
                    break;
                }
            }
        }
        if (!accepted) break;  // stalled: no step gives sufficient decrease
        ++steps;
    }

    if (full_space) u = abs(std::move(u));
    SolveReport final_report = diagnose_field(u, model, config.constraint, config.lin_tol);
    final_report.iterations = steps;
    final_report.converged = converged;
    final_report.approximate_symmetry = !group.exact();
    final_report.trace = std::move(report.trace);
    return {std::move(u), std::move(final_report)};
}

MultiStartResult multi_start(const GridSpec& grid, const NonlinearityModel& model,
                             const SolverConfig& config, int n_starts) {
    if (n_starts < 1) throw ValidationError("multi-start: at least one start required");
    std::vector<std::optional<SolveResult>> results(static_cast<std::size_t>(n_starts));
    run_tasks(results.size(), [&](std::size_t i) {
        SolverConfig c = config;
        c.seed = config.seed + i;
        results[i] = solve_constrained_ground_state(grid, model, c);
    });

    std::vector<SolveReport> reports;
    std::optional<std::size_t> best;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < results.size(); ++i) {
        const SolveReport& r = results[i]->report;
        reports.push_back(r);
        if (!r.converged) continue;
        lo = std::min(lo, r.final_energy);
        hi = std::max(hi, r.final_energy);
        if (!best || r.final_energy < results[*best]->report.final_energy) best = i;
    }
    if (!best) throw ConvergenceError("multi-start: no start converged");
    return {std::move(*results[*best]), std::move(reports), (hi - lo) / std::abs(lo)};
}

Eigenpair linear_ground_eigenpair(const Field& potential, double tol, int max_iters) {
    if (!(tol > 0.0)) throw ValidationError("eigenpair: tol must be > 0");
    if (max_iters < 1) throw ValidationError("eigenpair: max_iters must be >= 1");
    const GridSpec& grid = potential.grid();

    Field phi = Field::sample(grid, [&](std::span<const double> z) {
        double v = 1.0;
        for (std::size_t a = 0; a < z.size(); ++a) {
            v *= std::cos(std::numbers::pi * z[a] / (2.0 * grid.axis(static_cast<int>(a)).half_width));
        }
        return v;
    });
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] *= std::exp(-0.5 * potential[i]);
    phi *= 1.0 / l2_norm(phi);

    const double inner_tol = std::max(1e-13, tol * 1e-3);
    double lambda = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    for (int it = 1; it <= max_iters; ++it) {
        Field psi = solve_shifted_operator(potential, phi, inner_tol).solution;
        // The inverse of this M-matrix is positive; clip rounding-level
        // negatives in the far tail.
        for (double& v : psi.values()) v = std::max(v, 0.0);
        psi *= 1.0 / l2_norm(psi);
        phi = std::move(psi);

        const Field a_phi = apply_shifted_operator(phi, potential);
        lambda = integrate_product(a_phi, phi);
        Field defect = a_phi;
        defect.axpy(-lambda, phi);
        iterations = it;
        residual = l2_norm(defect);
        if (residual <= tol) break;
    }
    if (residual > tol) {
        std::ostringstream msg;
        msg << "eigenpair: residual " << residual << " above " << tol << " after " << max_iters
            << " iterations";
        throw ConvergenceError(msg.str());
    }
    return {lambda, std::move(phi), iterations, residual};
}

}  // namespace pcnls
