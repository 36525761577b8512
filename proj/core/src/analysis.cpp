#include "pcnls/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "pcnls/errors.hpp"

namespace pcnls {

namespace {

// Labels the face-connected components of `mask`; returns the count.
int count_components(const GridSpec& g, const std::vector<char>& mask) {
    std::vector<char> visited(mask.size(), 0);
    std::vector<std::size_t> stack;
    std::vector<std::size_t> idx(static_cast<std::size_t>(g.dims()));
    int components = 0;
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || visited[start]) continue;
        ++components;
        visited[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            g.unflatten(p, idx);
            for (int a = 0; a < g.dims(); ++a) {
                const std::size_t s = g.stride(a);
                if (idx[a] > 0 && mask[p - s] && !visited[p - s]) {
                    visited[p - s] = 1;
                    stack.push_back(p - s);
                }
                if (idx[a] + 1 < g.points(a) && mask[p + s] && !visited[p + s]) {
                    visited[p + s] = 1;
                    stack.push_back(p + s);
                }
            }
        }
    }
    return components;
}

}  // namespace

NodalReport count_nodal_domains(const Field& u, double threshold) {
    if (!(threshold >= 0.0)) throw ValidationError("nodal count: threshold must be >= 0");
    NodalReport r;
    r.threshold = threshold;
    std::vector<char> mask(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) mask[i] = u[i] > threshold;
    r.positive_domains = count_components(u.grid(), mask);
    for (std::size_t i = 0; i < u.size(); ++i) mask[i] = u[i] < -threshold;
    r.negative_domains = count_components(u.grid(), mask);
    return r;
}

double default_nodal_threshold(const Field& u) { return 1e-6 * u.max_abs(); }

std::vector<double> center_of_mass(const Field& u) {
    const GridSpec& g = u.grid();
    if (u.is_zero()) throw DomainError("center_of_mass undefined for u = 0");
    const double mass = integrate_product(u, u);
    std::vector<double> out;
    std::vector<std::size_t> idx(static_cast<std::size_t>(g.dims()));
    std::vector<double> weighted(u.size());
    for (int a = g.confined_dims(); a < g.dims(); ++a) {
        for (std::size_t flat = 0; flat < u.size(); ++flat) {
            g.unflatten(flat, idx);
            weighted[flat] = g.coordinate(a, idx[a]) * u[flat] * u[flat];
        }
        out.push_back(g.cell_volume() * pairwise_sum(weighted) / mass);
    }
    return out;
}

RadialReport radial_symmetry_residual(const Field& u, RadialBlock block,
                                      std::span<const double> center) {
    const GridSpec& g = u.grid();
    if (block.count < 1 || block.first_axis < 0 || block.first_axis + block.count > g.dims()) {
        throw ValidationError("radial residual: block out of range");
    }
    if (!center.empty() && static_cast<int>(center.size()) != block.count) {
        throw ValidationError("radial residual: center must have one entry per block axis");
    }
    const double h = g.spacing(block.first_axis);
    for (int a = block.first_axis; a < block.first_axis + block.count; ++a) {
        if (g.spacing(a) != h) {
            throw ValidationError("radial residual: block axes must share their spacing");
        }
    }
    const double norm = l2_norm(u);
    if (norm == 0.0) throw DomainError("radial residual undefined for u = 0");

    std::vector<long> centre(static_cast<std::size_t>(block.count), 0);
    for (int b = 0; b < block.count; ++b) {
        if (!center.empty()) centre[b] = std::lround(2.0 * center[b] / h);
    }

    struct Entry {
        std::size_t slice;
        long key;
        std::size_t flat;
    };
    std::vector<Entry> entries(u.size());
    std::vector<std::size_t> idx(static_cast<std::size_t>(g.dims()));
    for (std::size_t flat = 0; flat < u.size(); ++flat) {
        g.unflatten(flat, idx);
        std::size_t slice = flat;
        long key = 0;
        for (int b = 0; b < block.count; ++b) {
            const int a = block.first_axis + b;
            slice -= idx[a] * g.stride(a);
            const long e = g.doubled_offset(a, idx[a]) - centre[b];
            key += e * e;
        }
        entries[flat] = {slice, key, flat};
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        return std::tie(x.slice, x.key, x.flat) < std::tie(y.slice, y.key, y.flat);
    });

    double deviation = 0.0;
    for (std::size_t b = 0; b < entries.size();) {
        std::size_t e = b;
        double sum = 0.0;
        while (e < entries.size() && entries[e].slice == entries[b].slice &&
               entries[e].key == entries[b].key) {
            sum += u[entries[e].flat];
            ++e;
        }
        const double mean = sum / static_cast<double>(e - b);
        for (std::size_t k = b; k < e; ++k) {
            const double d = u[entries[k].flat] - mean;
            deviation += d * d;
        }
        b = e;
    }

    std::map<long, std::pair<double, std::size_t>> profile;
    for (const auto& en : entries) {
        auto& [sum, count] = profile[en.key];
        sum += u[en.flat];
        ++count;
    }
    RadialReport r;
    r.residual = std::sqrt(g.cell_volume() * deviation) / norm;
    r.shells = static_cast<int>(profile.size());
    bool first = true;
    double prev = 0.0;
    for (const auto& [key, acc] : profile) {
        const double mean = acc.first / static_cast<double>(acc.second);
        if (!first && mean > prev) r.monotonicity_defect += mean - prev;
        prev = mean;
        first = false;
    }
    return r;
}

double decay_metric(const Field& u) {
    const GridSpec& g = u.grid();
    const double peak = u.max_abs();
    if (peak == 0.0) return 0.0;
    double shell = 0.0;
    std::vector<std::size_t> idx(static_cast<std::size_t>(g.dims()));
    for (std::size_t flat = 0; flat < u.size(); ++flat) {
        g.unflatten(flat, idx);
        bool outer = false;
        for (int a = 0; a < g.dims() && !outer; ++a) {
            outer = idx[a] == 0 || idx[a] + 1 == g.points(a);
        }
        if (outer) shell = std::max(shell, std::abs(u[flat]));
    }
    return shell / peak;
}

double min_value(const Field& u) {
    double m = u.size() ? u[0] : 0.0;
    for (double v : u.values()) m = std::min(m, v);
    return m;
}

Field translate(const Field& u, int axis, long steps) {
    const GridSpec& g = u.grid();
    Field out(g);
    const long n = static_cast<long>(g.points(axis));
    const std::size_t s = g.stride(axis);
    std::vector<std::size_t> idx(static_cast<std::size_t>(g.dims()));
    for (std::size_t flat = 0; flat < u.size(); ++flat) {
        g.unflatten(flat, idx);
        const long src = static_cast<long>(idx[axis]) + steps;
        if (src < 0 || src >= n) continue;
        out[flat] = u[flat - idx[axis] * s + static_cast<std::size_t>(src) * s];
    }
    return out;
}

Field truncate_below(Field u, double threshold) {
    for (double& v : u.values()) {
        if (std::abs(v) < threshold) v = 0.0;
    }
    return u;
}

namespace {

long separation_steps(const GridSpec& g, double separation) {
    const int axis = g.confined_dims();
    const double h = g.spacing(axis);
    if (!(separation >= 0.0)) throw ValidationError("dipole: separation must be >= 0");
    if (separation >= g.axis(axis).half_width) {
        throw ValidationError("dipole: separation too large for the box (need k < L_y)");
    }
    const double steps = separation / h;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
        throw ValidationError("dipole: separation must be a whole number of y spacings");
    }
    return static_cast<long>(rounded);
}

}  // namespace

Field dipole_construct(const Field& u, double separation) {
    const GridSpec& g = u.grid();
    const long s = separation_steps(g, separation);
    const int axis = g.confined_dims();
    return translate(u, axis, s) - translate(u, axis, -s);
}

std::vector<DipoleResult> dipole_study(const Field& u, const EnergyFunctional& functional,
                                       std::span<const double> separations) {
    if (functional.part() != NonlinearPart::Full) {
        throw ValidationError("dipole: the study needs the untruncated functional");
    }
    const double two_c = 2.0 * functional.energy(u).total;
    const int axis = u.grid().confined_dims();
    std::vector<DipoleResult> out;
    for (double k : separations) {
        const long s = separation_steps(u.grid(), k);
        const Field ahead = translate(u, axis, s);
        const Field behind = translate(u, axis, -s);
        const Field raw = ahead - behind;

        DipoleResult r;
        r.separation = k;
        r.two_c = two_c;
        r.overlap = integrate(abs(hadamard(ahead, behind)));
        r.raw_energy = functional.energy(raw).total;

        Field plus = positive_part(raw);
        Field minus = negative_part(raw);
        if (plus.is_zero() || minus.is_zero()) {
            throw DomainError("dipole: a sign component vanishes (separation too small?)");
        }
        plus *= functional.nehari_scale(plus);
        minus *= functional.nehari_scale(minus);
        r.energy = functional.energy(plus - minus).total;
        r.gap = r.energy - two_c;
        out.push_back(r);
    }
    return out;
}

}  // namespace pcnls
