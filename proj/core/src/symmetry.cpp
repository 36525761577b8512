#include "pcnls/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "pcnls/errors.hpp"

namespace pcnls {

// ---------------------------------------------------------------------------
// SignedPermutation / PlaneMap

SignedPermutation SignedPermutation::identity(int dims) {
    SignedPermutation g;
    g.source.resize(static_cast<std::size_t>(dims));
    g.sign.assign(static_cast<std::size_t>(dims), 1);
    for (int i = 0; i < dims; ++i) g.source[static_cast<std::size_t>(i)] = i;
    return g;
}

SignedPermutation SignedPermutation::reflection(int dims, int axis) {
    SignedPermutation g = identity(dims);
    g.sign.at(static_cast<std::size_t>(axis)) = -1;
    return g;
}

SignedPermutation SignedPermutation::compose(const SignedPermutation& other) const {
    SignedPermutation out;
    out.source.resize(source.size());
    out.sign.resize(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
        const auto j = static_cast<std::size_t>(source[i]);
        out.source[i] = other.source[j];
        out.sign[i] = sign[i] * other.sign[j];
    }
    return out;
}

SignedPermutation SignedPermutation::inverse() const {
    SignedPermutation out;
    out.source.resize(source.size());
    out.sign.resize(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
        const auto j = static_cast<std::size_t>(source[i]);
        out.source[j] = static_cast<int>(i);
        out.sign[j] = sign[i];
    }
    return out;
}

bool SignedPermutation::is_identity() const {
    for (std::size_t i = 0; i < source.size(); ++i) {
        if (source[i] != static_cast<int>(i) || sign[i] != 1) return false;
    }
    return true;
}

PlaneMap PlaneMap::rotation(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c, -s, s, c};
}

PlaneMap PlaneMap::line_reflection(double theta) {
    const double c = std::cos(2.0 * theta), s = std::sin(2.0 * theta);
    return {c, s, s, -c};
}

PlaneMap PlaneMap::flip_x1() { return {-1.0, 0.0, 0.0, 1.0}; }

PlaneMap PlaneMap::compose(const PlaneMap& o) const {
    return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
            m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
}

PlaneMap PlaneMap::inverse() const { return {m11, m21, m12, m22}; }

std::optional<SignedPermutation> PlaneMap::as_signed_permutation(int dims, double tol) const {
    if (dims < 2) return std::nullopt;
    auto snap = [tol](double v) -> std::optional<int> {
        for (int k : {-1, 0, 1}) {
            if (std::abs(v - k) <= tol) return k;
        }
        return std::nullopt;
    };
    const double entries[2][2] = {{m11, m12}, {m21, m22}};
    SignedPermutation g = SignedPermutation::identity(dims);
    for (int row = 0; row < 2; ++row) {
        int nonzero = 0;
        for (int col = 0; col < 2; ++col) {
            const auto v = snap(entries[row][col]);
            if (!v) return std::nullopt;
            if (*v != 0) {
                ++nonzero;
                g.source[static_cast<std::size_t>(row)] = col;
                g.sign[static_cast<std::size_t>(row)] = *v;
            }
        }
        if (nonzero != 1) return std::nullopt;
    }
    if (g.source[0] == g.source[1]) return std::nullopt;
    return g;
}

// ---------------------------------------------------------------------------
// Node-level actions

namespace {

void require_grid_compatible(const SignedPermutation& g, const GridSpec& grid) {
    if (g.dims() != grid.dims()) {
        throw ValidationError("group element acts on " + std::to_string(g.dims()) +
                              " axes, grid has " + std::to_string(grid.dims()));
    }
    for (int i = 0; i < g.dims(); ++i) {
        const int j = g.source[static_cast<std::size_t>(i)];
        if (!(grid.axis(i) == grid.axis(j))) {
            throw ExactnessError("axes " + std::to_string(i) + " and " + std::to_string(j) +
                                 " differ in shape; the permutation is not a node map "
                                 "(use the interpolating variant)");
        }
    }
}

// Flat index of the node g z, given the multi-index of z.
std::size_t map_node(const SignedPermutation& g, const GridSpec& grid,
                     std::span<const std::size_t> idx) {
    std::size_t flat = 0;
    for (int i = 0; i < g.dims(); ++i) {
        const auto iu = static_cast<std::size_t>(i);
        const auto j = static_cast<std::size_t>(g.source[iu]);
        const std::size_t k = g.sign[iu] > 0 ? idx[j] : grid.points(i) - 1 - idx[j];
        flat += k * grid.stride(i);
    }
    return flat;
}

double relative_difference(const Field& a, const Field& b) {
    const double denom = l2_norm(b);
    if (denom == 0.0) throw DomainError("symmetry residual undefined for u = 0");
    return l2_norm(a - b) / denom;
}

}  // namespace

Field apply_group_element(const Field& u, const SignedPermutation& g, int parity) {
    const GridSpec& grid = u.grid();
    require_grid_compatible(g, grid);
    const SignedPermutation inv = g.inverse();
    Field out(grid);
    std::vector<std::size_t> idx(static_cast<std::size_t>(grid.dims()));
    const double p = parity;
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        grid.unflatten(flat, idx);
        out[flat] = p * u[map_node(inv, grid, idx)];
    }
    return out;
}

Field apply_group_element(const Field& u, const PlaneMap& g, int parity) {
    const auto perm = g.as_signed_permutation(u.grid().dims());
    if (!perm) {
        throw ExactnessError("plane map is not a signed permutation; use "
                             "apply_plane_map_interpolated");
    }
    return apply_group_element(u, *perm, parity);
}

Field apply_plane_map_interpolated(const Field& u, const PlaneMap& g, int parity) {
    const GridSpec& grid = u.grid();
    if (grid.dims() < 2) throw ValidationError("plane map needs at least two axes");
    const PlaneMap inv = g.inverse();
    const std::size_t n0 = grid.points(0), n1 = grid.points(1);
    const std::size_t s0 = grid.stride(0), s1 = grid.stride(1);
    const double h0 = grid.spacing(0), h1 = grid.spacing(1);
    const double c0 = 0.5 * static_cast<double>(n0 - 1), c1 = 0.5 * static_cast<double>(n1 - 1);

    Field out(grid);
    std::vector<std::size_t> idx(static_cast<std::size_t>(grid.dims()));
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        grid.unflatten(flat, idx);
        const std::size_t rest = flat - idx[0] * s0 - idx[1] * s1;
        const double x1 = grid.coordinate(0, idx[0]);
        const double x2 = grid.coordinate(1, idx[1]);
        const double f0 = (inv.m11 * x1 + inv.m12 * x2) / h0 + c0;
        const double f1 = (inv.m21 * x1 + inv.m22 * x2) / h1 + c1;
        const double j0 = std::floor(f0), j1 = std::floor(f1);
        const double t0 = f0 - j0, t1 = f1 - j1;
        auto at = [&](double a, double b) -> double {
            if (a < 0.0 || b < 0.0 || a >= static_cast<double>(n0) || b >= static_cast<double>(n1)) {
                return 0.0;
            }
            return u[rest + static_cast<std::size_t>(a) * s0 + static_cast<std::size_t>(b) * s1];
        };
        const double v = (1 - t0) * (1 - t1) * at(j0, j1) + t0 * (1 - t1) * at(j0 + 1, j1) +
                         (1 - t0) * t1 * at(j0, j1 + 1) + t0 * t1 * at(j0 + 1, j1 + 1);
        out[flat] = parity * v;
    }
    return out;
}

double transform_residual(const Field& u, const SignedPermutation& g, int parity) {
    return relative_difference(apply_group_element(u, g, parity), u);
}

double transform_residual(const Field& u, const PlaneMap& g, int parity) {
    if (const auto perm = g.as_signed_permutation(u.grid().dims())) {
        return transform_residual(u, *perm, parity);
    }
    return relative_difference(apply_plane_map_interpolated(u, g, parity), u);
}

// ---------------------------------------------------------------------------
// SymmetryConstraint

SymmetryConstraint SymmetryConstraint::full_space() { return {}; }

SymmetryConstraint SymmetryConstraint::k_odd(int k) {
    if (k < 1) throw ValidationError("k-odd constraint: k >= 1 required");
    SymmetryConstraint c;
    c.kind_ = Kind::KOdd;
    c.order_ = k;
    return c;
}

SymmetryConstraint SymmetryConstraint::cyclic_odd(int l) {
    if (l < 1) throw ValidationError("cyclic-odd constraint: l >= 1 required");
    SymmetryConstraint c;
    c.kind_ = Kind::CyclicOdd;
    c.order_ = l;
    return c;
}

SymmetryConstraint SymmetryConstraint::g_invariant(std::vector<GroupGenerator> generators) {
    for (const auto& g : generators) {
        if (g.parity != 1 && g.parity != -1) {
            throw ValidationError("G-invariant constraint: parity must be +1 or -1");
        }
        std::vector<int> seen(g.map.source.size(), 0);
        if (g.map.sign.size() != g.map.source.size()) {
            throw ValidationError("G-invariant constraint: malformed signed permutation");
        }
        for (std::size_t i = 0; i < g.map.source.size(); ++i) {
            const int s = g.map.source[i];
            if (s < 0 || static_cast<std::size_t>(s) >= seen.size() || seen[static_cast<std::size_t>(s)]++ ||
                (g.map.sign[i] != 1 && g.map.sign[i] != -1)) {
                throw ValidationError("G-invariant constraint: generator is not a signed permutation");
            }
        }
    }
    SymmetryConstraint c;
    c.kind_ = Kind::GInvariant;
    c.generators_ = std::move(generators);
    return c;
}

bool SymmetryConstraint::grid_exact() const {
    return kind_ != Kind::CyclicOdd || order_ == 1 || order_ == 2 || order_ == 4;
}

bool SymmetryConstraint::has_odd_part() const {
    switch (kind_) {
        case Kind::FullSpace: return false;
        case Kind::KOdd:
        case Kind::CyclicOdd: return true;
        case Kind::GInvariant:
            return std::any_of(generators_.begin(), generators_.end(),
                               [](const auto& g) { return g.parity < 0; });
    }
    return false;
}

std::string SymmetryConstraint::describe() const {
    std::ostringstream s;
    switch (kind_) {
        case Kind::FullSpace: s << "full"; break;
        case Kind::KOdd: s << "kodd(k=" << order_ << ")"; break;
        case Kind::CyclicOdd: s << "cyclic_odd(l=" << order_ << ")"; break;
        case Kind::GInvariant: s << "ginvariant(" << generators_.size() << " generators)"; break;
    }
    return s.str();
}

// ---------------------------------------------------------------------------
// SymmetryGroup

namespace {

void require_rotatable_plane(const GridSpec& grid, const char* what) {
    if (grid.confined_dims() < 2) {
        throw ValidationError(std::string(what) + ": requires m >= 2");
    }
    if (!(grid.axis(0) == grid.axis(1))) {
        throw ValidationError(std::string(what) + ": x_1 and x_2 axes must share L and n");
    }
}

constexpr std::size_t kMaxGroupOrder = 200000;

}  // namespace

SymmetryGroup SymmetryGroup::resolve(const SymmetryConstraint& c, const GridSpec& grid) {
    SymmetryGroup group(grid);
    const int n = grid.dims();
    const int m = grid.confined_dims();

    using Kind = SymmetryConstraint::Kind;
    switch (c.kind()) {
        case Kind::FullSpace: break;
        case Kind::KOdd:
            if (c.k() > m) {
                throw ValidationError("k-odd constraint: k <= m required, got k = " +
                                      std::to_string(c.k()) + ", m = " + std::to_string(m));
            }
            for (int i = 0; i < c.k(); ++i) {
                group.generators_.push_back({SignedPermutation::reflection(n, i), -1});
            }
            break;
        case Kind::CyclicOdd: {
            require_rotatable_plane(grid, "cyclic-odd constraint");
            const PlaneMap rot = PlaneMap::rotation(2.0 * std::numbers::pi / c.l());
            if (c.grid_exact()) {
                group.generators_.push_back({*rot.as_signed_permutation(n), 1});
                group.generators_.push_back({SignedPermutation::reflection(n, 0), -1});
            } else {
                group.exact_ = false;
                group.plane_generators_ = {{rot, 1}, {PlaneMap::flip_x1(), -1}};
                for (int i = 0; i < c.l(); ++i) {
                    const PlaneMap r = PlaneMap::rotation(2.0 * std::numbers::pi * i / c.l());
                    group.plane_elements_.push_back({r, 1});
                    group.plane_elements_.push_back({r.compose(PlaneMap::flip_x1()), -1});
                }
                return group;
            }
            break;
        }
        case Kind::GInvariant:
            for (const auto& gen : c.generators()) {
                SignedPermutation g = gen.map;
                if (g.dims() == m) {
                    for (int i = m; i < n; ++i) {
                        g.source.push_back(i);
                        g.sign.push_back(1);
                    }
                }
                if (g.dims() != n) {
                    throw ValidationError("G-invariant constraint: generators must act on m or N axes");
                }
                for (int i = m; i < n; ++i) {
                    const auto iu = static_cast<std::size_t>(i);
                    if (g.source[iu] != i || g.sign[iu] != 1) {
                        throw ValidationError("G-invariant constraint: generators must fix the free block");
                    }
                }
                for (int i = 0; i < m; ++i) {
                    if (g.source[static_cast<std::size_t>(i)] >= m) {
                        throw ValidationError("G-invariant constraint: generators must fix the free block");
                    }
                }
                require_grid_compatible(g, grid);
                group.generators_.push_back({std::move(g), gen.parity});
            }
            break;
    }
    for (const auto& g : group.generators_) require_grid_compatible(g.map, grid);

    // Closure by breadth-first search over the Cayley graph; every edge is
    // checked, so an inconsistent parity is always caught for finite groups.
    std::map<SignedPermutation, int> parity_of;
    std::vector<Element> queue{{SignedPermutation::identity(n), 1}};
    parity_of.emplace(queue.front().map, 1);
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Element cur = queue[head];
        for (const auto& gen : group.generators_) {
            Element next{gen.map.compose(cur.map), gen.parity * cur.parity};
            auto [it, inserted] = parity_of.emplace(next.map, next.parity);
            if (!inserted) {
                if (it->second != next.parity) {
                    throw ValidationError("G-invariant constraint: parity is not a homomorphism "
                                          "on the generated group");
                }
                continue;
            }
            if (queue.size() >= kMaxGroupOrder) {
                throw ValidationError("symmetry group too large");
            }
            queue.push_back(std::move(next));
        }
    }
    group.elements_ = std::move(queue);
    group.build_orbits();
    return group;
}

void SymmetryGroup::build_orbits() {
    const std::size_t size = grid_.size();
    std::vector<char> seen(size, 0);
    std::vector<std::size_t> idx(static_cast<std::size_t>(grid_.dims()));
    std::vector<std::pair<std::size_t, int>> members;
    orbit_offsets_.assign(1, 0);
    orbit_members_.clear();
    member_sign_.clear();
    orbit_members_.reserve(size);
    member_sign_.reserve(size);

    for (std::size_t r = 0; r < size; ++r) {
        if (seen[r]) continue;
        grid_.unflatten(r, idx);
        members.clear();
        bool vanishes = false;
        for (const auto& e : elements_) {
            const std::size_t y = map_node(e.map, grid_, idx);
            auto it = std::find_if(members.begin(), members.end(),
                                   [y](const auto& p) { return p.first == y; });
            if (it == members.end()) {
                members.emplace_back(y, e.parity);
            } else if (it->second != e.parity) {
                vanishes = true;
            }
        }
        std::sort(members.begin(), members.end());
        for (const auto& [y, s] : members) {
            seen[y] = 1;
            orbit_members_.push_back(y);
            member_sign_.push_back(static_cast<std::int8_t>(vanishes ? 0 : s));
        }
        orbit_offsets_.push_back(orbit_members_.size());
    }
}

Field SymmetryGroup::symmetrize(const Field& u) const {
    if (!(u.grid() == grid_)) throw ValidationError("symmetrize: grid mismatch");
    if (!exact_) {
        Field acc(grid_);
        for (const auto& e : plane_elements_) acc += apply_plane_map_interpolated(u, e.map, e.parity);
        acc *= 1.0 / static_cast<double>(plane_elements_.size());
        return acc;
    }
    Field out(grid_);
    for (std::size_t o = 0; o + 1 < orbit_offsets_.size(); ++o) {
        const std::size_t b = orbit_offsets_[o], e = orbit_offsets_[o + 1];
        if (member_sign_[b] == 0) continue;  // forced zero
        const double rep = u[orbit_members_[b]];
        bool invariant = true;
        for (std::size_t k = b + 1; k < e && invariant; ++k) {
            invariant = u[orbit_members_[k]] == member_sign_[k] * rep;
        }
        if (invariant) {
            for (std::size_t k = b; k < e; ++k) out[orbit_members_[k]] = u[orbit_members_[k]];
            continue;
        }
        double sum = 0.0;
        for (std::size_t k = b; k < e; ++k) sum += member_sign_[k] * u[orbit_members_[k]];
        const double avg = sum / static_cast<double>(e - b);
        for (std::size_t k = b; k < e; ++k) out[orbit_members_[k]] = member_sign_[k] * avg;
    }
    return out;
}

double SymmetryGroup::residual(const Field& u) const {
    if (u.is_zero()) throw DomainError("symmetry residual undefined for u = 0");
    double worst = 0.0;
    if (exact_) {
        for (const auto& g : generators_) {
            worst = std::max(worst, transform_residual(u, g.map, g.parity));
        }
    } else {
        for (const auto& g : plane_generators_) {
            worst = std::max(worst, relative_difference(
                                        apply_plane_map_interpolated(u, g.map, g.parity), u));
        }
    }
    return worst;
}

Field symmetrize(const Field& u, const SymmetryConstraint& c) {
    return SymmetryGroup::resolve(c, u.grid()).symmetrize(u);
}

double symmetry_residual(const Field& u, const SymmetryConstraint& c) {
    return SymmetryGroup::resolve(c, u.grid()).residual(u);
}

std::vector<PlaneMap> cyclic_symmetry_axes(int l) {
    if (l < 1) throw ValidationError("symmetry axes: l >= 1 required");
    std::vector<PlaneMap> out;
    for (int i = 0; i < l; ++i) {
        const double theta =
            (static_cast<double>(i) / l + 1.0 / (2.0 * l) + 0.5) * std::numbers::pi;
        out.push_back(PlaneMap::line_reflection(theta));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sector restriction and unfolding

bool in_sector(long d1, long d2, int l) {
    if (d1 == 0 && d2 >= 0) return true;  // lower ray and the x_1 = x_2 = 0 line
    double phi = std::atan2(static_cast<double>(d2), static_cast<double>(d1)) -
                 0.5 * std::numbers::pi;
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    return phi < std::numbers::pi / l - 1e-12;
}

namespace {

void require_exact_sector(const GridSpec& grid, int l) {
    if (l != 1 && l != 2 && l != 4) {
        throw ExactnessError("sector fold/unfold is grid-exact only for l in {1, 2, 4}");
    }
    require_rotatable_plane(grid, "sector");
    if (grid.points(0) % 2 == 0) {
        throw ValidationError("sector: odd point count required on x_1 and x_2");
    }
}

template <class Fn>
void for_each_plane_node(const GridSpec& grid, Fn&& fn) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(grid.dims()));
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        grid.unflatten(flat, idx);
        fn(flat, grid.doubled_offset(0, idx[0]), grid.doubled_offset(1, idx[1]), idx);
    }
}

void require_sector_support(const Field& v, int l) {
    for_each_plane_node(v.grid(), [&](std::size_t flat, long d1, long d2, auto&) {
        if (v[flat] != 0.0 && !in_sector(d1, d2, l)) {
            throw ValidationError("unfold_sector: input is nonzero outside the sector");
        }
    });
}

}  // namespace

Field fold_sector(const Field& u, int l) {
    require_exact_sector(u.grid(), l);
    Field out(u.grid());
    for_each_plane_node(u.grid(), [&](std::size_t flat, long d1, long d2, auto&) {
        if (in_sector(d1, d2, l)) out[flat] = u[flat];
    });
    return out;
}

Field unfold_sector(const Field& v, int l) {
    const GridSpec& grid = v.grid();
    require_exact_sector(grid, l);
    require_sector_support(v, l);
    const int n = grid.dims();
    const SignedPermutation rot =
        *PlaneMap::rotation(2.0 * std::numbers::pi / l).as_signed_permutation(n);
    const SignedPermutation flip = SignedPermutation::reflection(n, 0);
    std::vector<SignedPermutation> plus, minus;
    SignedPermutation power = SignedPermutation::identity(n);
    for (int i = 0; i < l; ++i) {
        plus.push_back(power);
        minus.push_back(power.compose(flip));
        power = rot.compose(power);
    }
    Field out(grid);
    for_each_plane_node(grid, [&](std::size_t flat, long, long, auto& idx) {
        double s = 0.0;
        for (const auto& g : plus) s += v[map_node(g, grid, idx)];
        for (const auto& g : minus) s -= v[map_node(g, grid, idx)];
        out[flat] = s;
    });
    return out;
}

double sector_energy(const Field& v, int l, const EnergyFunctional& functional) {
    require_exact_sector(v.grid(), l);
    require_sector_support(v, l);
    // The unfolding cancels every value on the lower ray; drop them here too.
    Field open = v;
    for_each_plane_node(v.grid(), [&](std::size_t flat, long d1, long d2, auto&) {
        if (d1 == 0 && d2 >= 0) open[flat] = 0.0;
    });
    const EnergyBreakdown e = functional.energy(open);
    return l * (e.h_norm_sq - 2.0 * e.nonlinear_part);
}

}  // namespace pcnls
