#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcnls/grid.hpp"
#include "pcnls/variational.hpp"

namespace pcnls {

/// Coordinate map (g z)_i = sign[i] * z[source[i]].
struct SignedPermutation {
    std::vector<int> source;
    std::vector<int> sign;

    static SignedPermutation identity(int dims);
    /// z_axis -> -z_axis.
    static SignedPermutation reflection(int dims, int axis);

    int dims() const { return static_cast<int>(source.size()); }
    /// (this * other)(z) = this(other(z)).
    SignedPermutation compose(const SignedPermutation& other) const;
    SignedPermutation inverse() const;
    bool is_identity() const;

    auto operator<=>(const SignedPermutation&) const = default;
};

/// Orthogonal 2x2 map on the (x_1, x_2) plane, identity on the other axes.
struct PlaneMap {
    double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

    static PlaneMap rotation(double angle);
    /// Reflection across the line through the origin at polar angle theta.
    static PlaneMap line_reflection(double theta);
    /// x_1 -> -x_1.
    static PlaneMap flip_x1();

    PlaneMap compose(const PlaneMap& other) const;
    PlaneMap inverse() const;  // transpose
    /// The equivalent signed permutation on `dims` axes when every entry is
    /// within `tol` of 0 or +-1.
    std::optional<SignedPermutation> as_signed_permutation(int dims, double tol = 1e-12) const;
};

struct GroupGenerator {
    SignedPermutation map;
    int parity = 1;  // tau(g) in {-1, +1}
};

/// Invariant subspace the descent is confined to.
class SymmetryConstraint {
public:
    enum class Kind { FullSpace, KOdd, CyclicOdd, GInvariant };

    static SymmetryConstraint full_space();
    /// Odd under x_i -> -x_i for i = 1..k.
    static SymmetryConstraint k_odd(int k);
    /// Odd in x_1 and invariant under the 2pi/l rotation of the (x_1, x_2) plane.
    static SymmetryConstraint cyclic_odd(int l);
    /// Signed permutations of the confined axes with a parity per generator.
    /// Generators given on m axes are extended by the identity on the free block.
    static SymmetryConstraint g_invariant(std::vector<GroupGenerator> generators);

    Kind kind() const { return kind_; }
    int k() const { return order_; }
    int l() const { return order_; }
    const std::vector<GroupGenerator>& generators() const { return generators_; }

    /// True when every element acts as a node permutation on a Cartesian grid.
    bool grid_exact() const;
    /// True when the constraint imposes antisymmetry somewhere (odd grids required).
    bool has_odd_part() const;
    std::string describe() const;

private:
    Kind kind_ = Kind::FullSpace;
    int order_ = 0;
    std::vector<GroupGenerator> generators_;
};

/// parity * u(g^{-1} z). Throws ExactnessError when g does not map the node
/// set onto itself (axes of unequal shape permuted).
Field apply_group_element(const Field& u, const SignedPermutation& g, int parity);
/// As above for a plane map; exact maps are routed to the permutation path,
/// any other map throws ExactnessError.
Field apply_group_element(const Field& u, const PlaneMap& g, int parity);
/// Bilinear resampling in the (x_1, x_2) plane; zero outside the box.
Field apply_plane_map_interpolated(const Field& u, const PlaneMap& g, int parity);

/// A SymmetryConstraint realised on a particular grid: the full list of group
/// elements with parities and, for grid-exact groups, the orbit table used
/// for averaging.
class SymmetryGroup {
public:
    /// Validates the constraint against the grid (k <= m, matching axes for
    /// permutations and rotations, parity homomorphism). Throws ValidationError.
    static SymmetryGroup resolve(const SymmetryConstraint& c, const GridSpec& grid);

    bool exact() const { return exact_; }
    std::size_t order() const { return exact_ ? elements_.size() : plane_elements_.size(); }

    /// Group average (1/|G|) sum_g tau(g) u(g^{-1} z). For exact groups the
    /// result is a bitwise fixed point of every generator and the map is
    /// bitwise idempotent; interpolated groups are approximate.
    Field symmetrize(const Field& u) const;

    /// max over generators of ||tau(g) u(g^{-1}.) - u||_2 / ||u||_2.
    /// Throws DomainError for u == 0.
    double residual(const Field& u) const;

    const GridSpec& grid() const { return grid_; }

private:
    struct Element {
        SignedPermutation map;
        int parity = 1;
    };
    struct PlaneElement {
        PlaneMap map;
        int parity = 1;
    };

    explicit SymmetryGroup(GridSpec grid) : grid_(std::move(grid)) {}
    void build_orbits();

    GridSpec grid_;
    bool exact_ = true;
    std::vector<Element> elements_;
    std::vector<Element> generators_;
    std::vector<PlaneElement> plane_elements_;
    std::vector<PlaneElement> plane_generators_;

    // Orbit table: members of each orbit in ascending node order (CSR), with
    // the sign relating each member to its representative; 0 marks orbits
    // forced to vanish by a stabiliser of odd parity.
    std::vector<std::size_t> orbit_offsets_;
    std::vector<std::size_t> orbit_members_;
    std::vector<std::int8_t> member_sign_;
};

Field symmetrize(const Field& u, const SymmetryConstraint& c);
double symmetry_residual(const Field& u, const SymmetryConstraint& c);

/// ||parity * u(g^{-1} .) - u||_2 / ||u||_2 for one transformation.
double transform_residual(const Field& u, const SignedPermutation& g, int parity);
/// Same for a plane map; interpolated when the map is not grid-exact.
double transform_residual(const Field& u, const PlaneMap& g, int parity);

/// Reflections across the hyperplanes containing the half-lines at angles
/// theta_i = (i/l + 1/(2l) + 1/2) pi, i = 0..l-1, in the (x_1, x_2) plane.
std::vector<PlaneMap> cyclic_symmetry_axes(int l);

/// Closed pi/l sector D = {theta in [pi/2, pi/2 + pi/l]} of the (x_1, x_2)
/// plane. Nodes on the lower ray and on x_1 = x_2 = 0 belong to D, nodes on
/// the upper ray do not. Only l in {1, 2, 4} is grid-exact and supported.
bool in_sector(long doubled_x1, long doubled_x2, int l);

/// chi_D u.
Field fold_sector(const Field& u, int l);
/// S(v)(z) = sum_i v(g_l^i z) - sum_i v(g_l^i R z), R: x_1 -> -x_1.
/// Throws ValidationError if v is nonzero outside D.
Field unfold_sector(const Field& v, int l);
/// l (||v||^2 - 2 int F(v)) over the open sector; equals I(unfold_sector(v)).
double sector_energy(const Field& v, int l, const EnergyFunctional& functional);

}  // namespace pcnls
