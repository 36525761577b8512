#pragma once

#include <span>
#include <string>
#include <vector>

#include "pcnls/grid.hpp"
#include "pcnls/variational.hpp"

namespace pcnls {

struct NodalReport {
    int positive_domains = 0;
    int negative_domains = 0;
    double threshold = 0.0;

    int total() const { return positive_domains + negative_domains; }
};

/// Face-connected components of {u > tau} and {u < -tau}. Nodes are only
/// joined through interior faces, never through the implicit zero boundary.
NodalReport count_nodal_domains(const Field& u, double threshold);

/// Default nodal threshold: 1e-6 max|u|.
double default_nodal_threshold(const Field& u);

/// int y u^2 / int u^2 over the free block (one entry per free axis).
/// Throws DomainError for u == 0.
std::vector<double> center_of_mass(const Field& u);

/// Contiguous range of axes treated as one radial block.
struct RadialBlock {
    int first_axis = 0;
    int count = 0;

    static RadialBlock x_block(const GridSpec& g) { return {0, g.confined_dims()}; }
    /// x_{k+1}, ..., x_m: the part of the confined block left after k odd axes.
    static RadialBlock x_tail(const GridSpec& g, int k) { return {k, g.confined_dims() - k}; }
    static RadialBlock y_block(const GridSpec& g) { return {g.confined_dims(), g.free_dims()}; }
};

struct RadialReport {
    /// L^2 deviation from the radial shell means, over ||u||_2.
    double residual = 0.0;
    /// Total positive variation of the shell-averaged profile (absolute units).
    double monotonicity_defect = 0.0;
    int shells = 0;
};

/// Groups nodes by exact squared radius about `center` within the block
/// (center snapped to the nearest half-node) and measures the spread of u on
/// each shell within every fixed slice of the remaining coordinates. In a
/// one-axis block this is evenness about the centre. Empty `center` = origin.
RadialReport radial_symmetry_residual(const Field& u, RadialBlock block,
                                      std::span<const double> center = {});

/// max |u| over the outermost layer of interior nodes / max |u|; 0 for u == 0.
double decay_metric(const Field& u);

double min_value(const Field& u);

/// Shift along `axis` by whole nodes: out(i) = u(i + steps), zero-filled.
Field translate(const Field& u, int axis, long steps);

/// Zero every node with |u| < threshold.
Field truncate_below(Field u, double threshold);

/// u(x, y_1 + k, y') - u(x, y_1 - k, y'). `separation` k is in length units
/// and must be a whole number of y_1 spacings with k < L_{y_1}.
Field dipole_construct(const Field& u, double separation);

struct DipoleResult {
    double separation = 0.0;
    double energy = 0.0;      // I of the dipole with both halves Nehari-projected
    double raw_energy = 0.0;  // I of the plain two-translate difference
    double two_c = 0.0;       // 2 I(u)
    double gap = 0.0;         // energy - two_c
    double overlap = 0.0;     // int |u(.+k) u(.-k)|
};

/// For each separation: build the dipole, project its positive and negative
/// parts onto the Nehari set separately, and compare with 2 I(u).
std::vector<DipoleResult> dipole_study(const Field& u, const EnergyFunctional& functional,
                                       std::span<const double> separations);

}  // namespace pcnls
