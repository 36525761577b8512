#include <gtest/gtest.h>

#include <cmath>

#include "pcnls/analysis.hpp"
#include "pcnls/errors.hpp"
#include "pcnls/symmetry.hpp"
#include "support.hpp"

namespace pcnls {
namespace {

using testing::gaussian;
using testing::random_field;

// Independent component count: union-find over face neighbours.
int reference_components(const Field& u, double tau, int sign) {
    const GridSpec& g = u.grid();
    std::vector<std::size_t> parent(g.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto in = [&](std::size_t p) { return sign * u[p] > tau; };
    std::vector<std::size_t> idx(static_cast<std::size_t>(g.dims()));
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (!in(p)) continue;
        g.unflatten(p, idx);
        for (int a = 0; a < g.dims(); ++a) {
            if (idx[a] + 1 < g.points(a) && in(p + g.stride(a))) parent[find(p)] = find(p + g.stride(a));
        }
    }
    int count = 0;
    for (std::size_t p = 0; p < g.size(); ++p) count += in(p) && find(p) == p;
    return count;
}

TEST(NodalDomains, ProductOfOddFactors) {
    const auto g = GridSpec::build(3, 2, {3.0, 3.0, 4.0}, {15, 15, 17});
    const Field u = Field::sample(g, [](std::span<const double> z) {
        return z[0] * z[1] * std::exp(-(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]));
    });
    const auto r = count_nodal_domains(u, default_nodal_threshold(u));
    EXPECT_EQ(r.positive_domains, 2);
    EXPECT_EQ(r.negative_domains, 2);
    EXPECT_EQ(r.total(), 4);
    const Field one = Field::sample(g, [](std::span<const double> z) {
        return z[0] * std::exp(-(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]));
    });
    EXPECT_EQ(count_nodal_domains(one, default_nodal_threshold(one)).total(), 2);
    EXPECT_EQ(count_nodal_domains(gaussian(g, 1.0), 0.0).total(), 1);
    EXPECT_EQ(count_nodal_domains(Field(g), 0.0).total(), 0);
}

TEST(NodalDomains, DiagonalNeighboursAreSeparate) {
    const auto g = GridSpec::build(2, 1, {2.0}, {5});
    Field u(g);
    u[g.flat_index(std::vector<std::size_t>{1, 1})] = 1.0;
    u[g.flat_index(std::vector<std::size_t>{2, 2})] = 1.0;
    u[g.flat_index(std::vector<std::size_t>{3, 3})] = -1.0;
    u[g.flat_index(std::vector<std::size_t>{3, 2})] = -1.0;
    const auto r = count_nodal_domains(u, 0.5);
    EXPECT_EQ(r.positive_domains, 2);
    EXPECT_EQ(r.negative_domains, 1);
}

TEST(NodalDomains, MatchesUnionFindOnRandomFields) {
    const auto g = GridSpec::build(3, 2, {2.0}, {9, 9, 11});
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const Field u = random_field(g, rng);
        for (double tau : {0.0, 0.3, 0.7}) {
            const auto r = count_nodal_domains(u, tau);
            EXPECT_EQ(r.positive_domains, reference_components(u, tau, 1));
            EXPECT_EQ(r.negative_domains, reference_components(u, tau, -1));
        }
    }
}

TEST(NodalDomains, MonotoneInThresholdForSeparatedBumps) {
    const auto g = GridSpec::build(2, 1, {6.0}, {61});
    const Field u = gaussian(g, 0.5, {-3.0, 0.0}) + gaussian(g, 0.5, {3.0, 0.0});
    EXPECT_EQ(count_nodal_domains(u, 1e-6).total(), 2);
    EXPECT_EQ(count_nodal_domains(u, 0.0).total(), 1);
    EXPECT_THROW(count_nodal_domains(u, -1.0), ValidationError);
}

TEST(CenterOfMass, TranslatesWithTheField) {
    const auto g = GridSpec::build(3, 1, {4.0, 6.0, 6.0}, {41, 61, 61});
    const auto c = center_of_mass(gaussian(g, 0.8, {0.0, 1.0, -2.0}));
    ASSERT_EQ(c.size(), 2u);
    EXPECT_NEAR(c[0], 1.0, 1e-8);
    EXPECT_NEAR(c[1], -2.0, 1e-8);
    EXPECT_THROW(center_of_mass(Field(g)), DomainError);
}

TEST(Radial, ExactForRadialFunctionsAndPositiveOtherwise) {
    const auto g = GridSpec::build(3, 2, {4.0, 4.0, 5.0}, {31, 31, 39});  // h = 1/4
    const Field u = gaussian(g, 1.0);
    const auto x = radial_symmetry_residual(u, RadialBlock::x_block(g));
    EXPECT_LE(x.residual, 1e-15);
    EXPECT_LE(x.monotonicity_defect, 1e-15);
    EXPECT_GT(x.shells, 10);
    const auto y = radial_symmetry_residual(u, RadialBlock::y_block(g));
    EXPECT_LE(y.residual, 1e-15);

    const Field skew = gaussian(g, 1.0, {0.5, 0.0, 0.0});
    EXPECT_GT(radial_symmetry_residual(skew, RadialBlock::x_block(g)).residual, 0.05);
    const double c[] = {0.5, 0.0};
    EXPECT_LE(radial_symmetry_residual(skew, RadialBlock::x_block(g), c).residual, 1e-15);
}

TEST(Radial, RingProfileIsNotMonotone) {
    const auto g = GridSpec::build(3, 2, {4.0, 4.0, 1.0}, {41, 41, 3});
    const Field ring = Field::sample(g, [](std::span<const double> z) {
        const double r = std::hypot(z[0], z[1]);
        return std::exp(-(r - 2.0) * (r - 2.0));
    });
    const auto rep = radial_symmetry_residual(ring, RadialBlock::x_block(g));
    EXPECT_LE(rep.residual, 1e-15);
    EXPECT_GT(rep.monotonicity_defect, 0.5);
}

TEST(Radial, OneAxisBlockMeasuresEvenness) {
    const auto g = GridSpec::build(2, 1, {4.0, 5.0}, {41, 51});
    EXPECT_LE(radial_symmetry_residual(gaussian(g, 1.0, {0.0, 1.0}), RadialBlock::x_block(g)).residual,
              1e-15);
    EXPECT_GT(radial_symmetry_residual(gaussian(g, 1.0, {0.5, 0.0}), RadialBlock::x_block(g)).residual,
              0.05);
}

TEST(Decay, BoundaryLayerRatio) {
    const auto g = GridSpec::build(2, 1, {8.0}, {81});
    EXPECT_LT(decay_metric(gaussian(g, 1.0)), 1e-12);
    Field flat = Field::sample(g, [](std::span<const double>) { return 1.0; });
    EXPECT_DOUBLE_EQ(decay_metric(flat), 1.0);
    EXPECT_EQ(decay_metric(Field(g)), 0.0);
}

TEST(Translate, ShiftsAndZeroFills) {
    const auto g = GridSpec::build(2, 1, {2.0}, {5});
    std::mt19937_64 rng(2);
    const Field u = random_field(g, rng);
    const Field t = translate(u, 1, 2);
    std::vector<std::size_t> idx(2);
    for (std::size_t p = 0; p < g.size(); ++p) {
        g.unflatten(p, idx);
        if (idx[1] + 2 < 5) {
            EXPECT_EQ(t[p], u[p + 2 * g.stride(1)]);
        } else {
            EXPECT_EQ(t[p], 0.0);
        }
    }
    EXPECT_TRUE(testing::bitwise_equal(translate(u, 0, 0), u));
}

TEST(Truncate, ZeroesSmallEntries) {
    const auto g = GridSpec::build(2, 1, {2.0}, {3});
    Field u(g, {0.1, -0.2, 0.3, -0.05, 0.0, 1.0, 2.0, -3.0, 0.15});
    const Field t = truncate_below(u, 0.15);
    EXPECT_EQ(t[0], 0.0);
    EXPECT_EQ(t[1], -0.2);
    EXPECT_EQ(t[3], 0.0);
    EXPECT_EQ(t[8], 0.15);
}

TEST(Dipole, ConstructionIsAntisymmetricDifference) {
    const auto g = GridSpec::build(2, 1, {4.0, 8.0}, {39, 79});  // h = 1/5
    const Field u = gaussian(g, 0.7);
    const Field d = dipole_construct(u, 3.0);
    EXPECT_LE(testing::max_abs_difference(d, gaussian(g, 0.7, {0.0, -3.0}) - gaussian(g, 0.7, {0.0, 3.0})),
              1e-14);
    EXPECT_THROW(dipole_construct(u, 3.05), ValidationError);
    EXPECT_THROW(dipole_construct(u, 8.0), ValidationError);
}

TEST(Dipole, DisjointSupportsGiveTheSplittingIdentity) {
    const auto g = GridSpec::build(2, 1, {4.0, 12.0}, {39, 119});
    const auto model = NonlinearityModel::pure_power(4.0);
    const EnergyFunctional f(model, potential_values(g));
    Field u = truncate_below(gaussian(g, 0.7), 1e-3);
    u *= f.nehari_scale(u);
    const double seps[] = {6.0};
    const auto r = dipole_study(u, f, seps);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].overlap, 0.0);
    EXPECT_NEAR(r[0].raw_energy, r[0].two_c, 1e-12 * r[0].two_c);
    EXPECT_NEAR(r[0].energy, r[0].two_c, 1e-12 * r[0].two_c);
    EXPECT_NEAR(r[0].gap, 0.0, 1e-12 * r[0].two_c);
}

TEST(Dipole, GapShrinksWithSeparation) {
    const auto g = GridSpec::build(2, 1, {4.0, 12.0}, {39, 119});
    const EnergyFunctional f(NonlinearityModel::pure_power(4.0), potential_values(g));
    Field u = gaussian(g, 1.0);
    u *= f.nehari_scale(u);
    const double seps[] = {1.0, 2.0, 4.0};
    const auto r = dipole_study(u, f, seps);
    for (std::size_t i = 1; i < r.size(); ++i) {
        EXPECT_LE(r[i].gap, r[i - 1].gap);
        EXPECT_LT(r[i].overlap, r[i - 1].overlap);
    }
}

}  // namespace
}  // namespace pcnls
