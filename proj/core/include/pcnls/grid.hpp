#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace pcnls {

struct Axis {
    std::size_t points = 0;   // interior node count n
    double half_width = 0.0;  // L
    double spacing = 0.0;     // h = 2L/(n+1)

    bool operator==(const Axis&) const = default;
};

/// Truncated tensor-product grid over [-L_1,L_1] x ... x [-L_N,L_N] with
/// homogeneous Dirichlet data. The first `confined_dims` axes carry the
/// harmonic confinement, the remaining ones are free.
///
/// Node values are stored row-major with axis 0 slowest. Only interior nodes
/// are stored; the boundary layer is implicitly zero.
class GridSpec {
public:
    /// `half_widths` and `points_per_axis` hold either one entry (shared by
    /// every axis) or one entry per axis. Throws ValidationError.
    static GridSpec build(int total_dims, int confined_dims,
                          std::vector<double> half_widths,
                          std::vector<std::size_t> points_per_axis);

    int dims() const { return static_cast<int>(axes_.size()); }
    int confined_dims() const { return confined_; }
    int free_dims() const { return dims() - confined_; }

    const Axis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
    std::span<const Axis> axes() const { return axes_; }
    std::size_t points(int a) const { return axis(a).points; }
    double spacing(int a) const { return axis(a).spacing; }

    std::size_t size() const { return size_; }
    std::size_t stride(int a) const { return strides_[static_cast<std::size_t>(a)]; }

    /// Equals -L + (i+1)h, evaluated as (i - (n-1)/2)h so that mirrored nodes
    /// carry exactly negated coordinates.
    double coordinate(int a, std::size_t i) const;

    /// 2i - (n-1): integer offset from the axis centre in half-spacing units.
    long doubled_offset(int a, std::size_t i) const;

    double cell_volume() const { return cell_volume_; }

    std::size_t flat_index(std::span<const std::size_t> idx) const;
    void unflatten(std::size_t flat, std::span<std::size_t> idx) const;

    bool operator==(const GridSpec& other) const {
        return confined_ == other.confined_ && axes_ == other.axes_;
    }

private:
    GridSpec() = default;

    int confined_ = 0;
    std::vector<Axis> axes_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 0;
    double cell_volume_ = 0.0;
};

/// Real grid function on the interior nodes of a GridSpec.
class Field {
public:
    explicit Field(GridSpec grid);
    /// Throws ValidationError on length mismatch or non-finite values.
    Field(GridSpec grid, std::vector<double> values);

    /// Samples fn(z) at every interior node; z has one coordinate per axis.
    template <class Fn>
    static Field sample(const GridSpec& grid, Fn&& fn);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    const std::vector<double>& data() const { return values_; }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    bool all_finite() const;
    bool is_zero() const;
    double max_abs() const;

    Field& operator+=(const Field& other);
    Field& operator-=(const Field& other);
    Field& operator*=(double a);
    /// this += a * x
    Field& axpy(double a, const Field& x);

private:
    GridSpec grid_;
    std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double a, Field f);
Field hadamard(const Field& a, const Field& b);
Field abs(Field f);
Field positive_part(Field f);
Field negative_part(Field f);  // max(-f, 0), nonnegative

void require_same_grid(const Field& a, const Field& b, std::string_view where);

/// Pairwise summation with a fixed split pattern (independent of threading).
double pairwise_sum(std::span<const double> values);

/// Rectangle rule on interior nodes: h^N * sum of values.
double integrate(const Field& f);
/// integrate(a * b) without materialising the product.
double integrate_product(const Field& a, const Field& b);
double l2_norm(const Field& f);

/// Second-order central-difference Laplacian with zero ghost values. Equal to
/// minus the gradient of dirichlet_energy / 2 with respect to the h^N-weighted
/// inner product.
Field laplacian_apply(const Field& f);

/// Sum over axes of squared forward differences, boundary jumps against zero
/// included, scaled by h^N / h_a^2.
double dirichlet_energy(const Field& f);

template <class Fn>
Field Field::sample(const GridSpec& grid, Fn&& fn) {
    Field out(grid);
    const int n = grid.dims();
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        for (int a = 0; a < n; ++a) z[a] = grid.coordinate(a, idx[a]);
        out.values_[flat] = fn(std::span<const double>(z));
        for (int a = n - 1; a >= 0; --a) {
            if (++idx[a] < grid.points(a)) break;
            idx[a] = 0;
        }
    }
    return out;
}

}  // namespace pcnls
