#include "pcnls/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pcnls/errors.hpp"

namespace pcnls {

GridSpec GridSpec::build(int total_dims, int confined_dims,
                         std::vector<double> half_widths,
                         std::vector<std::size_t> points_per_axis) {
    if (total_dims < 2) {
        throw ValidationError("grid: N >= 2 required, got N = " + std::to_string(total_dims));
    }
    if (confined_dims < 1) {
        throw ValidationError("grid: m >= 1 required, got m = " + std::to_string(confined_dims));
    }
    if (confined_dims >= total_dims) {
        throw ValidationError("grid: m < N required, got m = " + std::to_string(confined_dims) +
                              ", N = " + std::to_string(total_dims));
    }
    const auto n_axes = static_cast<std::size_t>(total_dims);
    auto broadcast = [&](auto& v, const char* what) {
        if (v.size() == 1) v.assign(n_axes, v.front());
        if (v.size() != n_axes) {
            std::ostringstream msg;
            msg << "grid: expected 1 or " << n_axes << " values for " << what << ", got " << v.size();
            throw ValidationError(msg.str());
        }
    };
    broadcast(half_widths, "half_width");
    broadcast(points_per_axis, "points_per_axis");

    GridSpec spec;
    spec.confined_ = confined_dims;
    spec.axes_.resize(n_axes);
    spec.cell_volume_ = 1.0;
    for (std::size_t a = 0; a < n_axes; ++a) {
        const double L = half_widths[a];
        const std::size_t n = points_per_axis[a];
        if (!(L > 0.0) || !std::isfinite(L)) {
            throw ValidationError("grid: half_width must be positive on axis " + std::to_string(a));
        }
        if (n < 3) {
            throw ValidationError("grid: at least 3 interior points required on axis " +
                                  std::to_string(a) + ", got " + std::to_string(n));
        }
        spec.axes_[a] = Axis{n, L, 2.0 * L / static_cast<double>(n + 1)};
        spec.cell_volume_ *= spec.axes_[a].spacing;
    }
    spec.strides_.assign(n_axes, 1);
    for (std::size_t a = n_axes - 1; a > 0; --a) {
        spec.strides_[a - 1] = spec.strides_[a] * spec.axes_[a].points;
    }
    spec.size_ = spec.strides_[0] * spec.axes_[0].points;
    return spec;
}

double GridSpec::coordinate(int a, std::size_t i) const {
    return 0.5 * static_cast<double>(doubled_offset(a, i)) * spacing(a);
}

long GridSpec::doubled_offset(int a, std::size_t i) const {
    return 2 * static_cast<long>(i) - (static_cast<long>(points(a)) - 1);
}

std::size_t GridSpec::flat_index(std::span<const std::size_t> idx) const {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a) flat += idx[a] * strides_[a];
    return flat;
}

void GridSpec::unflatten(std::size_t flat, std::span<std::size_t> idx) const {
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        idx[a] = flat / strides_[a];
        flat %= strides_[a];
    }
}

Field::Field(GridSpec grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

Field::Field(GridSpec grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw ValidationError("field: expected " + std::to_string(grid_.size()) +
                              " values, got " + std::to_string(values_.size()));
    }
    if (!all_finite()) throw ValidationError("field: non-finite value");
}

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool Field::is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double Field::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void require_same_grid(const Field& a, const Field& b, std::string_view where) {
    if (!(a.grid() == b.grid())) {
        throw ValidationError(std::string(where) + ": grid mismatch");
    }
}

Field& Field::operator+=(const Field& other) {
    require_same_grid(*this, other, "field +=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

Field& Field::operator-=(const Field& other) {
    require_same_grid(*this, other, "field -=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

Field& Field::operator*=(double a) {
    for (double& v : values_) v *= a;
    return *this;
}

Field& Field::axpy(double a, const Field& x) {
    require_same_grid(*this, x, "field axpy");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double a, Field f) { return f *= a; }

Field hadamard(const Field& a, const Field& b) {
    require_same_grid(a, b, "hadamard");
    Field out(a);
    auto o = out.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] *= bv[i];
    return out;
}

Field abs(Field f) {
    for (double& v : f.values()) v = std::abs(v);
    return f;
}

Field positive_part(Field f) {
    for (double& v : f.values()) v = v > 0.0 ? v : 0.0;
    return f;
}

Field negative_part(Field f) {
    for (double& v : f.values()) v = v < 0.0 ? -v : 0.0;
    return f;
}

double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t kBlock = 128;
    if (values.size() <= kBlock) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double integrate(const Field& f) {
    return f.grid().cell_volume() * pairwise_sum(f.values());
}

double integrate_product(const Field& a, const Field& b) {
    require_same_grid(a, b, "integrate_product");
    std::vector<double> prod(a.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = a[i] * b[i];
    return a.grid().cell_volume() * pairwise_sum(prod);
}

double l2_norm(const Field& f) { return std::sqrt(integrate_product(f, f)); }

namespace {

// Visits every grid line along axis `a`: calls fn(first_flat_index, stride, n).
template <class Fn>
void for_each_line(const GridSpec& g, int a, Fn&& fn) {
    const std::size_t s = g.stride(a);
    const std::size_t n = g.points(a);
    const std::size_t block = s * n;
    for (std::size_t base = 0; base < g.size(); base += block) {
        for (std::size_t j = 0; j < s; ++j) fn(base + j, s, n);
    }
}

}  // namespace

Field laplacian_apply(const Field& f) {
    const GridSpec& g = f.grid();
    Field out(g);
    auto in = f.values();
    auto o = out.values();
    for (int a = 0; a < g.dims(); ++a) {
        const double w = 1.0 / (g.spacing(a) * g.spacing(a));
        for_each_line(g, a, [&](std::size_t start, std::size_t s, std::size_t n) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t k = start + i * s;
                const double left = i > 0 ? in[k - s] : 0.0;
                const double right = i + 1 < n ? in[k + s] : 0.0;
                o[k] += w * (left - 2.0 * in[k] + right);
            }
        });
    }
    return out;
}

double dirichlet_energy(const Field& f) {
    const GridSpec& g = f.grid();
    auto in = f.values();
    // Per-node accumulation of the edge to the lower neighbour (plus the
    // closing boundary edge at the top of each line), then one pairwise sum.
    std::vector<double> edges(g.size(), 0.0);
    for (int a = 0; a < g.dims(); ++a) {
        const double w = 1.0 / (g.spacing(a) * g.spacing(a));
        for_each_line(g, a, [&](std::size_t start, std::size_t s, std::size_t n) {
            double prev = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t k = start + i * s;
                const double d = in[k] - prev;
                edges[k] += w * d * d;
                prev = in[k];
            }
            edges[start + (n - 1) * s] += w * prev * prev;
        });
    }
    return g.cell_volume() * pairwise_sum(edges);
}

}  // namespace pcnls
