#include "reachgrid/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace reachgrid {

void GridSpec::validate() const {
    if (axes.empty() || axes.size() > 5)
        throw std::invalid_argument("grid must have 1 to 5 dimensions");
    for (const auto& ax : axes) {
        if (ax.count < 3)
            throw std::invalid_argument("axis '" + ax.name + "' needs at least 3 nodes");
        if (!(ax.lo < ax.hi))
            throw std::invalid_argument("axis '" + ax.name + "' has empty extent");
    }
}

Grid::Grid(GridSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const int n = spec_.ndim();
    nodes_.resize(static_cast<std::size_t>(n));
    spacing_.resize(static_cast<std::size_t>(n));
    strides_.assign(static_cast<std::size_t>(n), 1);
    size_ = 1;
    for (int d = 0; d < n; ++d) {
        const auto& ax = spec_.axes[static_cast<std::size_t>(d)];
        const double dx = ax.periodic ? (ax.hi - ax.lo) / ax.count
                                      : (ax.hi - ax.lo) / (ax.count - 1);
        spacing_[static_cast<std::size_t>(d)] = dx;
        auto& nd = nodes_[static_cast<std::size_t>(d)];
        nd.resize(static_cast<std::size_t>(ax.count));
        for (int i = 0; i < ax.count; ++i)
            nd[static_cast<std::size_t>(i)] = ax.lo + dx * i;
        size_ *= static_cast<std::size_t>(ax.count);
    }
    for (int d = n - 2; d >= 0; --d)
        strides_[static_cast<std::size_t>(d)] =
            strides_[static_cast<std::size_t>(d + 1)] *
            static_cast<std::size_t>(spec_.axes[static_cast<std::size_t>(d + 1)].count);
}

int Grid::axis_index(std::string_view name) const {
    for (int d = 0; d < ndim(); ++d)
        if (spec_.axes[static_cast<std::size_t>(d)].name == name) return d;
    return -1;
}

std::size_t Grid::flat_index(std::span<const int> idx) const {
    std::size_t flat = 0;
    for (int d = 0; d < ndim(); ++d)
        flat += static_cast<std::size_t>(idx[static_cast<std::size_t>(d)]) *
                strides_[static_cast<std::size_t>(d)];
    return flat;
}

void Grid::unflatten(std::size_t flat, std::span<int> idx) const {
    for (int d = 0; d < ndim(); ++d) {
        const std::size_t s = strides_[static_cast<std::size_t>(d)];
        idx[static_cast<std::size_t>(d)] = static_cast<int>(flat / s);
        flat %= s;
    }
}

void Grid::coords(std::size_t flat, std::span<double> out) const {
    for (int d = ndim() - 1; d >= 0; --d) {
        const auto count = static_cast<std::size_t>(spec_.axes[static_cast<std::size_t>(d)].count);
        out[static_cast<std::size_t>(d)] = nodes_[static_cast<std::size_t>(d)][flat % count];
        flat /= count;
    }
}

GridPtr make_grid(GridSpec spec) { return std::make_shared<const Grid>(std::move(spec)); }

ValueField make_field(GridPtr grid, std::string label, double fill) {
    ValueField f;
    f.values.assign(grid->size(), fill);
    f.grid = std::move(grid);
    f.label = std::move(label);
    return f;
}

void TargetRect::validate() const {
    if (!(c1 > 0.0) || !(c2 > 0.0))
        throw std::invalid_argument("target rectangle half extents must be positive");
}

ValueField signed_distance_rect(GridPtr grid, const TargetRect& target, std::string label,
                                std::string_view x_axis, std::string_view y_axis) {
    target.validate();
    const int dx = grid->axis_index(x_axis);
    const int dy = grid->axis_index(y_axis);
    if (dx < 0 || dy < 0)
        throw std::invalid_argument("grid lacks the positional axes for a target rectangle");
    ValueField f = make_field(grid, std::move(label));
    const auto& g = *grid;
    std::vector<double> z(static_cast<std::size_t>(g.ndim()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.coords(i, z);
        f.values[i] = std::max(std::abs(z[static_cast<std::size_t>(dx)]) - target.c1,
                               std::abs(z[static_cast<std::size_t>(dy)]) - target.c2);
    }
    return f;
}

std::vector<std::uint8_t> rasterize_rects(const Grid& grid, const std::vector<CurbRect>& rects,
                                          std::string_view x_axis, std::string_view y_axis) {
    const int dx = grid.axis_index(x_axis);
    const int dy = grid.axis_index(y_axis);
    if (dx < 0 || dy < 0)
        throw std::invalid_argument("grid lacks positional axes for occupancy raster");
    const auto& xs = grid.nodes(dx);
    const auto& ys = grid.nodes(dy);
    std::vector<std::uint8_t> occ(xs.size() * ys.size(), 0);
    for (std::size_t ix = 0; ix < xs.size(); ++ix)
        for (std::size_t iy = 0; iy < ys.size(); ++iy)
            for (const auto& r : rects)
                if (xs[ix] >= r.x0 && xs[ix] <= r.x1 && ys[iy] >= r.y0 && ys[iy] <= r.y1) {
                    occ[ix * ys.size() + iy] = 1;
                    break;
                }
    return occ;
}

ValueField signed_distance_occupancy(GridPtr grid, const std::vector<std::uint8_t>& occupied,
                                     std::string label, std::string_view x_axis,
                                     std::string_view y_axis) {
    const int dx = grid->axis_index(x_axis);
    const int dy = grid->axis_index(y_axis);
    if (dx < 0 || dy < 0)
        throw std::invalid_argument("grid lacks positional axes for occupancy distance");
    const auto& xs = grid->nodes(dx);
    const auto& ys = grid->nodes(dy);
    const std::size_t nx = xs.size(), ny = ys.size();
    if (occupied.size() != nx * ny)
        throw std::invalid_argument("occupancy raster size does not match grid");

    // Brute-force signed Chebyshev transform over the positional plane. Grids
    // here are small enough that the quadratic scan is not worth improving on.
    std::vector<double> plane(nx * ny);
    for (std::size_t ix = 0; ix < nx; ++ix) {
        for (std::size_t iy = 0; iy < ny; ++iy) {
            const bool inside = occupied[ix * ny + iy] != 0;
            double best = kFarValue;
            for (std::size_t jx = 0; jx < nx; ++jx)
                for (std::size_t jy = 0; jy < ny; ++jy) {
                    if ((occupied[jx * ny + jy] != 0) == inside) continue;
                    const double d = std::max(std::abs(xs[ix] - xs[jx]), std::abs(ys[iy] - ys[jy]));
                    best = std::min(best, d);
                }
            plane[ix * ny + iy] = inside ? -best : best;
        }
    }

    ValueField f = make_field(grid, std::move(label));
    const auto& g = *grid;
    const std::size_t sx = g.stride(dx), sy = g.stride(dy);
    const auto cx = static_cast<std::size_t>(g.axis(dx).count);
    const auto cy = static_cast<std::size_t>(g.axis(dy).count);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t ix = (i / sx) % cx;
        const std::size_t iy = (i / sy) % cy;
        f.values[i] = plane[ix * ny + iy];
    }
    return f;
}

double interpolate(const ValueField& field, std::span<const double> x, OobPolicy policy,
                   InterpStats* stats) {
    const Grid& g = *field.grid;
    const int n = g.ndim();
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("query dimension does not match grid");

    int base[5];
    int next[5];
    double frac[5];
    for (int d = 0; d < n; ++d) {
        const auto& ax = g.axis(d);
        const auto& nd = g.nodes(d);
        const double dx = g.spacing(d);
        const double q = x[static_cast<std::size_t>(d)];
        if (ax.periodic) {
            double u = (q - ax.lo) / dx;
            u -= std::floor(u / ax.count) * ax.count;
            if (u >= ax.count) u = 0.0;  // guard against rounding at the seam
            int i0 = static_cast<int>(std::floor(u));
            if (i0 >= ax.count) i0 = ax.count - 1;
            double fr = u - i0;
            // Exact node queries must return stored values exactly; the
            // division above can be off by an ulp, so snap onto a node whose
            // coordinate matches the raw query.
            const int ir = static_cast<int>(std::lround(u));
            if (ir >= 0 && ir < ax.count && q == nd[static_cast<std::size_t>(ir)]) {
                i0 = ir;
                fr = 0.0;
            }
            base[d] = i0;
            next[d] = (i0 + 1) % ax.count;
            frac[d] = fr;
        } else {
            double u = (q - ax.lo) / dx;
            if (u < 0.0 || u > static_cast<double>(ax.count - 1)) {
                if (policy == OobPolicy::Throw)
                    throw std::out_of_range("interpolation query outside grid on axis '" + ax.name +
                                            "'");
                if (stats) ++stats->clamped;
                u = std::clamp(u, 0.0, static_cast<double>(ax.count - 1));
            }
            int i0 = static_cast<int>(std::floor(u));
            double fr;
            const int ir = static_cast<int>(std::lround(u));
            if (ir >= 0 && ir < ax.count && q == nd[static_cast<std::size_t>(ir)]) {
                i0 = std::min(ir, ax.count - 2);
                fr = static_cast<double>(ir - i0);
            } else {
                if (i0 > ax.count - 2) i0 = ax.count - 2;
                if (i0 < 0) i0 = 0;
                fr = std::clamp(u - i0, 0.0, 1.0);
            }
            base[d] = i0;
            next[d] = i0 + 1;
            frac[d] = fr;
        }
    }

    const int corners = 1 << n;
    double acc = 0.0;
    for (int c = 0; c < corners; ++c) {
        std::size_t flat = 0;
        double w = 1.0;
        for (int d = 0; d < n; ++d) {
            const bool hi = (c >> d) & 1;
            flat += static_cast<std::size_t>(hi ? next[d] : base[d]) * g.stride(d);
            w *= hi ? frac[d] : 1.0 - frac[d];
        }
        if (w != 0.0) acc += w * field.values[flat];
    }
    return acc;
}

}  // namespace reachgrid
