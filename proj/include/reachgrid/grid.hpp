#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace reachgrid {

/// One grid dimension. For a periodic axis the stored range covers exactly
/// one period and the duplicate endpoint is omitted, so node spacing is
/// (hi - lo) / count instead of (hi - lo) / (count - 1).
struct AxisSpec {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    int count = 3;
    bool periodic = false;
};

struct GridSpec {
    std::vector<AxisSpec> axes;

    int ndim() const { return static_cast<int>(axes.size()); }

    /// Throws std::invalid_argument on: ndim outside 1..5, count < 3, lo >= hi.
    void validate() const;
};

/// Dense rectilinear grid with materialized node coordinates and row-major
/// strides (last axis contiguous). Immutable after construction.
class Grid {
public:
    explicit Grid(GridSpec spec);

    int ndim() const { return spec_.ndim(); }
    std::size_t size() const { return size_; }
    const GridSpec& spec() const { return spec_; }
    const AxisSpec& axis(int d) const { return spec_.axes[static_cast<std::size_t>(d)]; }

    /// Index of the axis with the given name, or -1.
    int axis_index(std::string_view name) const;

    double spacing(int d) const { return spacing_[static_cast<std::size_t>(d)]; }
    const std::vector<double>& nodes(int d) const { return nodes_[static_cast<std::size_t>(d)]; }
    std::size_t stride(int d) const { return strides_[static_cast<std::size_t>(d)]; }

    std::size_t flat_index(std::span<const int> idx) const;
    void unflatten(std::size_t flat, std::span<int> idx) const;
    void coords(std::size_t flat, std::span<double> out) const;

private:
    GridSpec spec_;
    std::vector<std::vector<double>> nodes_;
    std::vector<std::size_t> strides_;
    std::vector<double> spacing_;
    std::size_t size_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(GridSpec spec);

/// Scalar field over a grid, row-major flat storage.
struct ValueField {
    GridPtr grid;
    std::vector<double> values;
    std::string label;

    double& at(std::span<const int> idx) { return values[grid->flat_index(idx)]; }
    double at(std::span<const int> idx) const { return values[grid->flat_index(idx)]; }
};

ValueField make_field(GridPtr grid, std::string label, double fill = 0.0);

/// Collision rectangle half-extents around the robot car, meters.
struct TargetRect {
    double c1 = 2.5;   // half extent along x_rel
    double c2 = 1.25;  // half extent along y_rel

    void validate() const;
};

/// l(z) = max(|x| - c1, |y| - c2) over the named positional axes, broadcast
/// across the remaining dimensions. l(z) <= 0 exactly on the rectangle.
ValueField signed_distance_rect(GridPtr grid, const TargetRect& target,
                                std::string label = "target",
                                std::string_view x_axis = "x_rel",
                                std::string_view y_axis = "y_rel");

/// Axis-aligned occupied rectangle in world coordinates (curbs, obstacles).
struct CurbRect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

/// Cell-center occupancy raster over the grid's positional axes.
std::vector<std::uint8_t> rasterize_rects(const Grid& grid, const std::vector<CurbRect>& rects,
                                          std::string_view x_axis = "x_r",
                                          std::string_view y_axis = "y_r");

/// Signed Chebyshev distance to the occupied set, negative inside, broadcast
/// over the non-positional dimensions. Empty occupancy gives +kFarValue.
ValueField signed_distance_occupancy(GridPtr grid, const std::vector<std::uint8_t>& occupied,
                                     std::string label = "curbs",
                                     std::string_view x_axis = "x_r",
                                     std::string_view y_axis = "y_r");

inline constexpr double kFarValue = 1.0e6;

enum class OobPolicy { Clamp, Throw };

struct InterpStats {
    long long clamped = 0;
};

/// Multilinear interpolation. Periodic axes wrap across the seam; queries
/// outside a non-periodic axis are clamped to the boundary (counted in
/// stats) or rejected, per policy.
double interpolate(const ValueField& field, std::span<const double> x,
                   OobPolicy policy = OobPolicy::Clamp, InterpStats* stats = nullptr);

}  // namespace reachgrid
