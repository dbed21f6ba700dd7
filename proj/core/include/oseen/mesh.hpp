#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

namespace oseen {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class BoundaryMarker : std::uint8_t { Wall = 0, Inlet = 1, Outlet = 2 };

std::string_view to_string(BoundaryMarker marker);

struct BoundaryEdge {
    std::array<int, 2> vertices;
    BoundaryMarker marker = BoundaryMarker::Wall;
};

/// Conforming triangle mesh. Cells are counter-clockwise; every boundary
/// edge is owned by exactly one cell. Immutable once built.
class TriMesh {
public:
    TriMesh() = default;

    /// Validates the invariants and computes per-cell diameters. Cells with
    /// negative orientation or non-conforming edges are rejected.
    TriMesh(std::vector<Vec2> vertices,
            std::vector<std::array<int, 3>> cells,
            std::vector<BoundaryEdge> boundary_edges,
            std::vector<int> parent_cell = {});

    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& cells() const { return cells_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }
    const std::vector<double>& cell_diameters() const { return cell_diameter_; }

    /// Index of the quadrilateral a triangle was split from, or empty when
    /// the mesh was not produced by criss-cross refinement.
    const std::vector<int>& parent_cells() const { return parent_cell_; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }

    const Vec2& vertex(int i) const { return vertices_[static_cast<std::size_t>(i)]; }
    const std::array<int, 3>& cell(int c) const { return cells_[static_cast<std::size_t>(c)]; }
    double diameter(int c) const { return cell_diameter_[static_cast<std::size_t>(c)]; }

    double signed_area(int c) const;
    double total_area() const;
    double max_diameter() const;
    double min_diameter() const;

    bool has_marker(BoundaryMarker marker) const;

private:
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> cells_;
    std::vector<BoundaryEdge> boundary_edges_;
    std::vector<double> cell_diameter_;
    std::vector<int> parent_cell_;
};

/// Structured quadrilateral grid over a mapped reference rectangle [0,1]^2.
/// Cell (i, j) has index j * nx + i; i runs along the first reference axis.
struct QuadGrid {
    using GeometryMap = std::function<Vec2(double s, double t)>;

    int nx = 0;
    int ny = 0;
    GeometryMap map;
    /// Markers of the sides s = 0, s = 1, t = 0, t = 1.
    std::array<BoundaryMarker, 4> side_markers{BoundaryMarker::Wall, BoundaryMarker::Wall,
                                               BoundaryMarker::Wall, BoundaryMarker::Wall};
    /// One constant 2-vector per cell (e.g. a pixel velocity).
    std::vector<Vec2> payload;

    int num_cells() const { return nx * ny; }
    Vec2 node(int i, int j) const;
    std::array<Vec2, 4> corners(int cell) const;
    double cell_area(int cell) const;

    /// Same geometry map with twice as many cells in each direction; the
    /// payload is inherited by the four children.
    QuadGrid refined() const;
};

enum class TriPattern { Right, CrissCross };

struct RectBounds {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

QuadGrid build_rect_quad_grid(const RectBounds& bounds, int nx, int ny,
                              bool inlet_outlet = false);

/// Triangulates an axis-aligned rectangle. With `inlet_outlet` the side
/// x = x0 is marked INLET and x = x1 OUTLET; everything else is WALL.
TriMesh build_rect_tri_mesh(const RectBounds& bounds, int nx, int ny, TriPattern pattern,
                            bool inlet_outlet = false);

/// Splits every quadrilateral at its vertex barycenter into four triangles.
TriMesh crisscross_refine(const QuadGrid& grid);

/// Splits every quadrilateral along one diagonal.
TriMesh right_split(const QuadGrid& grid);

struct BentChannel {
    double inner_radius = 1.0;
    double outer_radius = 2.0;
    double leg_length = 3.0;

    double exact_area() const;
};

/// Channel with a straight inflow leg, a quarter-annulus bend and a straight
/// outflow leg. The first reference axis runs along the channel (n_along
/// cells, uniform in centerline arc length), the second across it from the
/// outer wall to the inner wall.
QuadGrid build_bent_quad_grid(const BentChannel& channel, int n_across, int n_along);

/// Piecewise-constant quad payload to vertex values by arithmetic averaging
/// over the triangles touching each vertex.
std::vector<Vec2> average_payload_to_vertices(const TriMesh& mesh, const QuadGrid& grid);

} // namespace oseen
