#include "oseen/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace oseen {

std::string_view to_string(BoundaryMarker marker)
{
    switch (marker) {
    case BoundaryMarker::Wall:
        return "WALL";
    case BoundaryMarker::Inlet:
        return "INLET";
    case BoundaryMarker::Outlet:
        return "OUTLET";
    }
    return "UNKNOWN";
}

namespace {

std::pair<int, int> edge_key(int a, int b)
{
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

double triangle_signed_area(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

} // namespace

TriMesh::TriMesh(std::vector<Vec2> vertices,
                 std::vector<std::array<int, 3>> cells,
                 std::vector<BoundaryEdge> boundary_edges,
                 std::vector<int> parent_cell)
    : vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      boundary_edges_(std::move(boundary_edges)),
      parent_cell_(std::move(parent_cell))
{
    if (cells_.empty()) {
        throw std::invalid_argument("TriMesh: no cells");
    }
    if (!parent_cell_.empty() && parent_cell_.size() != cells_.size()) {
        throw std::invalid_argument("TriMesh: parent cell table has wrong length");
    }
    const int nv = num_vertices();

    // Directed half-edge count per undirected edge: a conforming, consistently
    // oriented mesh has each interior edge once in each direction.
    std::map<std::pair<int, int>, std::array<int, 2>> edge_use;
    cell_diameter_.reserve(cells_.size());
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const auto& t = cells_[c];
        for (int v : t) {
            if (v < 0 || v >= nv) {
                throw std::invalid_argument("TriMesh: cell " + std::to_string(c) +
                                            " references vertex out of range");
            }
        }
        const double area = triangle_signed_area(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]);
        if (!(area > 0.0)) {
            throw std::invalid_argument("TriMesh: cell " + std::to_string(c) +
                                        " has non-positive signed area");
        }
        double h = 0.0;
        for (int e = 0; e < 3; ++e) {
            const int a = t[e];
            const int b = t[(e + 1) % 3];
            h = std::max(h, (vertices_[a] - vertices_[b]).norm());
            auto& use = edge_use[edge_key(a, b)];
            use[a < b ? 0 : 1] += 1;
        }
        cell_diameter_.push_back(h);
    }

    std::map<std::pair<int, int>, int> boundary_count;
    for (const auto& be : boundary_edges_) {
        const auto key = edge_key(be.vertices[0], be.vertices[1]);
        if (++boundary_count[key] > 1) {
            throw std::invalid_argument("TriMesh: duplicate boundary edge");
        }
    }
    for (const auto& [key, use] : edge_use) {
        const int total = use[0] + use[1];
        if (use[0] > 1 || use[1] > 1) {
            throw std::invalid_argument("TriMesh: inconsistent orientation or edge shared by >2 cells");
        }
        const bool on_boundary = boundary_count.count(key) != 0;
        if (total == 1 && !on_boundary) {
            throw std::invalid_argument("TriMesh: unmarked boundary edge (" + std::to_string(key.first) +
                                        "," + std::to_string(key.second) + ") or hanging node");
        }
        if (total == 2 && on_boundary) {
            throw std::invalid_argument("TriMesh: boundary edge is shared by two cells");
        }
    }
    for (const auto& [key, count] : boundary_count) {
        (void)count;
        if (edge_use.count(key) == 0) {
            throw std::invalid_argument("TriMesh: boundary edge does not belong to any cell");
        }
    }
}

double TriMesh::signed_area(int c) const
{
    const auto& t = cell(c);
    return triangle_signed_area(vertex(t[0]), vertex(t[1]), vertex(t[2]));
}

double TriMesh::total_area() const
{
    double sum = 0.0;
    for (int c = 0; c < num_cells(); ++c) {
        sum += signed_area(c);
    }
    return sum;
}

double TriMesh::max_diameter() const
{
    return *std::max_element(cell_diameter_.begin(), cell_diameter_.end());
}

double TriMesh::min_diameter() const
{
    return *std::min_element(cell_diameter_.begin(), cell_diameter_.end());
}

bool TriMesh::has_marker(BoundaryMarker marker) const
{
    return std::any_of(boundary_edges_.begin(), boundary_edges_.end(),
                       [marker](const BoundaryEdge& e) { return e.marker == marker; });
}

// ---------------------------------------------------------------------------

Vec2 QuadGrid::node(int i, int j) const
{
    return map(static_cast<double>(i) / nx, static_cast<double>(j) / ny);
}

std::array<Vec2, 4> QuadGrid::corners(int cell) const
{
    const int i = cell % nx;
    const int j = cell / nx;
    return {node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)};
}

double QuadGrid::cell_area(int cell) const
{
    const auto p = corners(cell);
    double twice = 0.0;
    for (int k = 0; k < 4; ++k) {
        const Vec2& a = p[k];
        const Vec2& b = p[(k + 1) % 4];
        twice += a.x() * b.y() - b.x() * a.y();
    }
    return 0.5 * twice;
}

QuadGrid QuadGrid::refined() const
{
    QuadGrid fine = *this;
    fine.nx = 2 * nx;
    fine.ny = 2 * ny;
    fine.payload.clear();
    if (!payload.empty()) {
        fine.payload.resize(static_cast<std::size_t>(fine.nx * fine.ny));
        for (int j = 0; j < fine.ny; ++j) {
            for (int i = 0; i < fine.nx; ++i) {
                fine.payload[static_cast<std::size_t>(j * fine.nx + i)] =
                    payload[static_cast<std::size_t>((j / 2) * nx + i / 2)];
            }
        }
    }
    return fine;
}

namespace {

void check_counts(int nx, int ny)
{
    if (nx < 1 || ny < 1) {
        throw std::invalid_argument("cell counts must be >= 1");
    }
}

void validate_grid(const QuadGrid& grid)
{
    check_counts(grid.nx, grid.ny);
    if (!grid.map) {
        throw std::invalid_argument("QuadGrid: missing geometry map");
    }
    if (!grid.payload.empty() && static_cast<int>(grid.payload.size()) != grid.num_cells()) {
        throw std::invalid_argument("QuadGrid: payload length must equal nx*ny");
    }
}

std::vector<Vec2> grid_nodes(const QuadGrid& grid)
{
    std::vector<Vec2> nodes;
    nodes.reserve(static_cast<std::size_t>((grid.nx + 1) * (grid.ny + 1)));
    for (int j = 0; j <= grid.ny; ++j) {
        for (int i = 0; i <= grid.nx; ++i) {
            nodes.push_back(grid.node(i, j));
        }
    }
    return nodes;
}

std::vector<BoundaryEdge> grid_boundary(const QuadGrid& grid)
{
    const int stride = grid.nx + 1;
    auto id = [stride](int i, int j) { return j * stride + i; };
    std::vector<BoundaryEdge> edges;
    // Counter-clockwise walk in reference coordinates: t = 0, s = 1, t = 1, s = 0.
    for (int i = 0; i < grid.nx; ++i) {
        edges.push_back({{id(i, 0), id(i + 1, 0)}, grid.side_markers[2]});
    }
    for (int j = 0; j < grid.ny; ++j) {
        edges.push_back({{id(grid.nx, j), id(grid.nx, j + 1)}, grid.side_markers[1]});
    }
    for (int i = grid.nx; i > 0; --i) {
        edges.push_back({{id(i, grid.ny), id(i - 1, grid.ny)}, grid.side_markers[3]});
    }
    for (int j = grid.ny; j > 0; --j) {
        edges.push_back({{id(0, j), id(0, j - 1)}, grid.side_markers[0]});
    }
    return edges;
}

} // namespace

QuadGrid build_rect_quad_grid(const RectBounds& b, int nx, int ny, bool inlet_outlet)
{
    check_counts(nx, ny);
    if (!(b.x1 > b.x0) || !(b.y1 > b.y0)) {
        throw std::invalid_argument("build_rect_quad_grid: degenerate bounds");
    }
    QuadGrid grid;
    grid.nx = nx;
    grid.ny = ny;
    grid.map = [b](double s, double t) {
        return Vec2(b.x0 + s * (b.x1 - b.x0), b.y0 + t * (b.y1 - b.y0));
    };
    if (inlet_outlet) {
        grid.side_markers[0] = BoundaryMarker::Inlet;
        grid.side_markers[1] = BoundaryMarker::Outlet;
    }
    return grid;
}

TriMesh build_rect_tri_mesh(const RectBounds& bounds, int nx, int ny, TriPattern pattern,
                            bool inlet_outlet)
{
    const QuadGrid grid = build_rect_quad_grid(bounds, nx, ny, inlet_outlet);
    return pattern == TriPattern::Right ? right_split(grid) : crisscross_refine(grid);
}

TriMesh crisscross_refine(const QuadGrid& grid)
{
    validate_grid(grid);
    std::vector<Vec2> vertices = grid_nodes(grid);
    const int stride = grid.nx + 1;
    std::vector<std::array<int, 3>> cells;
    std::vector<int> parent;
    cells.reserve(static_cast<std::size_t>(4 * grid.num_cells()));
    parent.reserve(cells.capacity());
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const int q = j * grid.nx + i;
            const std::array<int, 4> v{j * stride + i, j * stride + i + 1, (j + 1) * stride + i + 1,
                                       (j + 1) * stride + i};
            Vec2 center = Vec2::Zero();
            for (int k : v) {
                center += vertices[static_cast<std::size_t>(k)];
            }
            const int c = static_cast<int>(vertices.size());
            vertices.push_back(0.25 * center);
            for (int k = 0; k < 4; ++k) {
                cells.push_back({v[k], v[(k + 1) % 4], c});
                parent.push_back(q);
            }
        }
    }
    return TriMesh(std::move(vertices), std::move(cells), grid_boundary(grid), std::move(parent));
}

TriMesh right_split(const QuadGrid& grid)
{
    validate_grid(grid);
    std::vector<Vec2> vertices = grid_nodes(grid);
    const int stride = grid.nx + 1;
    std::vector<std::array<int, 3>> cells;
    std::vector<int> parent;
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const int q = j * grid.nx + i;
            const int v0 = j * stride + i;
            const int v1 = v0 + 1;
            const int v2 = v1 + stride;
            const int v3 = v0 + stride;
            cells.push_back({v0, v1, v2});
            cells.push_back({v0, v2, v3});
            parent.push_back(q);
            parent.push_back(q);
        }
    }
    return TriMesh(std::move(vertices), std::move(cells), grid_boundary(grid), std::move(parent));
}

double BentChannel::exact_area() const
{
    const double width = outer_radius - inner_radius;
    return 2.0 * leg_length * width +
           0.25 * std::numbers::pi * (outer_radius * outer_radius - inner_radius * inner_radius);
}

QuadGrid build_bent_quad_grid(const BentChannel& ch, int n_across, int n_along)
{
    if (!(ch.inner_radius > 0.0) || !(ch.outer_radius > ch.inner_radius)) {
        throw std::invalid_argument("build_bent_quad_grid: need outer_radius > inner_radius > 0");
    }
    if (ch.leg_length < 0.0) {
        throw std::invalid_argument("build_bent_quad_grid: negative leg length");
    }
    check_counts(n_across, n_along);

    const double r_mid = 0.5 * (ch.inner_radius + ch.outer_radius);
    const double arc = 0.5 * std::numbers::pi * r_mid;
    const double total = 2.0 * ch.leg_length + arc;

    QuadGrid grid;
    grid.nx = n_along;
    grid.ny = n_across;
    grid.side_markers = {BoundaryMarker::Inlet, BoundaryMarker::Outlet, BoundaryMarker::Wall,
                         BoundaryMarker::Wall};
    grid.map = [ch, arc, total, r_mid](double s, double t) {
        // t = 0 is the outer wall so that cells come out counter-clockwise.
        const double r = ch.outer_radius - t * (ch.outer_radius - ch.inner_radius);
        const double ell = s * total;
        if (ell <= ch.leg_length) {
            return Vec2(ell - ch.leg_length, -r);
        }
        if (ell <= ch.leg_length + arc) {
            const double theta = -0.5 * std::numbers::pi + (ell - ch.leg_length) / r_mid;
            return Vec2(r * std::cos(theta), r * std::sin(theta));
        }
        return Vec2(r, ell - ch.leg_length - arc);
    };
    return grid;
}

std::vector<Vec2> average_payload_to_vertices(const TriMesh& mesh, const QuadGrid& grid)
{
    if (mesh.parent_cells().empty()) {
        throw std::invalid_argument("average_payload_to_vertices: mesh has no parent cells");
    }
    if (static_cast<int>(grid.payload.size()) != grid.num_cells()) {
        throw std::invalid_argument("average_payload_to_vertices: grid has no payload");
    }
    std::vector<Vec2> sum(static_cast<std::size_t>(mesh.num_vertices()), Vec2::Zero());
    std::vector<int> count(sum.size(), 0);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const Vec2& value = grid.payload[static_cast<std::size_t>(mesh.parent_cells()[c])];
        for (int v : mesh.cell(c)) {
            sum[static_cast<std::size_t>(v)] += value;
            count[static_cast<std::size_t>(v)] += 1;
        }
    }
    for (std::size_t v = 0; v < sum.size(); ++v) {
        if (count[v] > 0) {
            sum[v] /= count[v];
        }
    }
    return sum;
}

} // namespace oseen
