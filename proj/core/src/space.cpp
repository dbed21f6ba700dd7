#include "oseen/space.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace oseen {

CellGeometry CellGeometry::of(const TriMesh& mesh, int cell)
{
    const auto& t = mesh.cell(cell);
    CellGeometry g;
    g.origin = mesh.vertex(t[0]);
    g.jacobian.col(0) = mesh.vertex(t[1]) - g.origin;
    g.jacobian.col(1) = mesh.vertex(t[2]) - g.origin;
    g.det = g.jacobian.determinant();
    g.inverse = g.jacobian.inverse();
    return g;
}

std::uint8_t boundary_bit(BoundaryMarker marker)
{
    switch (marker) {
    case BoundaryMarker::Wall:
        return kOnWall;
    case BoundaryMarker::Inlet:
        return kOnInlet;
    case BoundaryMarker::Outlet:
        return kOnOutlet;
    }
    return 0;
}

FeSpace::FeSpace(std::shared_ptr<const TriMesh> mesh, int degree, int components)
    : mesh_(std::move(mesh)), degree_(degree), components_(components)
{
    if (!mesh_) {
        throw std::invalid_argument("FeSpace: null mesh");
    }
    if (components_ != 1 && components_ != 2) {
        throw std::invalid_argument("FeSpace: components must be 1 or 2");
    }
    const RefElement& ref = RefElement::get(degree);
    nodes_per_cell_ = ref.num_nodes();

    const int nv = mesh_->num_vertices();
    const int nc = mesh_->num_cells();
    const int per_edge = degree_ - 1;

    // Edge ids in order of first appearance while sweeping cells.
    std::map<std::pair<int, int>, int> edge_id;
    std::vector<std::pair<int, int>> edges;
    static constexpr std::array<std::array<int, 2>, 3> kLocalEdges{{{0, 1}, {1, 2}, {2, 0}}};
    for (int c = 0; c < nc; ++c) {
        const auto& t = mesh_->cell(c);
        for (const auto& [a, b] : kLocalEdges) {
            const std::pair key{std::min(t[a], t[b]), std::max(t[a], t[b])};
            if (edge_id.emplace(key, static_cast<int>(edges.size())).second) {
                edges.push_back(key);
            }
        }
    }
    num_edges_ = static_cast<int>(edges.size());
    const int interior_offset = nv + per_edge * num_edges_;
    const int total = interior_offset + (degree_ == 3 ? nc : 0);

    node_coords_.assign(static_cast<std::size_t>(total), Vec2::Zero());
    boundary_mask_.assign(static_cast<std::size_t>(total), 0);
    cell_nodes_.resize(static_cast<std::size_t>(nc * nodes_per_cell_));

    for (int v = 0; v < nv; ++v) {
        node_coords_[static_cast<std::size_t>(v)] = mesh_->vertex(v);
    }
    for (int e = 0; e < num_edges_; ++e) {
        const Vec2& a = mesh_->vertex(edges[static_cast<std::size_t>(e)].first);
        const Vec2& b = mesh_->vertex(edges[static_cast<std::size_t>(e)].second);
        for (int m = 0; m < per_edge; ++m) {
            const double s = static_cast<double>(m + 1) / degree_;
            node_coords_[static_cast<std::size_t>(nv + per_edge * e + m)] = (1.0 - s) * a + s * b;
        }
    }

    for (int c = 0; c < nc; ++c) {
        const auto& t = mesh_->cell(c);
        int* out = cell_nodes_.data() + static_cast<std::size_t>(c * nodes_per_cell_);
        out[0] = t[0];
        out[1] = t[1];
        out[2] = t[2];
        int slot = 3;
        for (const auto& [a, b] : kLocalEdges) {
            const int ga = t[a];
            const int gb = t[b];
            const int e = edge_id.at({std::min(ga, gb), std::max(ga, gb)});
            const int base = nv + per_edge * e;
            if (per_edge == 1) {
                out[slot++] = base;
            } else if (per_edge == 2) {
                // Local order runs a -> b; global order runs low -> high vertex.
                const bool forward = ga < gb;
                out[slot++] = forward ? base : base + 1;
                out[slot++] = forward ? base + 1 : base;
            }
        }
        if (degree_ == 3) {
            out[slot++] = interior_offset + c;
            node_coords_[static_cast<std::size_t>(interior_offset + c)] =
                (mesh_->vertex(t[0]) + mesh_->vertex(t[1]) + mesh_->vertex(t[2])) / 3.0;
        }
    }

    for (const auto& be : mesh_->boundary_edges()) {
        const std::uint8_t bit = boundary_bit(be.marker);
        const int a = be.vertices[0];
        const int b = be.vertices[1];
        boundary_mask_[static_cast<std::size_t>(a)] |= bit;
        boundary_mask_[static_cast<std::size_t>(b)] |= bit;
        if (per_edge > 0) {
            const int e = edge_id.at({std::min(a, b), std::max(a, b)});
            for (int m = 0; m < per_edge; ++m) {
                boundary_mask_[static_cast<std::size_t>(nv + per_edge * e + m)] |= bit;
            }
        }
    }
}

std::vector<int> FeSpace::boundary_nodes(std::uint8_t mask) const
{
    std::vector<int> nodes;
    for (int n = 0; n < num_nodes(); ++n) {
        if (boundary_mask_[static_cast<std::size_t>(n)] & mask) {
            nodes.push_back(n);
        }
    }
    return nodes;
}

std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const TriMesh> mesh, int degree,
                                           int components)
{
    return std::make_shared<const FeSpace>(std::move(mesh), degree, components);
}

FeFunction::FeFunction(std::shared_ptr<const FeSpace> s, Eigen::VectorXd c)
    : space(std::move(s)), coefficients(std::move(c))
{
    if (coefficients.size() != space->num_dofs()) {
        throw std::invalid_argument("FeFunction: coefficient length " + std::to_string(coefficients.size()) +
                                    " does not match dof count " + std::to_string(space->num_dofs()));
    }
}

FeFunction interpolate(const ScalarFn& field, std::shared_ptr<const FeSpace> space)
{
    if (space->components() != 1) {
        throw std::invalid_argument("interpolate: scalar field on a vector space");
    }
    FeFunction fn(space);
    const auto& xs = space->node_coords();
    for (int n = 0; n < space->num_nodes(); ++n) {
        fn.coefficients[n] = field(xs[static_cast<std::size_t>(n)]);
    }
    return fn;
}

FeFunction interpolate(const VectorFn& field, std::shared_ptr<const FeSpace> space)
{
    if (space->components() != 2) {
        throw std::invalid_argument("interpolate: vector field on a scalar space");
    }
    FeFunction fn(space);
    const auto& xs = space->node_coords();
    for (int n = 0; n < space->num_nodes(); ++n) {
        const Vec2 v = field(xs[static_cast<std::size_t>(n)]);
        fn.coefficients[space->dof(n, 0)] = v.x();
        fn.coefficients[space->dof(n, 1)] = v.y();
    }
    return fn;
}

namespace {

template <typename Accumulate>
void for_each_basis(const FeFunction& fn, int cell, const Vec2& xi, Accumulate&& acc)
{
    const FeSpace& space = *fn.space;
    if (cell < 0 || cell >= space.mesh().num_cells()) {
        throw std::out_of_range("evaluate: cell index " + std::to_string(cell) + " out of range");
    }
    const RefElement& ref = RefElement::get(space.degree());
    const CellGeometry geo = CellGeometry::of(space.mesh(), cell);
    const auto nodes = space.cell_nodes(cell);
    for (int i = 0; i < space.nodes_per_cell(); ++i) {
        const double phi = ref.value(i, xi);
        const Vec2 grad = geo.push_gradient(ref.gradient(i, xi));
        const double lap = geo.push_hessian(ref.hessian(i, xi)).trace();
        acc(nodes[static_cast<std::size_t>(i)], phi, grad, lap);
    }
}

} // namespace

ScalarEval evaluate_scalar(const FeFunction& fn, int cell, const Vec2& ref_point)
{
    if (fn.space->components() != 1) {
        throw std::invalid_argument("evaluate_scalar: vector-valued function");
    }
    ScalarEval out;
    for_each_basis(fn, cell, ref_point, [&](int node, double phi, const Vec2& grad, double lap) {
        const double c = fn.coefficients[node];
        out.value += c * phi;
        out.gradient += c * grad;
        out.laplacian += c * lap;
    });
    return out;
}

VectorEval evaluate_vector(const FeFunction& fn, int cell, const Vec2& ref_point)
{
    if (fn.space->components() != 2) {
        throw std::invalid_argument("evaluate_vector: scalar-valued function");
    }
    const FeSpace& space = *fn.space;
    VectorEval out;
    for_each_basis(fn, cell, ref_point, [&](int node, double phi, const Vec2& grad, double lap) {
        for (int c = 0; c < 2; ++c) {
            const double coef = fn.coefficients[space.dof(node, c)];
            out.value[c] += coef * phi;
            out.gradient.row(c) += coef * grad.transpose();
            out.laplacian[c] += coef * lap;
        }
    });
    return out;
}

std::optional<int> find_cell(const TriMesh& mesh, const Vec2& x, double tol)
{
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry geo = CellGeometry::of(mesh, c);
        const Vec2 xi = geo.to_reference(x);
        if (xi.x() >= -tol && xi.y() >= -tol && xi.x() + xi.y() <= 1.0 + tol) {
            return c;
        }
    }
    return std::nullopt;
}

Eigen::VectorXd basis_integrals(const FeSpace& space, int exactness)
{
    const QuadratureRule& rule = quadrature_rule(exactness);
    const BasisTables& tab = quadrature_tables(space.degree(), exactness);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_nodes());
    for (int c = 0; c < space.mesh().num_cells(); ++c) {
        const double det = CellGeometry::of(space.mesh(), c).det;
        const auto nodes = space.cell_nodes(c);
        for (int q = 0; q < rule.size(); ++q) {
            const double w = rule.weights[static_cast<std::size_t>(q)] * det;
            for (int i = 0; i < space.nodes_per_cell(); ++i) {
                out[nodes[static_cast<std::size_t>(i)]] += w * tab.value(q, i);
            }
        }
    }
    return out;
}

} // namespace oseen
