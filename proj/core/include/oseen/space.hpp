#pragma once

#include "oseen/mesh.hpp"
#include "oseen/reference_element.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace oseen {

/// Affine map x = origin + J * xi from the reference triangle onto one cell.
struct CellGeometry {
    Vec2 origin;
    Mat2 jacobian;
    Mat2 inverse;
    double det = 0.0;

    static CellGeometry of(const TriMesh& mesh, int cell);

    Vec2 map(const Vec2& xi) const { return origin + jacobian * xi; }
    Vec2 to_reference(const Vec2& x) const { return inverse * (x - origin); }
    /// Physical gradient J^{-T} g of a reference gradient.
    Vec2 push_gradient(const Vec2& g) const { return inverse.transpose() * g; }
    /// Physical Hessian J^{-T} H J^{-1} of a reference Hessian.
    Mat2 push_hessian(const Mat2& h) const { return inverse.transpose() * h * inverse; }
};

/// Bit flags marking which kinds of boundary edge a node lies on.
enum BoundaryBits : std::uint8_t {
    kOnWall = 1u << 0,
    kOnInlet = 1u << 1,
    kOnOutlet = 1u << 2,
    kOnAnyBoundary = kOnWall | kOnInlet | kOnOutlet,
};

std::uint8_t boundary_bit(BoundaryMarker marker);

/// Continuous Lagrange space P_k (k = 1, 2, 3) with 1 or 2 components.
///
/// Scalar nodes are numbered vertices first, then edge nodes (two per edge
/// for k = 3, ordered from the lower to the higher global vertex), then cell
/// interior nodes. A vector space stores component c of node n at
/// c * num_nodes() + n.
class FeSpace {
public:
    FeSpace(std::shared_ptr<const TriMesh> mesh, int degree, int components);

    const TriMesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const TriMesh>& mesh_ptr() const { return mesh_; }
    int degree() const { return degree_; }
    int components() const { return components_; }
    int nodes_per_cell() const { return nodes_per_cell_; }
    int num_nodes() const { return static_cast<int>(node_coords_.size()); }
    int num_dofs() const { return components_ * num_nodes(); }
    int num_edges() const { return num_edges_; }

    std::span<const int> cell_nodes(int cell) const
    {
        return {cell_nodes_.data() + static_cast<std::size_t>(cell * nodes_per_cell_),
                static_cast<std::size_t>(nodes_per_cell_)};
    }
    const std::vector<Vec2>& node_coords() const { return node_coords_; }
    std::uint8_t boundary_mask(int node) const { return boundary_mask_[static_cast<std::size_t>(node)]; }

    /// Nodes lying on a boundary edge whose marker bit is in `mask`.
    std::vector<int> boundary_nodes(std::uint8_t mask = kOnAnyBoundary) const;

    int dof(int node, int component) const { return component * num_nodes() + node; }

    bool same_layout(const FeSpace& other) const
    {
        return mesh_ == other.mesh_ && degree_ == other.degree_;
    }

private:
    std::shared_ptr<const TriMesh> mesh_;
    int degree_;
    int components_;
    int nodes_per_cell_;
    int num_edges_ = 0;
    std::vector<int> cell_nodes_;
    std::vector<Vec2> node_coords_;
    std::vector<std::uint8_t> boundary_mask_;
};

std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const TriMesh> mesh, int degree,
                                           int components);

/// Coefficient vector over a space (w_h, p_h, u_m, a_h, ...).
struct FeFunction {
    std::shared_ptr<const FeSpace> space;
    Eigen::VectorXd coefficients;

    FeFunction() = default;
    explicit FeFunction(std::shared_ptr<const FeSpace> s)
        : space(std::move(s)), coefficients(Eigen::VectorXd::Zero(space->num_dofs()))
    {}
    FeFunction(std::shared_ptr<const FeSpace> s, Eigen::VectorXd c);
};

using ScalarFn = std::function<double(const Vec2&)>;
using VectorFn = std::function<Vec2(const Vec2&)>;

FeFunction interpolate(const ScalarFn& field, std::shared_ptr<const FeSpace> space);
FeFunction interpolate(const VectorFn& field, std::shared_ptr<const FeSpace> space);

struct ScalarEval {
    double value = 0.0;
    Vec2 gradient = Vec2::Zero();
    double laplacian = 0.0;
};

/// gradient(i, j) = d u_i / d x_j.
struct VectorEval {
    Vec2 value = Vec2::Zero();
    Mat2 gradient = Mat2::Zero();
    Vec2 laplacian = Vec2::Zero();
};

ScalarEval evaluate_scalar(const FeFunction& fn, int cell, const Vec2& ref_point);
VectorEval evaluate_vector(const FeFunction& fn, int cell, const Vec2& ref_point);

/// Cell containing x (first match, with a small tolerance), if any.
std::optional<int> find_cell(const TriMesh& mesh, const Vec2& x, double tol = 1e-12);

/// Integral of each scalar basis function (the zero-mean constraint row).
Eigen::VectorXd basis_integrals(const FeSpace& space, int exactness);

} // namespace oseen
