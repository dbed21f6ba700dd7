#pragma once

#include "oseen/mesh.hpp"
#include "oseen/quadrature.hpp"

#include <vector>

namespace oseen {

/// Values, reference gradients and reference Hessians of all basis
/// functions at a set of points. Entry (q, i) lives at index q * num_nodes + i.
struct BasisTables {
    int degree = 0;
    int num_nodes = 0;
    int num_points = 0;
    std::vector<double> values;
    std::vector<Vec2> gradients;
    std::vector<Mat2> hessians;

    double value(int q, int i) const { return values[idx(q, i)]; }
    const Vec2& gradient(int q, int i) const { return gradients[idx(q, i)]; }
    const Mat2& hessian(int q, int i) const { return hessians[idx(q, i)]; }

private:
    std::size_t idx(int q, int i) const { return static_cast<std::size_t>(q * num_nodes + i); }
};

/// Nodal Lagrange element P_k on the reference triangle, k in {1, 2, 3}.
///
/// Node order: vertices (0,0), (1,0), (0,1); then the interior lattice points
/// of the edges (v0,v1), (v1,v2), (v2,v0), each edge listed from its first to
/// its second vertex; then the cell-interior point (k = 3 only).
class RefElement {
public:
    /// Shared immutable instance; throws std::invalid_argument for other k.
    static const RefElement& get(int degree);

    int degree() const { return degree_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    const std::vector<Vec2>& nodes() const { return nodes_; }

    double value(int i, const Vec2& xi) const;
    Vec2 gradient(int i, const Vec2& xi) const;
    Mat2 hessian(int i, const Vec2& xi) const;

    BasisTables tabulate(const std::vector<Vec2>& points) const;

private:
    explicit RefElement(int degree);

    // Each basis function is scale * prod_m (slope_m . xi + offset_m).
    struct AffineFactor {
        Vec2 slope;
        double offset;
        double at(const Vec2& xi) const { return slope.dot(xi) + offset; }
    };
    struct ProductBasis {
        double scale;
        std::vector<AffineFactor> factors;
    };

    int degree_;
    std::vector<Vec2> nodes_;
    std::vector<ProductBasis> basis_;
};

/// reference_basis(k, pts): tables for an arbitrary point set.
BasisTables reference_basis(int degree, const std::vector<Vec2>& points);

/// Cached tables of P_k at the points of quadrature_rule(exactness).
const BasisTables& quadrature_tables(int degree, int exactness);

inline int nodes_per_cell(int degree) { return (degree + 1) * (degree + 2) / 2; }

} // namespace oseen
