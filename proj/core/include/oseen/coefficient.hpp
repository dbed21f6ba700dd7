#pragma once

#include "oseen/space.hpp"

#include <functional>
#include <memory>
#include <span>

namespace oseen {

/// Vector coefficient at one quadrature point; gradient(i, j) = d v_i / d x_j.
struct VectorSample {
    Vec2 value = Vec2::Zero();
    Mat2 gradient = Mat2::Zero();
    Vec2 laplacian = Vec2::Zero();
};

/// The cell an assembler is integrating over, with its physical quadrature
/// points for quadrature_rule(exactness), or arbitrary points when exactness <= 0.
struct CellContext {
    const TriMesh* mesh = nullptr;
    int cell = -1;
    const CellGeometry* geometry = nullptr;
    int exactness = 0;
    std::span<const Vec2> points;
};

class VectorCoefficient {
public:
    virtual ~VectorCoefficient() = default;
    /// Fills one sample per point of ctx.points. Throws DataError when the
    /// coefficient cannot be evaluated on ctx.mesh.
    virtual void evaluate(const CellContext& ctx, std::span<VectorSample> out) const = 0;
};

class ScalarCoefficient {
public:
    virtual ~ScalarCoefficient() = default;
    virtual void evaluate(const CellContext& ctx, std::span<double> out) const = 0;
};

using VectorCoefficientPtr = std::shared_ptr<const VectorCoefficient>;
using ScalarCoefficientPtr = std::shared_ptr<const ScalarCoefficient>;
using TensorFn = std::function<Mat2(const Vec2&)>;

VectorCoefficientPtr zero_vector();
/// Missing gradient or Laplacian callbacks evaluate to zero.
VectorCoefficientPtr analytic_vector(VectorFn value, TensorFn gradient = {}, VectorFn laplacian = {});
/// Finite element function; must live on the mesh being integrated over.
VectorCoefficientPtr discrete_vector(FeFunction fn);
/// Pointwise function of the position and of another coefficient's sample.
VectorCoefficientPtr derived_vector(std::function<Vec2(const Vec2&, const VectorSample&)> fn,
                                    VectorCoefficientPtr base);

ScalarCoefficientPtr zero_scalar();
ScalarCoefficientPtr analytic_scalar(ScalarFn value);
ScalarCoefficientPtr discrete_scalar(FeFunction fn);
ScalarCoefficientPtr derived_scalar(std::function<double(const Vec2&, const VectorSample&)> fn,
                                    VectorCoefficientPtr base);

/// Fills physical quadrature points and wraps them in a context.
class CellQuadrature {
public:
    CellQuadrature(const TriMesh& mesh, int exactness);

    void reinit(int cell);

    const CellContext& context() const { return ctx_; }
    const CellGeometry& geometry() const { return geo_; }
    const QuadratureRule& rule() const { return rule_; }
    /// Physical weight of point q (reference weight times |det J|).
    double weight(int q) const { return rule_.weights[static_cast<std::size_t>(q)] * geo_.det; }

private:
    const TriMesh& mesh_;
    const QuadratureRule& rule_;
    CellGeometry geo_;
    std::vector<Vec2> points_;
    CellContext ctx_;
};

} // namespace oseen
