#include "oseen/coefficient.hpp"

#include "oseen/errors.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace oseen {

namespace {

class ZeroVector final : public VectorCoefficient {
public:
    void evaluate(const CellContext&, std::span<VectorSample> out) const override
    {
        std::fill(out.begin(), out.end(), VectorSample{});
    }
};

class AnalyticVector final : public VectorCoefficient {
public:
    AnalyticVector(VectorFn value, TensorFn gradient, VectorFn laplacian)
        : value_(std::move(value)), gradient_(std::move(gradient)), laplacian_(std::move(laplacian))
    {
        if (!value_) {
            throw std::invalid_argument("analytic_vector: empty value function");
        }
    }

    void evaluate(const CellContext& ctx, std::span<VectorSample> out) const override
    {
        for (std::size_t q = 0; q < ctx.points.size(); ++q) {
            const Vec2& x = ctx.points[q];
            out[q].value = value_(x);
            out[q].gradient = gradient_ ? gradient_(x) : Mat2::Zero();
            out[q].laplacian = laplacian_ ? laplacian_(x) : Vec2::Zero();
        }
    }

private:
    VectorFn value_;
    TensorFn gradient_;
    VectorFn laplacian_;
};

void check_mesh(const FeFunction& fn, const CellContext& ctx)
{
    if (fn.space->mesh_ptr().get() != ctx.mesh) {
        throw DataError("discrete coefficient lives on a different mesh than the assembler");
    }
}

// Quadrature contexts reuse the cached tables; any other point set
// (exactness <= 0) is tabulated on the fly.
const BasisTables& tables_for(const FeSpace& space, const CellContext& ctx, BasisTables& scratch)
{
    if (ctx.exactness > 0) {
        return quadrature_tables(space.degree(), ctx.exactness);
    }
    std::vector<Vec2> ref(ctx.points.size());
    for (std::size_t q = 0; q < ref.size(); ++q) {
        ref[q] = ctx.geometry->to_reference(ctx.points[q]);
    }
    scratch = reference_basis(space.degree(), ref);
    return scratch;
}

class DiscreteVector final : public VectorCoefficient {
public:
    explicit DiscreteVector(FeFunction fn) : fn_(std::move(fn))
    {
        if (!fn_.space || fn_.space->components() != 2) {
            throw std::invalid_argument("discrete_vector: need a 2-component function");
        }
    }

    void evaluate(const CellContext& ctx, std::span<VectorSample> out) const override
    {
        check_mesh(fn_, ctx);
        const FeSpace& space = *fn_.space;
        BasisTables scratch;
        const BasisTables& tab = tables_for(space, ctx, scratch);
        const auto nodes = space.cell_nodes(ctx.cell);
        const CellGeometry& geo = *ctx.geometry;
        const int n = space.nodes_per_cell();
        std::vector<double> cx(static_cast<std::size_t>(n));
        std::vector<double> cy(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            cx[static_cast<std::size_t>(i)] = fn_.coefficients[space.dof(nodes[static_cast<std::size_t>(i)], 0)];
            cy[static_cast<std::size_t>(i)] = fn_.coefficients[space.dof(nodes[static_cast<std::size_t>(i)], 1)];
        }
        for (int q = 0; q < tab.num_points; ++q) {
            Vec2 value = Vec2::Zero();
            Vec2 ref_gx = Vec2::Zero();
            Vec2 ref_gy = Vec2::Zero();
            Mat2 ref_hx = Mat2::Zero();
            Mat2 ref_hy = Mat2::Zero();
            for (int i = 0; i < n; ++i) {
                const double a = cx[static_cast<std::size_t>(i)];
                const double b = cy[static_cast<std::size_t>(i)];
                const double phi = tab.value(q, i);
                value += Vec2(a * phi, b * phi);
                ref_gx += a * tab.gradient(q, i);
                ref_gy += b * tab.gradient(q, i);
                if (space.degree() > 1) {
                    ref_hx += a * tab.hessian(q, i);
                    ref_hy += b * tab.hessian(q, i);
                }
            }
            VectorSample& s = out[static_cast<std::size_t>(q)];
            s.value = value;
            s.gradient.row(0) = geo.push_gradient(ref_gx).transpose();
            s.gradient.row(1) = geo.push_gradient(ref_gy).transpose();
            s.laplacian = Vec2(geo.push_hessian(ref_hx).trace(), geo.push_hessian(ref_hy).trace());
        }
    }

private:
    FeFunction fn_;
};

class DerivedVector final : public VectorCoefficient {
public:
    DerivedVector(std::function<Vec2(const Vec2&, const VectorSample&)> fn, VectorCoefficientPtr base)
        : fn_(std::move(fn)), base_(std::move(base))
    {
        if (!fn_ || !base_) {
            throw std::invalid_argument("derived_vector: empty function or base");
        }
    }

    void evaluate(const CellContext& ctx, std::span<VectorSample> out) const override
    {
        std::vector<VectorSample> base(ctx.points.size());
        base_->evaluate(ctx, base);
        for (std::size_t q = 0; q < ctx.points.size(); ++q) {
            out[q] = VectorSample{};
            out[q].value = fn_(ctx.points[q], base[q]);
        }
    }

private:
    std::function<Vec2(const Vec2&, const VectorSample&)> fn_;
    VectorCoefficientPtr base_;
};

class ZeroScalar final : public ScalarCoefficient {
public:
    void evaluate(const CellContext&, std::span<double> out) const override
    {
        std::fill(out.begin(), out.end(), 0.0);
    }
};

class AnalyticScalar final : public ScalarCoefficient {
public:
    explicit AnalyticScalar(ScalarFn value) : value_(std::move(value))
    {
        if (!value_) {
            throw std::invalid_argument("analytic_scalar: empty function");
        }
    }

    void evaluate(const CellContext& ctx, std::span<double> out) const override
    {
        for (std::size_t q = 0; q < ctx.points.size(); ++q) {
            out[q] = value_(ctx.points[q]);
        }
    }

private:
    ScalarFn value_;
};

class DiscreteScalar final : public ScalarCoefficient {
public:
    explicit DiscreteScalar(FeFunction fn) : fn_(std::move(fn))
    {
        if (!fn_.space || fn_.space->components() != 1) {
            throw std::invalid_argument("discrete_scalar: need a scalar function");
        }
    }

    void evaluate(const CellContext& ctx, std::span<double> out) const override
    {
        check_mesh(fn_, ctx);
        const FeSpace& space = *fn_.space;
        BasisTables scratch;
        const BasisTables& tab = tables_for(space, ctx, scratch);
        const auto nodes = space.cell_nodes(ctx.cell);
        for (int q = 0; q < tab.num_points; ++q) {
            double v = 0.0;
            for (int i = 0; i < space.nodes_per_cell(); ++i) {
                v += fn_.coefficients[nodes[static_cast<std::size_t>(i)]] * tab.value(q, i);
            }
            out[static_cast<std::size_t>(q)] = v;
        }
    }

private:
    FeFunction fn_;
};

class DerivedScalar final : public ScalarCoefficient {
public:
    DerivedScalar(std::function<double(const Vec2&, const VectorSample&)> fn, VectorCoefficientPtr base)
        : fn_(std::move(fn)), base_(std::move(base))
    {
        if (!fn_ || !base_) {
            throw std::invalid_argument("derived_scalar: empty function or base");
        }
    }

    void evaluate(const CellContext& ctx, std::span<double> out) const override
    {
        std::vector<VectorSample> base(ctx.points.size());
        base_->evaluate(ctx, base);
        for (std::size_t q = 0; q < ctx.points.size(); ++q) {
            out[q] = fn_(ctx.points[q], base[q]);
        }
    }

private:
    std::function<double(const Vec2&, const VectorSample&)> fn_;
    VectorCoefficientPtr base_;
};

} // namespace

VectorCoefficientPtr zero_vector()
{
    static const auto zero = std::make_shared<const ZeroVector>();
    return zero;
}

VectorCoefficientPtr analytic_vector(VectorFn value, TensorFn gradient, VectorFn laplacian)
{
    return std::make_shared<const AnalyticVector>(std::move(value), std::move(gradient), std::move(laplacian));
}

VectorCoefficientPtr discrete_vector(FeFunction fn)
{
    return std::make_shared<const DiscreteVector>(std::move(fn));
}

VectorCoefficientPtr derived_vector(std::function<Vec2(const Vec2&, const VectorSample&)> fn,
                                    VectorCoefficientPtr base)
{
    return std::make_shared<const DerivedVector>(std::move(fn), std::move(base));
}

ScalarCoefficientPtr zero_scalar()
{
    static const auto zero = std::make_shared<const ZeroScalar>();
    return zero;
}

ScalarCoefficientPtr analytic_scalar(ScalarFn value)
{
    return std::make_shared<const AnalyticScalar>(std::move(value));
}

ScalarCoefficientPtr discrete_scalar(FeFunction fn)
{
    return std::make_shared<const DiscreteScalar>(std::move(fn));
}

ScalarCoefficientPtr derived_scalar(std::function<double(const Vec2&, const VectorSample&)> fn,
                                    VectorCoefficientPtr base)
{
    return std::make_shared<const DerivedScalar>(std::move(fn), std::move(base));
}

CellQuadrature::CellQuadrature(const TriMesh& mesh, int exactness)
    : mesh_(mesh), rule_(quadrature_rule(exactness)), points_(rule_.points.size())
{
    ctx_.mesh = &mesh_;
    ctx_.geometry = &geo_;
    ctx_.exactness = exactness;
    ctx_.points = points_;
}

void CellQuadrature::reinit(int cell)
{
    geo_ = CellGeometry::of(mesh_, cell);
    for (std::size_t q = 0; q < points_.size(); ++q) {
        points_[q] = geo_.map(rule_.points[q]);
    }
    ctx_.cell = cell;
}

} // namespace oseen
