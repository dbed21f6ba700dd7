#include "oseen/forms.hpp"

#include <stdexcept>
#include <utility>

namespace oseen {

CoarseNsAssembler::CoarseNsAssembler(std::shared_ptr<const TriMesh> mesh, Params params, ScalarFn inlet_profile,
                                     int exactness)
    : mesh_(std::move(mesh)), params_(params), inlet_(std::move(inlet_profile)), exactness_(exactness)
{
    if (!mesh_) {
        throw std::invalid_argument("CoarseNsAssembler: null mesh");
    }
    if (!mesh_->has_marker(BoundaryMarker::Inlet) || !mesh_->has_marker(BoundaryMarker::Outlet)) {
        throw std::invalid_argument("CoarseNsAssembler: mesh needs INLET and OUTLET markers");
    }
    if (!(params_.mu > 0.0) || !(params_.rho > 0.0) || params_.sigma < 0.0) {
        throw std::invalid_argument("CoarseNsAssembler: need mu > 0, rho > 0, sigma >= 0");
    }
    if (!inlet_) {
        inlet_ = [](const Vec2&) { return 0.0; };
    }
    velocity_ = build_space(mesh_, 1, 2);
    pressure_ = build_space(mesh_, 1, 1);
}

std::vector<DirichletDof> CoarseNsAssembler::dirichlet_dofs() const
{
    std::vector<DirichletDof> out;
    const FeSpace& v = *velocity_;
    for (int c = 0; c < 2; ++c) {
        for (int node = 0; node < v.num_nodes(); ++node) {
            const std::uint8_t mask = v.boundary_mask(node);
            if (mask & kOnWall) {
                out.push_back({v.dof(node, c), 0.0});
            } else if (mask & kOnInlet) {
                const double value = c == 0 ? inlet_(v.node_coords()[static_cast<std::size_t>(node)]) : 0.0;
                out.push_back({v.dof(node, c), value});
            }
        }
    }
    return out;
}

LinearSystem CoarseNsAssembler::assemble(const FeFunction& z) const
{
    if (z.space->mesh_ptr() != mesh_ || z.space->components() != 2) {
        throw std::invalid_argument("CoarseNsAssembler: convection field must be a velocity on the same mesh");
    }
    const TriMesh& mesh = *mesh_;
    const FeSpace& vs = *velocity_;
    const int n = vs.nodes_per_cell();
    const int nv = vs.num_dofs();
    const int size = nv + pressure_->num_dofs();
    const auto& [mu, rho, sigma] = params_;

    const VectorCoefficientPtr conv = discrete_vector(z);
    CellQuadrature cq(mesh, exactness_);
    const BasisTables& tab = quadrature_tables(1, exactness_);
    std::vector<VectorSample> zs(static_cast<std::size_t>(cq.rule().size()));
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.num_cells() * 9 * n * n));
    Eigen::MatrixXd ke(3 * n, 3 * n);
    std::vector<int> dofs(static_cast<std::size_t>(3 * n));

    for (int c = 0; c < mesh.num_cells(); ++c) {
        cq.reinit(c);
        conv->evaluate(cq.context(), zs);
        const double h = mesh.diameter(c);
        const double tau = h * h / (2.0 * mu);
        ke.setZero();
        for (int q = 0; q < cq.rule().size(); ++q) {
            const double w = cq.weight(q);
            const Vec2& zq = zs[static_cast<std::size_t>(q)].value;
            for (int i = 0; i < n; ++i) {
                const double phi_i = tab.value(q, i);
                const Vec2 gi = cq.geometry().push_gradient(tab.gradient(q, i));
                for (int j = 0; j < n; ++j) {
                    const double phi_j = tab.value(q, j);
                    const Vec2 gj = cq.geometry().push_gradient(tab.gradient(q, j));
                    // Strong momentum operator of phi_j (Lap vanishes for P1).
                    const double strong_j = sigma * phi_j + gj.dot(zq);
                    const double vv = sigma * phi_i * phi_j + mu * gi.dot(gj) + gj.dot(zq) * phi_i;
                    for (int d = 0; d < 2; ++d) {
                        ke(d * n + i, d * n + j) += w * vv;
                        ke(d * n + i, 2 * n + j) -= w * phi_j * gi[d];
                        ke(2 * n + i, d * n + j) += w * (rho * gj[d] * phi_i + tau * strong_j * gi[d]);
                    }
                    ke(2 * n + i, 2 * n + j) += w * tau * gj.dot(gi);
                }
            }
        }
        const auto nodes = vs.cell_nodes(c);
        for (int i = 0; i < n; ++i) {
            const int node = nodes[static_cast<std::size_t>(i)];
            dofs[static_cast<std::size_t>(i)] = vs.dof(node, 0);
            dofs[static_cast<std::size_t>(n + i)] = vs.dof(node, 1);
            dofs[static_cast<std::size_t>(2 * n + i)] = nv + node;
        }
        for (int a = 0; a < 3 * n; ++a) {
            for (int b = 0; b < 3 * n; ++b) {
                triplets.emplace_back(dofs[static_cast<std::size_t>(a)], dofs[static_cast<std::size_t>(b)], ke(a, b));
            }
        }
    }
    LinearSystem sys;
    sys.matrix.resize(size, size);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.rhs = Eigen::VectorXd::Zero(size);
    sys.layout = {nv, pressure_->num_dofs(), false};
    return sys;
}

LinearSystem CoarseNsAssembler::picard_system(const FeFunction& z) const
{
    return apply_constraints(assemble(z), dirichlet_dofs(), false);
}

Eigen::VectorXd CoarseNsAssembler::residual(const FeFunction& u, const FeFunction& p) const
{
    const LinearSystem sys = picard_system(u);
    return sys.matrix * stack(u, p) - sys.rhs;
}

} // namespace oseen
