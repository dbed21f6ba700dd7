#include "oseen/solve.hpp"

#include <chrono>
#include <stdexcept>

namespace oseen {

namespace {

// Taylor-Hood P2/P1 with the boundary conditions of the coarse problem.
class TaylorHood {
public:
    TaylorHood(std::shared_ptr<const TriMesh> mesh, CoarseNsAssembler::Params params, ScalarFn inlet)
        : mesh_(std::move(mesh)), params_(params), inlet_(std::move(inlet))
    {
        if (!mesh_->has_marker(BoundaryMarker::Inlet) || !mesh_->has_marker(BoundaryMarker::Outlet)) {
            throw std::invalid_argument("solve_reference_ns: mesh needs INLET and OUTLET markers");
        }
        if (!(params_.mu > 0.0) || !(params_.rho > 0.0) || params_.sigma < 0.0) {
            throw std::invalid_argument("solve_reference_ns: need mu > 0, rho > 0, sigma >= 0");
        }
        velocity_ = build_space(mesh_, 2, 2);
        pressure_ = build_space(mesh_, 1, 1);
    }

    const std::shared_ptr<const FeSpace>& velocity() const { return velocity_; }
    const std::shared_ptr<const FeSpace>& pressure() const { return pressure_; }

    std::vector<DirichletDof> dirichlet() const
    {
        std::vector<DirichletDof> out;
        const FeSpace& v = *velocity_;
        for (int c = 0; c < 2; ++c) {
            for (int node = 0; node < v.num_nodes(); ++node) {
                const std::uint8_t mask = v.boundary_mask(node);
                if (mask & kOnWall) {
                    out.push_back({v.dof(node, c), 0.0});
                } else if (mask & kOnInlet) {
                    const double value =
                        c == 0 && inlet_ ? inlet_(v.node_coords()[static_cast<std::size_t>(node)]) : 0.0;
                    out.push_back({v.dof(node, c), value});
                }
            }
        }
        return out;
    }

    LinearSystem system(const FeFunction& z) const
    {
        const int ex = 6;
        const TriMesh& mesh = *mesh_;
        const FeSpace& vs = *velocity_;
        const int nv_local = vs.nodes_per_cell();
        const int np_local = 3;
        const int nv = vs.num_dofs();
        const int size = nv + pressure_->num_dofs();
        const auto& [mu, rho, sigma] = params_;

        const VectorCoefficientPtr conv = discrete_vector(z);
        CellQuadrature cq(mesh, ex);
        const BasisTables& tv = quadrature_tables(2, ex);
        const BasisTables& tp = quadrature_tables(1, ex);
        std::vector<VectorSample> zs(static_cast<std::size_t>(cq.rule().size()));
        const int m = 2 * nv_local + np_local;
        Eigen::MatrixXd ke(m, m);
        std::vector<int> dofs(static_cast<std::size_t>(m));
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(static_cast<std::size_t>(mesh.num_cells()) * static_cast<std::size_t>(m * m));
        std::vector<Vec2> gv(static_cast<std::size_t>(nv_local));

        for (int c = 0; c < mesh.num_cells(); ++c) {
            cq.reinit(c);
            conv->evaluate(cq.context(), zs);
            ke.setZero();
            for (int q = 0; q < cq.rule().size(); ++q) {
                const double w = cq.weight(q);
                const Vec2& zq = zs[static_cast<std::size_t>(q)].value;
                for (int i = 0; i < nv_local; ++i) {
                    gv[static_cast<std::size_t>(i)] = cq.geometry().push_gradient(tv.gradient(q, i));
                }
                for (int i = 0; i < nv_local; ++i) {
                    const double phi_i = tv.value(q, i);
                    const Vec2& gi = gv[static_cast<std::size_t>(i)];
                    for (int j = 0; j < nv_local; ++j) {
                        const Vec2& gj = gv[static_cast<std::size_t>(j)];
                        const double vv =
                            sigma * phi_i * tv.value(q, j) + mu * gi.dot(gj) + rho * gj.dot(zq) * phi_i;
                        ke(i, j) += w * vv;
                        ke(nv_local + i, nv_local + j) += w * vv;
                    }
                    for (int j = 0; j < np_local; ++j) {
                        const double psi = tp.value(q, j);
                        for (int d = 0; d < 2; ++d) {
                            ke(d * nv_local + i, 2 * nv_local + j) -= w * psi * gi[d];
                            ke(2 * nv_local + j, d * nv_local + i) += w * psi * gi[d];
                        }
                    }
                }
            }
            const auto nodes = vs.cell_nodes(c);
            for (int i = 0; i < nv_local; ++i) {
                const int node = nodes[static_cast<std::size_t>(i)];
                dofs[static_cast<std::size_t>(i)] = vs.dof(node, 0);
                dofs[static_cast<std::size_t>(nv_local + i)] = vs.dof(node, 1);
            }
            const auto& cell = mesh.cell(c);
            for (int j = 0; j < np_local; ++j) {
                dofs[static_cast<std::size_t>(2 * nv_local + j)] = nv + cell[static_cast<std::size_t>(j)];
            }
            for (int a = 0; a < m; ++a) {
                for (int b = 0; b < m; ++b) {
                    if (ke(a, b) != 0.0) {
                        triplets.emplace_back(dofs[static_cast<std::size_t>(a)], dofs[static_cast<std::size_t>(b)],
                                              ke(a, b));
                    }
                }
            }
        }
        LinearSystem sys;
        sys.matrix.resize(size, size);
        sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
        sys.rhs = Eigen::VectorXd::Zero(size);
        sys.layout = {nv, pressure_->num_dofs(), false};
        return apply_constraints(std::move(sys), dirichlet(), false);
    }

private:
    std::shared_ptr<const TriMesh> mesh_;
    CoarseNsAssembler::Params params_;
    ScalarFn inlet_;
    std::shared_ptr<const FeSpace> velocity_;
    std::shared_ptr<const FeSpace> pressure_;
};

} // namespace

FlowSolution solve_reference_ns(std::shared_ptr<const TriMesh> mesh, const CoarseNsAssembler::Params& params,
                                ScalarFn inlet_profile, const PicardOptions& picard, const SolverOptions& linear)
{
    if (!mesh) {
        throw std::invalid_argument("solve_reference_ns: null mesh");
    }
    const auto start = std::chrono::steady_clock::now();
    const TaylorHood th(std::move(mesh), params, std::move(inlet_profile));
    FeFunction u(th.velocity());
    FeFunction p(th.pressure());
    FlowSolution out;
    for (int it = 1; it <= picard.max_iter; ++it) {
        const LinearSystem sys = th.system(u);
        const Eigen::VectorXd x = solve_linear(sys, linear);
        auto [u_new, p_new] = split_solution(sys, x, th.velocity(), th.pressure());
        const double norm = u_new.coefficients.norm();
        const double update = norm > 0.0 ? (u_new.coefficients - u.coefficients).norm() / norm : 0.0;
        u = std::move(u_new);
        p = std::move(p_new);
        out.report.iterations = it;
        out.report.final_update_norm = update;
        if (update <= picard.tol) {
            out.report.converged = true;
            break;
        }
    }
    const LinearSystem sys = th.system(u);
    out.report.final_residual = (sys.matrix * stack(u, p) - sys.rhs).norm();
    out.velocity = std::move(u);
    out.pressure = std::move(p);
    out.report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

} // namespace oseen
