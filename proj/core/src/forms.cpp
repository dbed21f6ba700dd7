#include "oseen/forms.hpp"

#include "oseen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

namespace oseen {

void PhysParams::validate() const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("PhysParams: ") + name + " must be > 0");
        }
    };
    positive(mu, "mu");
    positive(rho, "rho");
    positive(sigma, "sigma");
    positive(lambda, "lambda");
    positive(delta, "delta");
}

double tau_stab(double h, const PhysParams& p)
{
    const double h2 = h * h;
    return p.delta * h2 / (p.sigma * h2 + p.mu);
}

double delta_coercivity_bound(double c_inv)
{
    const double inv_sq = c_inv > 0.0 ? 1.0 / (c_inv * c_inv) : 0.5;
    return 0.25 * std::min(0.5, inv_sq);
}

int default_exactness(int degree)
{
    return std::min(2 * degree + 3, kMaxQuadratureDegree);
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct ThreadBuffer {
    Triplets triplets;
    Eigen::VectorXd rhs;
};

/// Runs `kernel(begin, end, buffer)` over contiguous cell ranges and merges
/// the per-thread buffers in range order.
template <typename Kernel>
std::pair<SparseMatrix, Eigen::VectorXd> assemble_cells(int n_cells, int size, int threads, Kernel&& kernel)
{
    const int n_threads = std::clamp(threads, 1, std::max(1, n_cells));
    std::vector<ThreadBuffer> buffers(static_cast<std::size_t>(n_threads));
    for (auto& b : buffers) {
        b.rhs = Eigen::VectorXd::Zero(size);
    }
    auto range = [n_cells, n_threads](int t) {
        const long begin = static_cast<long>(n_cells) * t / n_threads;
        const long end = static_cast<long>(n_cells) * (t + 1) / n_threads;
        return std::pair<int, int>{static_cast<int>(begin), static_cast<int>(end)};
    };
    if (n_threads == 1) {
        kernel(0, n_cells, buffers[0]);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    const auto [b, e] = range(t);
                    kernel(b, e, buffers[static_cast<std::size_t>(t)]);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
        for (const auto& e : errors) {
            if (e) {
                std::rethrow_exception(e);
            }
        }
    }
    Triplets all;
    std::size_t total = 0;
    for (const auto& b : buffers) {
        total += b.triplets.size();
    }
    all.reserve(total);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    for (auto& b : buffers) {
        all.insert(all.end(), b.triplets.begin(), b.triplets.end());
        rhs += b.rhs;
        Triplets().swap(b.triplets);
    }
    SparseMatrix m(size, size);
    m.setFromTriplets(all.begin(), all.end());
    return {std::move(m), std::move(rhs)};
}

void check_pair(const FeSpace& velocity, const FeSpace& pressure)
{
    if (velocity.components() != 2 || pressure.components() != 1) {
        throw std::invalid_argument("expected a 2-component velocity space and a scalar pressure space");
    }
    if (!velocity.same_layout(pressure)) {
        throw std::invalid_argument("velocity and pressure spaces must share mesh and degree");
    }
}

/// Physical basis data of one cell at one quadrature point.
struct PointBasis {
    std::vector<double> phi;
    std::vector<Vec2> grad;
    std::vector<double> lap;

    explicit PointBasis(int n) : phi(static_cast<std::size_t>(n)), grad(phi.size()), lap(phi.size()) {}

    void fill(const BasisTables& tab, const CellGeometry& geo, int q)
    {
        for (int i = 0; i < tab.num_nodes; ++i) {
            const auto k = static_cast<std::size_t>(i);
            phi[k] = tab.value(q, i);
            grad[k] = geo.push_gradient(tab.gradient(q, i));
            lap[k] = tab.degree > 1 ? geo.push_hessian(tab.hessian(q, i)).trace() : 0.0;
        }
    }
};

/// Local-to-global map for the [vx | vy | p] element block.
std::vector<int> element_dofs(const FeSpace& velocity, int cell)
{
    const int n = velocity.nodes_per_cell();
    const auto nodes = velocity.cell_nodes(cell);
    std::vector<int> dofs(static_cast<std::size_t>(3 * n));
    for (int i = 0; i < n; ++i) {
        const int node = nodes[static_cast<std::size_t>(i)];
        dofs[static_cast<std::size_t>(i)] = velocity.dof(node, 0);
        dofs[static_cast<std::size_t>(n + i)] = velocity.dof(node, 1);
        dofs[static_cast<std::size_t>(2 * n + i)] = velocity.num_dofs() + node;
    }
    return dofs;
}

void scatter(const std::vector<int>& dofs, const Eigen::MatrixXd& ke, const Eigen::VectorXd& fe,
             ThreadBuffer& out)
{
    const auto n = dofs.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out.triplets.emplace_back(dofs[i], dofs[j], ke(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        out.rhs[dofs[i]] += fe[static_cast<Eigen::Index>(i)];
    }
}

} // namespace

LinearSystem assemble_stabilized(const FeSpace& velocity, const FeSpace& pressure, const PhysParams& params,
                                 const ProblemData& data, const AssemblyOptions& options)
{
    check_pair(velocity, pressure);
    params.validate();
    const TriMesh& mesh = velocity.mesh();
    const int k = velocity.degree();
    const int exactness = options.exactness > 0 ? options.exactness : default_exactness(k);
    const int n = velocity.nodes_per_cell();
    const int size = velocity.num_dofs() + pressure.num_dofs();
    const FormTerms terms = options.terms;
    const double sigma = params.sigma;
    const double mu = params.mu;
    const double rho = params.rho;
    const double lambda = params.lambda;
    const double lap_scale = terms.stabilization_laplacian ? 1.0 : 0.0;

    auto kernel = [&](int begin, int end, ThreadBuffer& out) {
        CellQuadrature cq(mesh, exactness);
        const BasisTables& tab = quadrature_tables(k, exactness);
        const int nq = cq.rule().size();
        std::vector<VectorSample> um(static_cast<std::size_t>(nq)), ah(um.size()), fs(um.size());
        std::vector<double> gs(um.size());
        PointBasis b(n);
        Eigen::MatrixXd ke(3 * n, 3 * n);
        Eigen::VectorXd fe(3 * n);
        // Per-basis strong-residual pieces: L_h, trial residual R, test residual T.
        std::vector<Vec2> res_l(static_cast<std::size_t>(2 * n)), res_r(res_l.size()), res_t(res_l.size());

        for (int c = begin; c < end; ++c) {
            cq.reinit(c);
            const CellContext& ctx = cq.context();
            data.u_m->evaluate(ctx, um);
            data.a_h->evaluate(ctx, ah);
            data.f->evaluate(ctx, fs);
            data.g->evaluate(ctx, gs);
            const double tau = terms.stabilization ? tau_stab(mesh.diameter(c), params) : 0.0;
            ke.setZero();
            fe.setZero();

            for (int q = 0; q < nq; ++q) {
                const auto sq = static_cast<std::size_t>(q);
                b.fill(tab, cq.geometry(), q);
                const double w = cq.weight(q);
                const Vec2 beta = ah[sq].value + um[sq].value;
                const Mat2& gm = um[sq].gradient;
                const double div_a = ah[sq].gradient.trace();
                Vec2 f = fs[sq].value;
                if (data.viscous_datum) {
                    f += mu * um[sq].laplacian;
                }
                const double g = gs[sq];

                for (int cc = 0; cc < 2; ++cc) {
                    for (int i = 0; i < n; ++i) {
                        const auto si = static_cast<std::size_t>(i);
                        const auto idx = static_cast<std::size_t>(cc * n + i);
                        Vec2 l = rho * b.phi[si] * gm.col(cc);
                        l[cc] += rho * b.grad[si].dot(beta);
                        Vec2 diag = Vec2::Zero();
                        diag[cc] = sigma * b.phi[si] - lap_scale * mu * b.lap[si];
                        res_l[idx] = l;
                        res_r[idx] = l + diag;
                        res_t[idx] = l - diag;
                    }
                }

                // velocity test (cc, i)
                for (int cc = 0; cc < 2; ++cc) {
                    for (int i = 0; i < n; ++i) {
                        const auto si = static_cast<std::size_t>(i);
                        const int row = cc * n + i;
                        const Vec2& t_i = res_t[static_cast<std::size_t>(row)];
                        // velocity trial (d, j)
                        for (int d = 0; d < 2; ++d) {
                            for (int j = 0; j < n; ++j) {
                                const auto sj = static_cast<std::size_t>(j);
                                const int col = d * n + j;
                                double v = 0.0;
                                if (terms.galerkin) {
                                    if (cc == d) {
                                        v += sigma * b.phi[si] * b.phi[sj] + mu * b.grad[si].dot(b.grad[sj]);
                                    }
                                    v += rho * b.phi[si] * b.phi[sj] * gm(cc, d);
                                    v += lambda * b.grad[sj][d] * b.grad[si][cc];
                                }
                                if (terms.convection && cc == d) {
                                    v += rho * b.grad[sj].dot(beta) * b.phi[si] +
                                         0.5 * rho * div_a * b.phi[sj] * b.phi[si];
                                }
                                if (terms.stabilization) {
                                    v += tau * res_r[static_cast<std::size_t>(col)].dot(t_i);
                                }
                                ke(row, col) += w * v;
                            }
                        }
                        // pressure trial j
                        for (int j = 0; j < n; ++j) {
                            const auto sj = static_cast<std::size_t>(j);
                            const int col = 2 * n + j;
                            if (terms.galerkin) {
                                // Shared product keeps the two coupling blocks exact negatives.
                                const double s = w * (b.phi[sj] * b.grad[si][cc]);
                                ke(row, col) -= s;
                                ke(col, row) += s;
                            }
                            if (terms.stabilization) {
                                ke(row, col) += w * tau * b.grad[sj].dot(t_i);
                            }
                        }
                        fe[row] += w * (f[cc] * b.phi[si] + lambda * g * b.grad[si][cc]);
                        if (terms.stabilization) {
                            fe[row] += w * tau * f.dot(t_i);
                        }
                    }
                }
                // pressure test i
                for (int i = 0; i < n; ++i) {
                    const auto si = static_cast<std::size_t>(i);
                    const int row = 2 * n + i;
                    if (terms.stabilization) {
                        for (int d = 0; d < 2; ++d) {
                            for (int j = 0; j < n; ++j) {
                                const int col = d * n + j;
                                ke(row, col) += w * tau * res_r[static_cast<std::size_t>(col)].dot(b.grad[si]);
                            }
                        }
                        for (int j = 0; j < n; ++j) {
                            ke(row, 2 * n + j) += w * tau * b.grad[static_cast<std::size_t>(j)].dot(b.grad[si]);
                        }
                        fe[row] += w * tau * f.dot(b.grad[si]);
                    }
                    fe[row] += w * g * b.phi[si];
                }
                if (data.viscous_datum) {
                    for (int cc = 0; cc < 2; ++cc) {
                        for (int i = 0; i < n; ++i) {
                            fe[cc * n + i] -= w * mu * gm.row(cc).dot(b.grad[static_cast<std::size_t>(i)]);
                        }
                    }
                }
            }
            scatter(element_dofs(velocity, c), ke, fe, out);
        }
    };

    auto [matrix, rhs] = assemble_cells(mesh.num_cells(), size, options.threads, kernel);

    LinearSystem sys;
    sys.matrix = std::move(matrix);
    sys.rhs = std::move(rhs);
    sys.layout = {velocity.num_dofs(), pressure.num_dofs(), false};
    sys.mean_weights = basis_integrals(pressure, exactness);
    if (options.apply_constraints) {
        const auto dirichlet = velocity_boundary_dofs(velocity, data.boundary_velocity);
        return apply_constraints(std::move(sys), dirichlet, options.mean_constraint);
    }
    return sys;
}

SparseMatrix assemble_triple_norm_gram(const FeSpace& velocity, const FeSpace& pressure,
                                       const PhysParams& params, const ProblemData& data,
                                       const AssemblyOptions& options)
{
    check_pair(velocity, pressure);
    params.validate();
    const TriMesh& mesh = velocity.mesh();
    const int k = velocity.degree();
    const int exactness = options.exactness > 0 ? options.exactness : default_exactness(k);
    const int n = velocity.nodes_per_cell();
    const int size = velocity.num_dofs() + pressure.num_dofs();

    auto kernel = [&](int begin, int end, ThreadBuffer& out) {
        CellQuadrature cq(mesh, exactness);
        const BasisTables& tab = quadrature_tables(k, exactness);
        const int nq = cq.rule().size();
        std::vector<VectorSample> um(static_cast<std::size_t>(nq)), ah(um.size());
        PointBasis b(n);
        Eigen::MatrixXd ke(3 * n, 3 * n);
        const Eigen::VectorXd fe = Eigen::VectorXd::Zero(3 * n);
        // L_h of every local basis function, pressure ones included.
        std::vector<Vec2> l(static_cast<std::size_t>(3 * n));

        for (int c = begin; c < end; ++c) {
            cq.reinit(c);
            data.u_m->evaluate(cq.context(), um);
            data.a_h->evaluate(cq.context(), ah);
            const double tau = tau_stab(mesh.diameter(c), params);
            ke.setZero();
            for (int q = 0; q < nq; ++q) {
                const auto sq = static_cast<std::size_t>(q);
                b.fill(tab, cq.geometry(), q);
                const double w = cq.weight(q);
                const Vec2 beta = ah[sq].value + um[sq].value;
                const Mat2& gm = um[sq].gradient;
                for (int cc = 0; cc < 2; ++cc) {
                    for (int i = 0; i < n; ++i) {
                        const auto si = static_cast<std::size_t>(i);
                        Vec2 li = params.rho * b.phi[si] * gm.col(cc);
                        li[cc] += params.rho * b.grad[si].dot(beta);
                        l[static_cast<std::size_t>(cc * n + i)] = li;
                    }
                }
                for (int i = 0; i < n; ++i) {
                    l[static_cast<std::size_t>(2 * n + i)] = b.grad[static_cast<std::size_t>(i)];
                }
                for (int row = 0; row < 3 * n; ++row) {
                    for (int col = 0; col < 3 * n; ++col) {
                        double v = tau * l[static_cast<std::size_t>(row)].dot(l[static_cast<std::size_t>(col)]);
                        if (row < 2 * n && col < 2 * n) {
                            const int cc = row / n, i = row % n, d = col / n, j = col % n;
                            const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
                            if (cc == d) {
                                v += params.sigma * b.phi[si] * b.phi[sj] + params.mu * b.grad[si].dot(b.grad[sj]);
                            }
                            v += params.lambda * b.grad[si][cc] * b.grad[sj][d];
                        }
                        ke(row, col) += w * v;
                    }
                }
            }
            scatter(element_dofs(velocity, c), ke, fe, out);
        }
    };
    return assemble_cells(mesh.num_cells(), size, options.threads, kernel).first;
}

LinearSystem apply_constraints(LinearSystem system, std::span<const DirichletDof> dirichlet, bool mean_constraint)
{
    const int n = static_cast<int>(system.matrix.rows());
    if (system.matrix.cols() != n || system.rhs.size() != n) {
        throw std::invalid_argument("apply_constraints: system is not square");
    }
    if (system.layout.multiplier) {
        throw std::invalid_argument("apply_constraints: system already carries a mean multiplier");
    }
    std::vector<char> fixed(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd values = Eigen::VectorXd::Zero(n);
    for (const auto& d : dirichlet) {
        if (d.dof < 0 || d.dof >= n) {
            throw std::invalid_argument("apply_constraints: dof " + std::to_string(d.dof) + " out of range");
        }
        fixed[static_cast<std::size_t>(d.dof)] = 1;
        values[d.dof] = d.value;
    }
    if (dirichlet.empty() && !mean_constraint) {
        system.constrained = true;
        return system;
    }

    const int size = n + (mean_constraint ? 1 : 0);
    Triplets triplets;
    triplets.reserve(static_cast<std::size_t>(system.matrix.nonZeros()) +
                     (mean_constraint ? 2 * static_cast<std::size_t>(system.layout.n_pressure) : 0));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    rhs.head(n) = system.rhs;
    for (int r = 0; r < n; ++r) {
        if (fixed[static_cast<std::size_t>(r)]) {
            triplets.emplace_back(r, r, 1.0);
            rhs[r] = values[r];
            continue;
        }
        for (SparseMatrix::InnerIterator it(system.matrix, r); it; ++it) {
            const auto col = static_cast<int>(it.col());
            if (fixed[static_cast<std::size_t>(col)]) {
                rhs[r] -= it.value() * values[col];
            } else {
                triplets.emplace_back(r, col, it.value());
            }
        }
    }
    if (mean_constraint) {
        if (system.mean_weights.size() != system.layout.n_pressure) {
            throw std::invalid_argument("apply_constraints: missing pressure mean weights");
        }
        const int offset = system.layout.n_velocity;
        for (int j = 0; j < system.layout.n_pressure; ++j) {
            triplets.emplace_back(n, offset + j, system.mean_weights[j]);
            triplets.emplace_back(offset + j, n, system.mean_weights[j]);
        }
        rhs[n] = 0.0;
    }
    SparseMatrix m(size, size);
    m.setFromTriplets(triplets.begin(), triplets.end());
    system.matrix = std::move(m);
    system.rhs = std::move(rhs);
    system.dirichlet.assign(dirichlet.begin(), dirichlet.end());
    system.layout.multiplier = mean_constraint;
    system.constrained = true;
    return system;
}

std::vector<DirichletDof> velocity_boundary_dofs(const FeSpace& velocity, const VectorFn& values,
                                                 std::uint8_t mask)
{
    std::vector<DirichletDof> out;
    const auto nodes = velocity.boundary_nodes(mask);
    out.reserve(2 * nodes.size());
    for (int c = 0; c < 2; ++c) {
        for (int node : nodes) {
            const double v = values ? values(velocity.node_coords()[static_cast<std::size_t>(node)])[c] : 0.0;
            out.push_back({velocity.dof(node, c), v});
        }
    }
    return out;
}

FieldPair split_solution(const LinearSystem& system, const Eigen::VectorXd& x,
                         std::shared_ptr<const FeSpace> velocity, std::shared_ptr<const FeSpace> pressure)
{
    const int nv = system.layout.n_velocity;
    const int np = system.layout.n_pressure;
    if (x.size() < nv + np || velocity->num_dofs() != nv || pressure->num_dofs() != np) {
        throw std::invalid_argument("split_solution: vector does not match the spaces");
    }
    return {FeFunction(std::move(velocity), x.head(nv)), FeFunction(std::move(pressure), x.segment(nv, np))};
}

Eigen::VectorXd stack(const FeFunction& velocity, const FeFunction& pressure)
{
    Eigen::VectorXd x(velocity.coefficients.size() + pressure.coefficients.size());
    x << velocity.coefficients, pressure.coefficients;
    return x;
}

} // namespace oseen
