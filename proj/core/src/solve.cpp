#include "oseen/solve.hpp"

#include "oseen/errors.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

namespace oseen {

double relative_residual(const LinearSystem& system, const Eigen::VectorXd& x)
{
    const double r = (system.matrix * x - system.rhs).norm();
    const double b = system.rhs.norm();
    return b > 0.0 ? r / b : r;
}

namespace {

template <typename Factorization>
Eigen::VectorXd refine(const Factorization& lu, const LinearSystem& system, Eigen::VectorXd x, double rtol)
{
    for (int step = 0; step < 3 && relative_residual(system, x) > rtol; ++step) {
        const Eigen::VectorXd r = system.rhs - system.matrix * x;
        x += lu.solve(r);
    }
    return x;
}

Eigen::VectorXd solve_direct(const LinearSystem& system, double rtol)
{
    const Eigen::SparseMatrix<double> a = system.matrix;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        throw SolverFailure("sparse LU factorization failed (singular or ill-posed system of size " +
                                std::to_string(a.rows()) + ")",
                            std::numeric_limits<double>::infinity(), 0);
    }
    Eigen::VectorXd x = lu.solve(system.rhs);
    return refine(lu, system, std::move(x), rtol);
}

Eigen::VectorXd solve_krylov(const LinearSystem& system, const SolverOptions& options)
{
    Eigen::SparseMatrix<double> a = system.matrix;
    Eigen::GMRES<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> gmres;
    gmres.set_restart(options.restart);
    gmres.setMaxIterations(options.max_iterations);
    gmres.setTolerance(options.rtol);
    gmres.preconditioner().setDroptol(1e-6);
    gmres.preconditioner().setFillfactor(20);
    gmres.compute(a);
    if (gmres.info() != Eigen::Success) {
        throw SolverFailure("ILU preconditioner setup failed", std::numeric_limits<double>::infinity(), 0);
    }
    Eigen::VectorXd x = gmres.solve(system.rhs);
    const double res = relative_residual(system, x);
    if (gmres.info() != Eigen::Success && res > options.rtol) {
        throw SolverFailure("GMRES stagnated after " + std::to_string(gmres.iterations()) +
                                " iterations, relative residual " + std::to_string(res),
                            res, static_cast<int>(gmres.iterations()));
    }
    return x;
}

} // namespace

Eigen::VectorXd solve_linear(const LinearSystem& system, const SolverOptions& options)
{
    if (system.matrix.rows() != system.matrix.cols() || system.rhs.size() != system.matrix.rows()) {
        throw std::invalid_argument("solve_linear: system is not square");
    }
    if (system.rhs.norm() == 0.0) {
        return Eigen::VectorXd::Zero(system.rhs.size());
    }
    Eigen::VectorXd x = options.method == SolverMethod::Direct ? solve_direct(system, options.rtol)
                                                               : solve_krylov(system, options);
    const double res = relative_residual(system, x);
    if (!(res <= options.rtol)) {
        throw SolverFailure("linear solve missed rtol: relative residual " + std::to_string(res), res, 0);
    }
    return x;
}

std::string SolveReport::to_key_value(std::string_view prefix) const
{
    std::ostringstream out;
    out.precision(17);
    out << prefix << "iterations=" << iterations << '\n'
        << prefix << "final_update_norm=" << final_update_norm << '\n'
        << prefix << "final_residual=" << final_residual << '\n'
        << prefix << "converged=" << (converged ? "true" : "false") << '\n'
        << prefix << "wall_time=" << wall_time << '\n';
    return out.str();
}

namespace {

template <typename Visit>
void visit_samples(const VectorCoefficient& u_m, const TriMesh& mesh, int exactness, Visit&& visit)
{
    CellQuadrature cq(mesh, exactness);
    std::vector<VectorSample> s(static_cast<std::size_t>(cq.rule().size()));
    for (int c = 0; c < mesh.num_cells(); ++c) {
        cq.reinit(c);
        u_m.evaluate(cq.context(), s);
        for (const auto& v : s) {
            visit(v);
        }
    }
}

void emit(const WarningSink& sink, std::string_view message)
{
    if (sink) {
        sink(message);
    } else {
        std::clog << "warning: " << message << '\n';
    }
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report_sigma(const PhysParams& params, const ProblemData& data, const TriMesh& mesh, int exactness,
                  const WarningSink& sink)
{
    const SigmaCondition cond = check_sigma_condition(params, *data.u_m, mesh, exactness);
    if (!cond.satisfied) {
        std::ostringstream msg;
        msg << "sigma condition violated: sigma = " << params.sigma << " <= 4 rho |grad u_m|_inf = "
            << 4.0 * params.rho * cond.grad_norm << "; proceeding";
        emit(sink, msg.str());
    }
}

} // namespace

double gradient_sup_norm(const VectorCoefficient& u_m, const TriMesh& mesh, int exactness)
{
    double best = 0.0;
    visit_samples(u_m, mesh, exactness, [&best](const VectorSample& s) {
        const double row0 = std::abs(s.gradient(0, 0)) + std::abs(s.gradient(0, 1));
        const double row1 = std::abs(s.gradient(1, 0)) + std::abs(s.gradient(1, 1));
        best = std::max({best, row0, row1});
    });
    return best;
}

double velocity_sup_norm(const VectorCoefficient& u_m, const TriMesh& mesh, int exactness)
{
    double best = 0.0;
    visit_samples(u_m, mesh, exactness, [&best](const VectorSample& s) { best = std::max(best, s.value.norm()); });
    // Vertices too: for P1 data the extremes sit there.
    std::vector<Vec2> corner_ref{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    std::vector<Vec2> pts(3);
    std::vector<VectorSample> s(3);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const CellGeometry geo = CellGeometry::of(mesh, c);
        for (int i = 0; i < 3; ++i) {
            pts[static_cast<std::size_t>(i)] = geo.map(corner_ref[static_cast<std::size_t>(i)]);
        }
        const CellContext ctx{&mesh, c, &geo, 0, pts};
        u_m.evaluate(ctx, s);
        for (const auto& v : s) {
            best = std::max(best, v.value.norm());
        }
    }
    return best;
}

SigmaCondition check_sigma_condition(const PhysParams& params, const VectorCoefficient& u_m, const TriMesh& mesh,
                                     int exactness)
{
    SigmaCondition out;
    out.grad_norm = gradient_sup_norm(u_m, mesh, exactness);
    out.margin = params.sigma - 4.0 * params.rho * out.grad_norm;
    out.satisfied = out.margin > 0.0;
    return out;
}

OseenSolution solve_perturbed_oseen(std::shared_ptr<const TriMesh> mesh, int degree, const PhysParams& params,
                                    const ProblemData& data, const SolveSettings& settings)
{
    const auto start = std::chrono::steady_clock::now();
    const auto vs = build_space(mesh, degree, 2);
    const auto qs = build_space(mesh, degree, 1);
    const int exactness = settings.assembly.exactness > 0 ? settings.assembly.exactness : default_exactness(degree);
    report_sigma(params, data, *mesh, exactness, settings.warn);

    AssemblyOptions opts = settings.assembly;
    opts.apply_constraints = true;
    opts.mean_constraint = true;
    const LinearSystem sys = assemble_stabilized(*vs, *qs, params, data, opts);
    const Eigen::VectorXd x = solve_linear(sys, settings.linear);
    auto [w, p] = split_solution(sys, x, vs, qs);

    OseenSolution out{std::move(w), std::move(p), {}};
    out.report.iterations = 1;
    out.report.final_residual = relative_residual(sys, x);
    out.report.converged = true;
    out.report.wall_time = seconds_since(start);
    return out;
}

OseenSolution picard_perturbed_ns(std::shared_ptr<const TriMesh> mesh, int degree, const PhysParams& params,
                                  const ProblemData& data, const PicardOptions& picard,
                                  const SolveSettings& settings)
{
    if (!(picard.tol > 0.0) || picard.max_iter < 1) {
        throw std::invalid_argument("picard_perturbed_ns: need tol > 0 and max_iter >= 1");
    }
    const auto start = std::chrono::steady_clock::now();
    const auto vs = build_space(mesh, degree, 2);
    const auto qs = build_space(mesh, degree, 1);
    const int exactness = settings.assembly.exactness > 0 ? settings.assembly.exactness : default_exactness(degree);
    report_sigma(params, data, *mesh, exactness, settings.warn);

    AssemblyOptions opts = settings.assembly;
    opts.apply_constraints = true;
    opts.mean_constraint = true;

    FeFunction w(vs);
    FeFunction p(qs);
    OseenSolution out;
    Eigen::VectorXd x_full;
    for (int it = 1; it <= picard.max_iter; ++it) {
        ProblemData frozen = data;
        frozen.a_h = discrete_vector(w);
        const LinearSystem sys = assemble_stabilized(*vs, *qs, params, frozen, opts);
        x_full = solve_linear(sys, settings.linear);
        auto [w_new, p_new] = split_solution(sys, x_full, vs, qs);

        const Eigen::VectorXd dx = stack(w_new, p_new) - stack(w, p);
        const SparseMatrix gram = assemble_triple_norm_gram(*vs, *qs, params, frozen, opts);
        const double update = std::sqrt(std::max(0.0, dx.dot(gram * dx)));

        w = std::move(w_new);
        p = std::move(p_new);
        out.report.iterations = it;
        out.report.final_update_norm = update;
        if (update <= picard.tol) {
            out.report.converged = true;
            break;
        }
    }
    ProblemData final_data = data;
    final_data.a_h = discrete_vector(w);
    const LinearSystem final_sys = assemble_stabilized(*vs, *qs, params, final_data, opts);
    out.report.final_residual = relative_residual(final_sys, x_full);
    if (!out.report.converged) {
        std::ostringstream msg;
        msg << "Picard reached max_iter = " << picard.max_iter << " with update norm "
            << out.report.final_update_norm << " > tol = " << picard.tol;
        emit(settings.warn, msg.str());
    }
    out.velocity = std::move(w);
    out.pressure = std::move(p);
    out.report.wall_time = seconds_since(start);
    return out;
}

FlowSolution solve_coarse_ns(std::shared_ptr<const TriMesh> mesh, const CoarseNsAssembler::Params& params,
                             ScalarFn inlet_profile, const PicardOptions& picard, const SolverOptions& linear)
{
    const auto start = std::chrono::steady_clock::now();
    const CoarseNsAssembler assembler(std::move(mesh), params, std::move(inlet_profile));
    FeFunction u(assembler.velocity_space());
    FeFunction p(assembler.pressure_space());
    FlowSolution out;
    for (int it = 1; it <= picard.max_iter; ++it) {
        const LinearSystem sys = assembler.picard_system(u);
        const Eigen::VectorXd x = solve_linear(sys, linear);
        auto [u_new, p_new] = split_solution(sys, x, assembler.velocity_space(), assembler.pressure_space());
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
    const Eigen::VectorXd r = assembler.residual(u, p);
    out.report.final_residual = r.norm();
    out.velocity = std::move(u);
    out.pressure = std::move(p);
    out.report.wall_time = seconds_since(start);
    return out;
}

} // namespace oseen
