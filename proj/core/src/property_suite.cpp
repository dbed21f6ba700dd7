#include "oseen/property_suite.hpp"

#include "oseen/solve.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace oseen {

namespace {

std::string fmt(double v)
{
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

// Columns spanning {velocity vanishing on the boundary} x {zero-mean pressure}.
Eigen::MatrixXd constrained_basis(const FeSpace& v, const FeSpace& q, int exactness)
{
    std::vector<int> free;
    for (int c = 0; c < 2; ++c) {
        for (int node = 0; node < v.num_nodes(); ++node) {
            if (v.boundary_mask(node) == 0) {
                free.push_back(v.dof(node, c));
            }
        }
    }
    const Eigen::VectorXd m = basis_integrals(q, exactness);
    const int nv = v.num_dofs();
    const int np = q.num_dofs();
    const int cols = static_cast<int>(free.size()) + np - 1;
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(nv + np, cols);
    int col = 0;
    for (const int d : free) {
        z(d, col++) = 1.0;
    }
    // P2 vertex functions integrate to zero, so the eliminated dof is the
    // one with the largest integral rather than dof 0.
    Eigen::Index pivot = 0;
    m.cwiseAbs().maxCoeff(&pivot);
    for (int j = 0; j < np; ++j) {
        if (j == pivot) {
            continue;
        }
        z(nv + j, col) = 1.0;
        z(nv + pivot, col) = -m[j] / m[pivot];
        ++col;
    }
    return z;
}

AssemblyOptions raw_options(int degree)
{
    AssemblyOptions opts;
    opts.exactness = default_exactness(degree);
    opts.apply_constraints = false;
    return opts;
}

} // namespace

bool PropertyLedger::all_passed() const
{
    for (const auto& r : results) {
        if (!r.passed && !r.informational) {
            return false;
        }
    }
    return true;
}

std::string PropertyLedger::to_text() const
{
    std::ostringstream out;
    for (const auto& r : results) {
        out << (r.informational ? "INFO " : (r.passed ? "PASS " : "FAIL ")) << r.name << " margin=" << fmt(r.margin);
        if (!r.detail.empty()) {
            out << ' ' << r.detail;
        }
        out << '\n';
    }
    return out.str();
}

PropertyResult check_tau_bounds(const TriMesh& mesh, const PhysParams& params)
{
    PropertyResult r;
    r.name = "tau_bounds";
    r.passed = true;
    r.margin = std::numeric_limits<double>::infinity();
    int bad = 0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double h = mesh.diameter(c);
        const double tau = tau_stab(h, params);
        const double m1 = params.delta - params.sigma * tau;
        const double m2 = params.delta * h * h - params.mu * tau;
        r.margin = std::min({r.margin, m1, m2});
        if (m1 < 0.0 || m2 < 0.0) {
            ++bad;
        }
    }
    r.passed = bad == 0;
    r.detail = "cells=" + std::to_string(mesh.num_cells()) + " violations=" + std::to_string(bad);
    return r;
}

double estimate_c_inv(int degree, const TriMesh* mesh)
{
    if (degree == 1) {
        return 0.0;
    }
    TriMesh reference({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}, {{0, 1, 2}},
                      {{{0, 1}, BoundaryMarker::Wall}, {{1, 2}, BoundaryMarker::Wall}, {{2, 0}, BoundaryMarker::Wall}});
    const TriMesh& m = mesh ? *mesh : reference;
    const int ex = std::min(2 * degree, kMaxQuadratureDegree);
    const BasisTables& tab = quadrature_tables(degree, ex);
    const int n = tab.num_nodes;
    CellQuadrature cq(m, ex);
    double best = 0.0;
    for (int c = 0; c < m.num_cells(); ++c) {
        cq.reinit(c);
        // Drop node 0: the remaining functions span P_k modulo constants.
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n - 1, n - 1);
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n - 1, n - 1);
        for (int q = 0; q < cq.rule().size(); ++q) {
            const double w = cq.weight(q);
            for (int i = 1; i < n; ++i) {
                const Vec2 gi = cq.geometry().push_gradient(tab.gradient(q, i));
                const double li = cq.geometry().push_hessian(tab.hessian(q, i)).trace();
                for (int j = 1; j < n; ++j) {
                    const Vec2 gj = cq.geometry().push_gradient(tab.gradient(q, j));
                    const double lj = cq.geometry().push_hessian(tab.hessian(q, j)).trace();
                    k(i - 1, j - 1) += w * gi.dot(gj);
                    l(i - 1, j - 1) += w * li * lj;
                }
            }
        }
        const double h = m.diameter(c);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(h * h * l, k, Eigen::EigenvaluesOnly);
        best = std::max(best, eig.eigenvalues().maxCoeff());
    }
    return std::sqrt(std::max(0.0, best));
}

CoercivityResult coercivity_ratio(std::shared_ptr<const TriMesh> mesh, int degree, const PhysParams& params,
                                  const ProblemData& data, int random_vectors, std::uint64_t seed)
{
    const auto v = build_space(mesh, degree, 2);
    const auto q = build_space(mesh, degree, 1);
    const AssemblyOptions opts = raw_options(degree);
    const LinearSystem sys = assemble_stabilized(*v, *q, params, data, opts);
    const SparseMatrix gram = assemble_triple_norm_gram(*v, *q, params, data, opts);
    const Eigen::MatrixXd z = constrained_basis(*v, *q, opts.exactness);

    const Eigen::MatrixXd bz = sys.matrix * z;
    const Eigen::MatrixXd gz = gram * z;
    Eigen::MatrixXd b = z.transpose() * bz;
    b = 0.5 * (b + b.transpose()).eval();
    Eigen::MatrixXd g = z.transpose() * gz;
    g = 0.5 * (g + g.transpose()).eval();

    CoercivityResult out;
    out.dimension = static_cast<int>(z.cols());
    if (random_vectors <= 0) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(b, g, Eigen::EigenvaluesOnly);
        out.min_ratio = eig.eigenvalues().minCoeff();
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        out.min_ratio = std::numeric_limits<double>::infinity();
        Eigen::VectorXd y(z.cols());
        for (int s = 0; s < random_vectors; ++s) {
            for (Eigen::Index i = 0; i < y.size(); ++i) {
                y[i] = normal(rng);
            }
            out.min_ratio = std::min(out.min_ratio, y.dot(b * y) / y.dot(g * y));
        }
    }
    const SigmaCondition sc = check_sigma_condition(params, *data.u_m, *mesh, opts.exactness);
    out.c_inv = estimate_c_inv(degree, mesh.get());
    out.delta_bound = delta_coercivity_bound(out.c_inv);
    out.sigma_margin = sc.margin;
    out.certified = sc.satisfied && params.delta < out.delta_bound;
    return out;
}

double trilinear_identity_residual(std::shared_ptr<const TriMesh> mesh, int degree, int count, std::uint64_t seed)
{
    const auto v = build_space(mesh, degree, 2);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto random_field = [&](bool zero_trace) {
        FeFunction f(v);
        for (int c = 0; c < 2; ++c) {
            for (int node = 0; node < v->num_nodes(); ++node) {
                const double value = uni(rng);
                f.coefficients[v->dof(node, c)] = zero_trace && v->boundary_mask(node) ? 0.0 : value;
            }
        }
        return f;
    };
    const int ex = std::min(3 * degree, kMaxQuadratureDegree);
    CellQuadrature cq(*mesh, ex);
    const int nq = cq.rule().size();
    std::vector<VectorSample> sw(static_cast<std::size_t>(nq));
    std::vector<VectorSample> sv(static_cast<std::size_t>(nq));
    std::vector<VectorSample> sa(static_cast<std::size_t>(nq));
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
        const auto w = discrete_vector(random_field(true));
        const auto vv = discrete_vector(random_field(true));
        const auto a = discrete_vector(random_field(false));
        double i1 = 0.0;
        double i2 = 0.0;
        double i3 = 0.0;
        for (int c = 0; c < mesh->num_cells(); ++c) {
            cq.reinit(c);
            w->evaluate(cq.context(), sw);
            vv->evaluate(cq.context(), sv);
            a->evaluate(cq.context(), sa);
            for (int k = 0; k < nq; ++k) {
                const auto s = static_cast<std::size_t>(k);
                const double wq = cq.weight(k);
                i1 += wq * (sw[s].gradient * sa[s].value).dot(sv[s].value);
                i2 += wq * (sv[s].gradient * sa[s].value).dot(sw[s].value);
                i3 += wq * sa[s].gradient.trace() * sw[s].value.dot(sv[s].value);
            }
        }
        worst = std::max(worst, std::abs(i1 + i2 + i3));
    }
    return worst;
}

double skew_coupling_defect(std::shared_ptr<const TriMesh> mesh, int degree, const PhysParams& params,
                            const ProblemData& data)
{
    const auto v = build_space(mesh, degree, 2);
    const auto q = build_space(mesh, degree, 1);
    AssemblyOptions opts = raw_options(degree);
    opts.terms = {true, false, false, false};
    const LinearSystem sys = assemble_stabilized(*v, *q, params, data, opts);
    const int nv = v->num_dofs();
    const int np = q->num_dofs();
    const Eigen::SparseMatrix<double> a = sys.matrix;
    const Eigen::SparseMatrix<double> bvp = a.block(0, nv, nv, np);
    const Eigen::SparseMatrix<double> bpv = a.block(nv, 0, np, nv);
    const Eigen::SparseMatrix<double> sum = bpv + Eigen::SparseMatrix<double>(bvp.transpose());
    double worst = 0.0;
    for (int k = 0; k < sum.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(sum, k); it; ++it) {
            worst = std::max(worst, std::abs(it.value()));
        }
    }
    return worst;
}

double laplacian_term_difference(std::shared_ptr<const TriMesh> mesh, int degree, const PhysParams& params,
                                 const ProblemData& data)
{
    const auto v = build_space(mesh, degree, 2);
    const auto q = build_space(mesh, degree, 1);
    AssemblyOptions opts = raw_options(degree);
    const LinearSystem with = assemble_stabilized(*v, *q, params, data, opts);
    opts.terms.stabilization_laplacian = false;
    const LinearSystem without = assemble_stabilized(*v, *q, params, data, opts);
    const SparseMatrix diff = with.matrix - without.matrix;
    double worst = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
            worst = std::max(worst, std::abs(it.value()));
        }
    }
    return std::max(worst, (with.rhs - without.rhs).lpNorm<Eigen::Infinity>());
}

double partition_of_unity_defect(int degree)
{
    double worst = 0.0;
    for (int ex = 1; ex <= kMaxQuadratureDegree; ++ex) {
        const BasisTables& tab = quadrature_tables(degree, ex);
        for (int q = 0; q < tab.num_points; ++q) {
            double sum = 0.0;
            Vec2 grad = Vec2::Zero();
            for (int i = 0; i < tab.num_nodes; ++i) {
                sum += tab.value(q, i);
                grad += tab.gradient(q, i);
            }
            worst = std::max({worst, std::abs(sum - 1.0), grad.lpNorm<Eigen::Infinity>()});
        }
    }
    return worst;
}

InterpolationRates interpolation_rates(int degree, int base_cells)
{
    constexpr double pi = std::numbers::pi;
    const ScalarFn f = [](const Vec2& x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); };
    const auto grad = [](const Vec2& x) {
        return Vec2(pi * std::cos(pi * x[0]) * std::sin(pi * x[1]), pi * std::sin(pi * x[0]) * std::cos(pi * x[1]));
    };
    double h_prev = 0.0;
    double l2_prev = 0.0;
    double h1_prev = 0.0;
    InterpolationRates out;
    for (int level = 0; level < 3; ++level) {
        const int n = base_cells << level;
        auto mesh = std::make_shared<const TriMesh>(build_rect_tri_mesh({}, n, n, TriPattern::CrissCross));
        const FeFunction fh = interpolate(f, build_space(mesh, degree, 1));
        const int ex = default_exactness(degree);
        CellQuadrature cq(*mesh, ex);
        double l2 = 0.0;
        double h1 = 0.0;
        for (int c = 0; c < mesh->num_cells(); ++c) {
            cq.reinit(c);
            for (int q = 0; q < cq.rule().size(); ++q) {
                const Vec2& x = cq.context().points[static_cast<std::size_t>(q)];
                const ScalarEval e = evaluate_scalar(fh, c, cq.rule().points[static_cast<std::size_t>(q)]);
                l2 += cq.weight(q) * std::pow(f(x) - e.value, 2);
                h1 += cq.weight(q) * (grad(x) - e.gradient).squaredNorm();
            }
        }
        l2 = std::sqrt(l2);
        h1 = std::sqrt(h1);
        const double h = mesh->max_diameter();
        if (level > 0) {
            out.l2 = std::log(l2_prev / l2) / std::log(h_prev / h);
            out.h1 = std::log(h1_prev / h1) / std::log(h_prev / h);
        }
        h_prev = h;
        l2_prev = l2;
        h1_prev = h1;
    }
    return out;
}

PropertyLedger run_property_suite(const PropertySuiteOptions& options)
{
    constexpr double pi = std::numbers::pi;
    PropertyLedger ledger;
    const PhysParams& prm = options.params;
    for (const int k : options.degrees) {
        const double pu = partition_of_unity_defect(k);
        ledger.add({"partition_of_unity k=" + std::to_string(k), pu < 1e-13, 1e-13 - pu, "defect=" + fmt(pu)});

        const InterpolationRates ir = interpolation_rates(k);
        const double m = 0.2 - std::max(std::abs(ir.l2 - (k + 1)), std::abs(ir.h1 - k));
        ledger.add({"interpolation_rates k=" + std::to_string(k), m >= 0.0, m,
                    "l2=" + fmt(ir.l2) + " h1=" + fmt(ir.h1)});

        const double c_inv = estimate_c_inv(k);
        const double bound = delta_coercivity_bound(c_inv);
        PropertyResult info{"delta_bound k=" + std::to_string(k), prm.delta < bound, bound - prm.delta,
                            "c_inv_reference=" + fmt(c_inv) + " bound=" + fmt(bound), true};
        ledger.add(info);
    }
    for (const int n : options.mesh_sizes) {
        auto mesh = std::make_shared<const TriMesh>(build_rect_tri_mesh({}, n, n, TriPattern::CrissCross));
        const std::string tag = " mesh=" + std::to_string(n) + "x" + std::to_string(n);
        PropertyResult tau = check_tau_bounds(*mesh, prm);
        tau.name += tag;
        ledger.add(tau);
        for (const int k : options.degrees) {
            const std::string kt = " k=" + std::to_string(k) + tag;
            ProblemData data;
            // sigma > 4 rho |grad u_m| holds with margin 0.2 for sigma = 1.
            data.u_m = analytic_vector([](const Vec2& x) { return Vec2(0.2 * x[0], -0.2 * x[1]); },
                                       [](const Vec2&) {
                                           Mat2 g;
                                           g << 0.2, 0.0, 0.0, -0.2;
                                           return g;
                                       });
            data.a_h = discrete_vector(interpolate(
                [](const Vec2& x) { return Vec2(std::sin(pi * x[1]), std::sin(pi * x[0])); },
                build_space(mesh, k, 2)));

            const bool dense = n <= 2;
            const CoercivityResult cr =
                coercivity_ratio(mesh, k, prm, data, dense ? 0 : options.random_vectors, options.seed);
            PropertyResult coer{"coercivity" + kt, cr.min_ratio >= 0.25, cr.min_ratio - 0.25,
                                std::string(dense ? "dense" : "random") + " min_ratio=" + fmt(cr.min_ratio) +
                                    " dim=" + std::to_string(cr.dimension) + " c_inv=" + fmt(cr.c_inv)};
            if (!cr.certified) {
                coer.informational = true;
                coer.detail += " not-certified";
            }
            ledger.add(coer);

            const double tri = trilinear_identity_residual(mesh, k, options.trilinear_triples, options.seed);
            ledger.add({"trilinear" + kt, tri < 1e-10, 1e-10 - tri, "residual=" + fmt(tri)});

            const double skew = skew_coupling_defect(mesh, k, prm, data);
            ledger.add({"skew_coupling" + kt, skew == 0.0, -skew, "defect=" + fmt(skew)});

            if (k == 1) {
                const double lap = laplacian_term_difference(mesh, k, prm, data);
                ledger.add({"p1_laplacian_degeneracy" + kt, lap == 0.0, -lap, "difference=" + fmt(lap)});
            }
        }
    }
    return ledger;
}

} // namespace oseen
