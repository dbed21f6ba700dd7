#include "oracles.hpp"

#include "oseen/analysis.hpp"
#include "oseen/forms.hpp"
#include "oseen/property_suite.hpp"
#include "oseen/solve.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <random>

using namespace oseen;

namespace {

std::shared_ptr<const TriMesh> unit_triangle()
{
    return std::make_shared<const TriMesh>(
        TriMesh({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}, {{0, 1, 2}},
                {{{0, 1}, BoundaryMarker::Wall}, {{1, 2}, BoundaryMarker::Wall}, {{2, 0}, BoundaryMarker::Wall}}));
}

AssemblyOptions raw()
{
    AssemblyOptions o;
    o.apply_constraints = false;
    return o;
}

} // namespace

TEST(Tau, FormulaAndBounds)
{
    EXPECT_NEAR(tau_stab(1.0, {1.0, 1.0, 1.0, 0.5, 0.001}), 0.0005, 1e-18);
    const PhysParams tiny_mu{1e-14, 1.0, 2.0, 0.5, 0.3};
    EXPECT_NEAR(tau_stab(0.1, tiny_mu), 0.3 / 2.0, 1e-10);

    const PhysParams bent{0.0483, 1.119, 5.37, 0.5, 0.5};
    const double h = 0.1;
    const double tau = tau_stab(h, bent);
    EXPECT_DOUBLE_EQ(tau, 0.5 * h * h / (5.37 * h * h + 0.0483));
    EXPECT_LE(bent.sigma * tau, bent.delta);
    EXPECT_LE(bent.mu * tau, bent.delta * h * h);

    const TriMesh mesh = build_rect_tri_mesh({0, 1, 0, 1}, 8, 8, TriPattern::CrissCross);
    EXPECT_TRUE(check_tau_bounds(mesh, bent).passed);
}

TEST(Tau, DeltaBound)
{
    EXPECT_DOUBLE_EQ(delta_coercivity_bound(0.0), 0.125);
    EXPECT_DOUBLE_EQ(delta_coercivity_bound(1.0), 0.125);
    EXPECT_DOUBLE_EQ(delta_coercivity_bound(4.0), 0.25 / 16.0);
}

TEST(Params, Validation)
{
    EXPECT_NO_THROW((PhysParams{}.validate()));
    EXPECT_THROW((PhysParams{0.0, 1, 1, 0.5, 0.1}.validate()), std::invalid_argument);
    EXPECT_THROW((PhysParams{1, 1, 1, 0.5, -0.1}.validate()), std::invalid_argument);
}

TEST(Assembly, SingleCellP1MatchesDenseOracle)
{
    // With u_m = a_h = 0 the velocity block is (sigma - tau sigma^2) M + mu K + lambda D
    // and the pressure block is tau K_p.
    const auto mesh = unit_triangle();
    const auto v = build_space(mesh, 1, 2);
    const auto q = build_space(mesh, 1, 1);
    const PhysParams p{1.0, 1.0, 1.0, 1.0, 0.001};
    const LinearSystem sys = assemble_stabilized(*v, *q, p, ProblemData{}, raw());
    const Eigen::MatrixXd a = Eigen::MatrixXd(sys.matrix);

    const double area = 0.5;
    const Vec2 grad[3] = {Vec2(-1, -1), Vec2(1, 0), Vec2(0, 1)};
    const double tau = tau_stab(std::sqrt(2.0), p);
    for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    double expect = p.lambda * area * grad[j][d] * grad[i][c];
                    if (c == d) {
                        const double m = area / 12.0 * (i == j ? 2.0 : 1.0);
                        expect += (p.sigma - tau * p.sigma * p.sigma) * m + p.mu * area * grad[i].dot(grad[j]);
                    }
                    EXPECT_NEAR(a(v->dof(i, c), v->dof(j, d)), expect, 1e-12);
                }
            }
        }
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            EXPECT_NEAR(a(6 + i, 6 + j), tau * area * grad[i].dot(grad[j]), 1e-15);
        }
    }
}

TEST(Assembly, ZeroDataGivesZeroSolution)
{
    const auto mesh = oracle::unit_square(3, TriPattern::CrissCross);
    const OseenSolution s = solve_perturbed_oseen(mesh, 2, PhysParams{}, ProblemData{});
    EXPECT_EQ(s.velocity.coefficients.norm(), 0.0);
    EXPECT_EQ(s.pressure.coefficients.norm(), 0.0);
}

TEST(Assembly, GalerkinCouplingIsSkew)
{
    const auto mesh = oracle::unit_square(2, TriPattern::CrissCross);
    ProblemData d;
    d.u_m = analytic_vector([](const Vec2& x) { return Vec2(x.x(), -x.y()); });
    for (int k = 1; k <= 3; ++k) {
        EXPECT_EQ(skew_coupling_defect(mesh, k, PhysParams{}, d), 0.0);
    }
}

TEST(Assembly, LaplacianTermsVanishOnlyForP1)
{
    const auto mesh = oracle::unit_square(2, TriPattern::CrissCross);
    EXPECT_EQ(laplacian_term_difference(mesh, 1, PhysParams{}, ProblemData{}), 0.0);
    EXPECT_GT(laplacian_term_difference(mesh, 2, PhysParams{}, ProblemData{}), 0.0);
}

TEST(TripleNorm, PurePressureIsTauWeightedGradient)
{
    const auto mesh = oracle::unit_square(3, TriPattern::CrissCross);
    const auto v = build_space(mesh, 1, 2);
    const auto q = build_space(mesh, 1, 1);
    const PhysParams p{0.3, 1.0, 2.0, 0.5, 0.01};
    const SparseMatrix g = assemble_triple_norm_gram(*v, *q, p, ProblemData{});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(v->num_dofs() + q->num_dofs());
    for (int i = 0; i < q->num_dofs(); ++i) {
        x[v->num_dofs() + i] = u(rng);
    }
    double expect = 0.0;
    for (int c = 0; c < mesh->num_cells(); ++c) {
        // Gradient of the linear interpolant from the three vertex values.
        const auto& t = mesh->cell(c);
        const Vec2 a = mesh->vertex(t[0]);
        Mat2 e;
        e.col(0) = mesh->vertex(t[1]) - a;
        e.col(1) = mesh->vertex(t[2]) - a;
        const Vec2 dq(x[v->num_dofs() + t[1]] - x[v->num_dofs() + t[0]],
                      x[v->num_dofs() + t[2]] - x[v->num_dofs() + t[0]]);
        const Vec2 grad = e.transpose().inverse() * dq;
        expect += tau_stab(mesh->diameter(c), p) * grad.squaredNorm() * mesh->signed_area(c);
    }
    EXPECT_NEAR(x.dot(g * x), expect, 1e-12 * expect);
    EXPECT_EQ(Eigen::VectorXd::Zero(x.size()).dot(g * Eigen::VectorXd::Zero(x.size())), 0.0);
}

TEST(TripleNorm, MatchesDenseQuadratureOnTwoCells)
{
    const auto mesh = oracle::unit_square(1, TriPattern::Right);
    const int k = 2;
    const auto v = build_space(mesh, k, 2);
    const auto q = build_space(mesh, k, 1);
    const PhysParams p{0.7, 1.3, 2.0, 0.4, 0.05};
    ProblemData d;
    d.u_m = analytic_vector([](const Vec2& x) { return Vec2(0.3 * x.x(), -0.3 * x.y() + 0.1); },
                            [](const Vec2&) {
                                Mat2 g;
                                g << 0.3, 0, 0, -0.3;
                                return g;
                            });
    d.a_h = analytic_vector([](const Vec2& x) { return Vec2(1.0 + x.y(), x.x()); },
                            [](const Vec2&) {
                                Mat2 g;
                                g << 0, 1, 1, 0;
                                return g;
                            });
    const SparseMatrix g = assemble_triple_norm_gram(*v, *q, p, d);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    FeFunction vf(v);
    FeFunction qf(q);
    for (int i = 0; i < v->num_dofs(); ++i) {
        vf.coefficients[i] = u(rng);
    }
    for (int i = 0; i < q->num_dofs(); ++i) {
        qf.coefficients[i] = u(rng);
    }
    const Eigen::VectorXd x = stack(vf, qf);

    double expect = 0.0;
    for (int c = 0; c < mesh->num_cells(); ++c) {
        const CellGeometry geo = CellGeometry::of(*mesh, c);
        const auto& t = mesh->cell(c);
        const double tau = tau_stab(mesh->diameter(c), p);
        expect += oracle::triangle_integral(
            mesh->vertex(t[0]), mesh->vertex(t[1]), mesh->vertex(t[2]), [&](const Vec2& pt) {
                const Vec2 xi = geo.to_reference(pt);
                const VectorEval w = evaluate_vector(vf, c, xi);
                const ScalarEval s = evaluate_scalar(qf, c, xi);
                const Vec2 um(0.3 * pt.x(), -0.3 * pt.y() + 0.1);
                Mat2 gum;
                gum << 0.3, 0, 0, -0.3;
                const Vec2 ah(1.0 + pt.y(), pt.x());
                const Vec2 l = p.rho * gum * w.value +
                               p.rho * w.gradient * (ah + um) + s.gradient;
                const double div = w.gradient.trace();
                return p.sigma * w.value.squaredNorm() + p.mu * w.gradient.squaredNorm() + p.lambda * div * div +
                       tau * l.squaredNorm();
            });
    }
    EXPECT_NEAR(x.dot(g * x), expect, 1e-11 * expect);
}

class PatchTest : public ::testing::TestWithParam<int> {};

TEST_P(PatchTest, ExactSolutionInSpaceIsReproduced)
{
    const int k = GetParam();
    const PhysParams p{0.5, 1.2, 3.0, 0.5, 0.01};
    const ManufacturedCase c = make_polynomial_case(p);
    for (const TriPattern pat : {TriPattern::Right, TriPattern::CrissCross}) {
        const auto mesh = oracle::unit_square(3, pat);
        const ProblemData d = problem_data(c, analytic_vector(c.a->value, c.a->gradient));
        const OseenSolution s = solve_perturbed_oseen(mesh, k, p, d);
        const ErrorNorms e = error_norms(s.velocity, s.pressure, c, d);
        EXPECT_LT(e.e0_w, 1e-9);
        EXPECT_LT(e.e1_w, 1e-9);
        EXPECT_LT(e.e0_p, 1e-9);
        EXPECT_LT(e.e_triple, 1e-9);
    }
}

INSTANTIATE_TEST_SUITE_P(Degrees, PatchTest, ::testing::Values(2, 3));

TEST(Constraints, MeanOfPressureVanishes)
{
    const auto mesh = oracle::unit_square(4, TriPattern::CrissCross);
    const ManufacturedCase c = make_trig_case(PhysParams{}, analytic_vector([](const Vec2& x) {
                                                  return Vec2(0.2 * x.x(), -0.2 * x.y());
                                              }));
    const ProblemData d = problem_data(c, zero_vector());
    for (int k = 1; k <= 2; ++k) {
        const OseenSolution s = solve_perturbed_oseen(mesh, k, PhysParams{}, d);
        const Eigen::VectorXd m = basis_integrals(*s.pressure.space, 2 * k);
        EXPECT_LT(std::abs(m.dot(s.pressure.coefficients)), 1e-10);
        for (int node : s.velocity.space->boundary_nodes()) {
            const Vec2& x = s.velocity.space->node_coords()[static_cast<std::size_t>(node)];
            EXPECT_NEAR(s.velocity.coefficients[s.velocity.space->dof(node, 0)], c.w.value(x).x(), 1e-14);
            EXPECT_NEAR(s.velocity.coefficients[s.velocity.space->dof(node, 1)], c.w.value(x).y(), 1e-14);
        }
    }
}

TEST(Constraints, NoDirichletNoMeanLeavesSystem)
{
    const auto mesh = oracle::unit_square(1, TriPattern::Right);
    const auto v = build_space(mesh, 1, 2);
    const auto q = build_space(mesh, 1, 1);
    const LinearSystem sys = assemble_stabilized(*v, *q, PhysParams{}, ProblemData{}, raw());
    const LinearSystem same = apply_constraints(sys, {}, false);
    EXPECT_EQ((Eigen::MatrixXd(sys.matrix) - Eigen::MatrixXd(same.matrix)).norm(), 0.0);
    const std::vector<DirichletDof> bad{{10000, 0.0}};
    EXPECT_THROW(apply_constraints(sys, bad, false), std::invalid_argument);
}

TEST(Coercivity, CertifiedRatioAboveQuarter)
{
    const auto mesh = oracle::unit_square(2, TriPattern::CrissCross);
    ProblemData d;
    d.u_m = zero_vector();
    for (int k = 1; k <= 2; ++k) {
        const CoercivityResult r = coercivity_ratio(mesh, k, PhysParams{1, 1, 1, 0.5, 1e-3}, d, 0);
        EXPECT_TRUE(r.certified);
        EXPECT_GE(r.min_ratio, 0.25);
        EXPECT_LE(r.min_ratio, 1.0 + 1e-9);
    }
}

TEST(Trilinear, IdentityHolds)
{
    for (const auto& mesh : {oracle::unit_square(2, TriPattern::CrissCross), oracle::unit_square(3, TriPattern::Right)}) {
        for (int k = 1; k <= 3; ++k) {
            EXPECT_LT(trilinear_identity_residual(mesh, k, 10, 4), 1e-10);
        }
    }
}
