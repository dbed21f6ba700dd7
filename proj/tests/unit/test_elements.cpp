#include "oracles.hpp"

#include "oseen/property_suite.hpp"
#include "oseen/quadrature.hpp"
#include "oseen/reference_element.hpp"
#include "oseen/space.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace oseen;

TEST(Quadrature, CentroidRule)
{
    const QuadratureRule& r = quadrature_rule(1);
    ASSERT_EQ(r.size(), 1);
    EXPECT_NEAR(r.weights[0], 0.5, 1e-15);
    EXPECT_NEAR(r.points[0].x(), 1.0 / 3.0, 1e-15);
}

TEST(Quadrature, XSquaredYSquared)
{
    const QuadratureRule& r = quadrature_rule(4);
    double sum = 0.0;
    for (int q = 0; q < r.size(); ++q) {
        const Vec2& p = r.points[static_cast<std::size_t>(q)];
        sum += r.weights[static_cast<std::size_t>(q)] * p.x() * p.x() * p.y() * p.y();
    }
    EXPECT_NEAR(sum, 1.0 / 180.0, 1e-15);
}

class QuadratureExactness : public ::testing::TestWithParam<int> {};

TEST_P(QuadratureExactness, AllMonomials)
{
    const int degree = GetParam();
    const QuadratureRule& r = quadrature_rule(degree);
    double wsum = 0.0;
    for (int q = 0; q < r.size(); ++q) {
        const Vec2& p = r.points[static_cast<std::size_t>(q)];
        EXPECT_GT(r.weights[static_cast<std::size_t>(q)], 0.0);
        EXPECT_GT(p.x(), 0.0);
        EXPECT_GT(p.y(), 0.0);
        EXPECT_LT(p.x() + p.y(), 1.0);
        wsum += r.weights[static_cast<std::size_t>(q)];
    }
    EXPECT_NEAR(wsum, 0.5, 1e-14);
    for (int m = 0; m <= degree; ++m) {
        for (int n = 0; m + n <= degree; ++n) {
            double sum = 0.0;
            for (int q = 0; q < r.size(); ++q) {
                const Vec2& p = r.points[static_cast<std::size_t>(q)];
                sum += r.weights[static_cast<std::size_t>(q)] * std::pow(p.x(), m) * std::pow(p.y(), n);
            }
            const double exact = oracle::monomial_integral(m, n);
            EXPECT_NEAR(sum, exact, 1e-13 * exact) << "x^" << m << " y^" << n;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Degrees, QuadratureExactness, ::testing::Range(1, kMaxQuadratureDegree + 1));

TEST(Quadrature, OutOfRange)
{
    EXPECT_THROW(quadrature_rule(0), std::invalid_argument);
    EXPECT_THROW(quadrature_rule(kMaxQuadratureDegree + 1), std::invalid_argument);
}

TEST(RefElement, P1CentroidValues)
{
    const RefElement& e = RefElement::get(1);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(e.value(i, Vec2(1.0 / 3.0, 1.0 / 3.0)), 1.0 / 3.0, 1e-15);
        EXPECT_EQ(e.hessian(i, Vec2(0.2, 0.1)), Mat2::Zero());
    }
}

TEST(RefElement, KroneckerAndPartitionOfUnity)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 1; k <= 3; ++k) {
        const RefElement& e = RefElement::get(k);
        ASSERT_EQ(e.num_nodes(), nodes_per_cell(k));
        for (int i = 0; i < e.num_nodes(); ++i) {
            for (int j = 0; j < e.num_nodes(); ++j) {
                EXPECT_NEAR(e.value(i, e.nodes()[static_cast<std::size_t>(j)]), i == j ? 1.0 : 0.0, 1e-13);
            }
        }
        for (int t = 0; t < 20; ++t) {
            double s = u(rng);
            double r = u(rng);
            if (s + r > 1.0) {
                s = 1.0 - s;
                r = 1.0 - r;
            }
            double sum = 0.0;
            Vec2 grad = Vec2::Zero();
            Mat2 hess = Mat2::Zero();
            for (int i = 0; i < e.num_nodes(); ++i) {
                sum += e.value(i, Vec2(s, r));
                grad += e.gradient(i, Vec2(s, r));
                hess += e.hessian(i, Vec2(s, r));
            }
            EXPECT_NEAR(sum, 1.0, 1e-13);
            EXPECT_NEAR(grad.norm(), 0.0, 1e-12);
            EXPECT_NEAR(hess.norm(), 0.0, 1e-11);
        }
    }
    EXPECT_THROW(RefElement::get(4), std::invalid_argument);
}

TEST(RefElement, P3MatchesVandermondeInterpolation)
{
    // Brute force: monomial coefficients of each nodal basis function from
    // the Vandermonde system on the element's lattice nodes.
    const RefElement& e = RefElement::get(3);
    const auto& nodes = e.nodes();
    const int n = e.num_nodes();
    auto monomials = [](const Vec2& p) {
        Eigen::VectorXd m(10);
        int c = 0;
        for (int d = 0; d <= 3; ++d) {
            for (int a = d; a >= 0; --a) {
                m[c++] = std::pow(p.x(), a) * std::pow(p.y(), d - a);
            }
        }
        return m;
    };
    Eigen::MatrixXd v(n, n);
    for (int i = 0; i < n; ++i) {
        v.row(i) = monomials(nodes[static_cast<std::size_t>(i)]).transpose();
    }
    const Eigen::MatrixXd coeffs = v.fullPivLu().solve(Eigen::MatrixXd::Identity(n, n));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    for (int t = 0; t < 10; ++t) {
        const Vec2 p(u(rng), u(rng));
        const Eigen::VectorXd m = monomials(p);
        for (int i = 0; i < n; ++i) {
            EXPECT_NEAR(e.value(i, p), m.dot(coeffs.col(i)), 1e-12);
        }
    }
}

TEST(RefElement, GradientAndHessianMatchFiniteDifferences)
{
    const double eps = 1e-5;
    const Vec2 p(0.21, 0.33);
    for (int k = 1; k <= 3; ++k) {
        const RefElement& e = RefElement::get(k);
        for (int i = 0; i < e.num_nodes(); ++i) {
            for (int d = 0; d < 2; ++d) {
                Vec2 dp = Vec2::Zero();
                dp[d] = eps;
                const double fd = (e.value(i, p + dp) - e.value(i, p - dp)) / (2 * eps);
                EXPECT_NEAR(e.gradient(i, p)[d], fd, 1e-8);
                const Vec2 gfd = (e.gradient(i, p + dp) - e.gradient(i, p - dp)) / (2 * eps);
                EXPECT_NEAR((e.hessian(i, p).col(d) - gfd).norm(), 0.0, 1e-7);
            }
        }
    }
}

TEST(Space, DofCountsOnTwoCellSquare)
{
    const auto mesh = oracle::unit_square(1, TriPattern::Right);
    EXPECT_EQ(build_space(mesh, 1, 1)->num_dofs(), 4);
    EXPECT_EQ(build_space(mesh, 2, 1)->num_dofs(), 9);
    EXPECT_EQ(build_space(mesh, 3, 2)->num_dofs(), 32);
    EXPECT_EQ(build_space(mesh, 2, 1)->num_edges(), 5);
}

TEST(Space, BoundaryNodesOfP2)
{
    const auto mesh = oracle::unit_square(2, TriPattern::CrissCross);
    const auto s = build_space(mesh, 2, 1);
    for (int node = 0; node < s->num_nodes(); ++node) {
        const Vec2& x = s->node_coords()[static_cast<std::size_t>(node)];
        const bool on = x.x() == 0.0 || x.x() == 1.0 || x.y() == 0.0 || x.y() == 1.0;
        EXPECT_EQ(s->boundary_mask(node) != 0, on) << x.transpose();
    }
}

TEST(Space, InterpolationReproducesPolynomials)
{
    const auto mesh = oracle::unit_square(3, TriPattern::CrissCross);
    const auto c1 = interpolate([](const Vec2&) { return 2.5; }, build_space(mesh, 2, 1));
    EXPECT_NEAR((c1.coefficients.array() - 2.5).abs().maxCoeff(), 0.0, 1e-15);

    const auto u = interpolate([](const Vec2& x) { return Vec2(x.x(), -x.y()); }, build_space(mesh, 1, 2));
    for (int c = 0; c < mesh->num_cells(); ++c) {
        const VectorEval ev = evaluate_vector(u, c, Vec2(0.2, 0.3));
        const Vec2 x = CellGeometry::of(*mesh, c).map(Vec2(0.2, 0.3));
        EXPECT_NEAR((ev.value - Vec2(x.x(), -x.y())).norm(), 0.0, 1e-14);
        Mat2 g;
        g << 1, 0, 0, -1;
        EXPECT_NEAR((ev.gradient - g).norm(), 0.0, 1e-12);
        EXPECT_EQ(ev.laplacian, Vec2::Zero());
    }

    const auto q = interpolate([](const Vec2& x) { return x.squaredNorm(); }, build_space(mesh, 2, 1));
    for (int c = 0; c < mesh->num_cells(); ++c) {
        EXPECT_NEAR(evaluate_scalar(q, c, Vec2(0.1, 0.6)).laplacian, 4.0, 1e-10);
    }

    const auto cubic = interpolate([](const Vec2& x) { return x.x() * x.x() * x.y() - 2.0 * x.y() * x.y() * x.y(); },
                                   build_space(mesh, 3, 1));
    for (int c = 0; c < mesh->num_cells(); ++c) {
        const ScalarEval ev = evaluate_scalar(cubic, c, Vec2(0.25, 0.25));
        const Vec2 x = CellGeometry::of(*mesh, c).map(Vec2(0.25, 0.25));
        EXPECT_NEAR(ev.value, x.x() * x.x() * x.y() - 2.0 * std::pow(x.y(), 3), 1e-12);
        EXPECT_NEAR(ev.gradient.x(), 2.0 * x.x() * x.y(), 1e-11);
        EXPECT_NEAR(ev.gradient.y(), x.x() * x.x() - 6.0 * x.y() * x.y(), 1e-11);
        EXPECT_NEAR(ev.laplacian, 2.0 * x.y() - 12.0 * x.y(), 1e-9);
    }
}

TEST(Space, InterpolationErrorQuartersForP1)
{
    auto l2_error = [](int n) {
        const auto mesh = oracle::unit_square(n, TriPattern::Right);
        const auto f = interpolate([](const Vec2& x) { return std::sin(std::numbers::pi * x.x()); },
                                   build_space(mesh, 1, 1));
        double e = 0.0;
        for (int c = 0; c < mesh->num_cells(); ++c) {
            const CellGeometry g = CellGeometry::of(*mesh, c);
            const auto& v = mesh->cell(c);
            e += oracle::triangle_integral(mesh->vertex(v[0]), mesh->vertex(v[1]), mesh->vertex(v[2]),
                                           [&](const Vec2& x) {
                                               const double d = evaluate_scalar(f, c, g.to_reference(x)).value -
                                                                std::sin(std::numbers::pi * x.x());
                                               return d * d;
                                           });
        }
        return std::sqrt(e);
    };
    const double ratio = l2_error(8) / l2_error(16);
    EXPECT_NEAR(ratio, 4.0, 0.2);
}

TEST(Space, BasisIntegralsSumToArea)
{
    const auto mesh = oracle::unit_square(2, TriPattern::CrissCross);
    for (int k = 1; k <= 3; ++k) {
        EXPECT_NEAR(basis_integrals(*build_space(mesh, k, 1), 2 * k).sum(), 1.0, 1e-14);
    }
    // P2 vertex functions integrate to zero on every triangle.
    const Eigen::VectorXd m2 = basis_integrals(*build_space(mesh, 2, 1), 4);
    for (int v = 0; v < mesh->num_vertices(); ++v) {
        EXPECT_NEAR(m2[v], 0.0, 1e-15);
    }
}

TEST(Space, FindCell)
{
    const auto mesh = oracle::unit_square(4, TriPattern::CrissCross);
    for (const Vec2 x : {Vec2(0.1, 0.1), Vec2(0.5, 0.5), Vec2(1.0, 1.0), Vec2(0.99, 0.01)}) {
        const auto c = find_cell(*mesh, x);
        ASSERT_TRUE(c.has_value());
        const Vec2 xi = CellGeometry::of(*mesh, *c).to_reference(x);
        EXPECT_GE(xi.x(), -1e-12);
        EXPECT_GE(xi.y(), -1e-12);
        EXPECT_LE(xi.x() + xi.y(), 1.0 + 1e-12);
    }
    EXPECT_FALSE(find_cell(*mesh, Vec2(1.5, 0.5)).has_value());
}

TEST(InverseInequality, P2ReferenceConstantFromMonomials)
{
    // On P2 modulo constants, h^2 |Lap v|^2 <= C^2 |v|_1^2. Monomial basis
    // x, y, x^2, xy, y^2 with exact integrals over the reference triangle.
    const int e[5][2] = {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    auto grad_dot = [&](int i, int j) {
        double s = 0.0;
        for (int d = 0; d < 2; ++d) {
            const int ai = e[i][d];
            const int aj = e[j][d];
            if (ai == 0 || aj == 0) {
                continue;
            }
            int m = e[i][0] + e[j][0];
            int n = e[i][1] + e[j][1];
            (d == 0 ? m : n) -= 2;
            s += ai * aj * oracle::monomial_integral(m, n);
        }
        return s;
    };
    auto lap = [&](int i) {
        return (e[i][0] == 2 || e[i][1] == 2) ? 2.0 : 0.0;
    };
    Eigen::MatrixXd k(5, 5);
    Eigen::MatrixXd l(5, 5);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            k(i, j) = grad_dot(i, j);
            l(i, j) = 2.0 * lap(i) * lap(j) * oracle::monomial_integral(0, 0);  // h^2 = 2
        }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(l, k);
    const double c_inv = std::sqrt(eig.eigenvalues().maxCoeff());
    EXPECT_NEAR(estimate_c_inv(2), c_inv, 1e-8);
    EXPECT_EQ(estimate_c_inv(1), 0.0);
}
