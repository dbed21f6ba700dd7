#include "oracles.hpp"

#include "oseen/analysis.hpp"
#include "oseen/experiments.hpp"
#include "oseen/property_suite.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace oseen;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Vec2> random_points(const RectBounds& b, int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(b.x0, b.x1);
    std::uniform_real_distribution<double> uy(b.y0, b.y1);
    std::vector<Vec2> out;
    for (int i = 0; i < n; ++i) {
        out.emplace_back(ux(rng), uy(rng));
    }
    return out;
}

// Central differences of a vector field.
Mat2 fd_gradient(const VectorFn& f, const Vec2& x, double h)
{
    Mat2 g;
    for (int d = 0; d < 2; ++d) {
        Vec2 e = Vec2::Zero();
        e[d] = h;
        g.col(d) = (f(x + e) - f(x - e)) / (2 * h);
    }
    return g;
}

Vec2 fd_laplacian(const VectorFn& f, const Vec2& x, double h)
{
    Vec2 l = -4.0 * f(x);
    for (int d = 0; d < 2; ++d) {
        Vec2 e = Vec2::Zero();
        e[d] = h;
        l += f(x + e) + f(x - e);
    }
    return l / (h * h);
}

// Strong momentum residual from finite differences of w, p and u_m; the
// Laplacian is checked against differences separately.
double momentum_residual(const ManufacturedCase& c, const VectorFn& um, const Vec2& x)
{
    const double h = 1e-5;
    const VectorFn& w = c.w.value;
    const VectorFn a = [&c](const Vec2& y) { return c.a_value(y); };
    const Mat2 gw = fd_gradient(w, x, h);
    const Mat2 gum = fd_gradient(um, x, h);
    Vec2 gp;
    for (int d = 0; d < 2; ++d) {
        Vec2 e = Vec2::Zero();
        e[d] = h;
        gp[d] = (c.p(x + e) - c.p(x - e)) / (2 * h);
    }
    const PhysParams& p = c.params;
    const Vec2 lhs = p.sigma * w(x) - p.mu * c.w.laplacian(x) + p.rho * gum * w(x) +
                     p.rho * gw * (a(x) + um(x)) + gp;
    VectorSample s;
    s.value = um(x);
    s.gradient = gum;
    return (lhs - c.force(x, s)).lpNorm<Eigen::Infinity>() / (1.0 + lhs.lpNorm<Eigen::Infinity>());
}

} // namespace

TEST(Kovasznay, ZetaValues)
{
    const double z1 = 0.5 - std::sqrt(0.25 + 4 * kPi * kPi);
    EXPECT_NEAR(kovasznay_zeta(1.0, ZetaVariant::Standard), z1, 1e-15);
    EXPECT_NEAR(z1, -5.80305, 1e-5);
    EXPECT_NEAR(kovasznay_zeta(1.0, ZetaVariant::Paper), std::sqrt(0.25 + 4 * kPi * kPi) / 2.0, 1e-15);
    EXPECT_THROW(kovasznay_zeta(0.0, ZetaVariant::Standard), std::invalid_argument);
    EXPECT_EQ(parse_zeta_variant("paper"), ZetaVariant::Paper);
    EXPECT_FALSE(parse_zeta_variant("other").has_value());
}

TEST(Kovasznay, FieldsAreConsistent)
{
    for (const double mu : {1.0, 0.1, 0.01}) {
        const ManufacturedCase c = make_kovasznay_case(mu, 1.0, 1.0, ZetaVariant::Standard);
        for (const Vec2& x : random_points(c.domain, 200, 7)) {
            EXPECT_NEAR((c.w.gradient(x) - fd_gradient(c.w.value, x, 1e-6)).norm(), 0.0,
                        1e-7 * (1.0 + c.w.gradient(x).norm()));
            EXPECT_NEAR((c.w.laplacian(x) - fd_laplacian(c.w.value, x, 1e-3)).norm(), 0.0,
                        1e-4 * (1.0 + c.w.laplacian(x).norm()));
            EXPECT_NEAR(c.divergence(x), 0.0, 1e-12 * (1.0 + c.w.gradient(x).norm()));
            const VectorFn um = [&c](const Vec2& y) -> Vec2 { return Vec2(y.x(), -y.y()) - c.w.value(y); };
            EXPECT_LT(momentum_residual(c, um, x), 1e-6);
        }
    }
}

TEST(Kovasznay, MeasuredFieldAddsUpToLinearFlow)
{
    const ManufacturedCase c = make_kovasznay_case(0.1, 1.0, 1.0, ZetaVariant::Standard);
    const auto mesh = std::make_shared<const TriMesh>(build_rect_tri_mesh(c.domain, 2, 2, TriPattern::Right));
    CellQuadrature cq(*mesh, 4);
    std::vector<VectorSample> s(static_cast<std::size_t>(cq.rule().size()));
    for (int cell = 0; cell < mesh->num_cells(); ++cell) {
        cq.reinit(cell);
        c.u_m->evaluate(cq.context(), s);
        for (int q = 0; q < cq.rule().size(); ++q) {
            const Vec2& x = cq.context().points[static_cast<std::size_t>(q)];
            EXPECT_NEAR((s[static_cast<std::size_t>(q)].value + c.w.value(x) - Vec2(x.x(), -x.y())).norm(), 0.0,
                        1e-13);
        }
    }
}

TEST(Kovasznay, PressureMeanIsExact)
{
    const ManufacturedCase c = make_kovasznay_case(1.0, 1.0, 1.0, ZetaVariant::Standard);
    const auto mesh = std::make_shared<const TriMesh>(build_rect_tri_mesh(c.domain, 16, 16, TriPattern::Right));
    EXPECT_NEAR(domain_mean(*mesh, c.p, 10), c.p_mean, 1e-9 * std::abs(c.p_mean));
}

TEST(TrigCase, DivergenceFreeAndBounded)
{
    const ManufacturedCase c = make_trig_case(PhysParams{}, analytic_vector([](const Vec2& x) {
                                                  return Vec2(x.y(), x.x());
                                              }));
    for (const Vec2& x : random_points({-2, 2, -2, 2}, 300, 3)) {
        EXPECT_NEAR(c.divergence(x), 0.0, 1e-12);
        EXPECT_LE(c.w.value(x).lpNorm<Eigen::Infinity>(), kPi + 1e-12);
        EXPECT_NEAR((c.w.gradient(x) - fd_gradient(c.w.value, x, 1e-6)).norm(), 0.0, 1e-6);
        EXPECT_NEAR((c.w.laplacian(x) - fd_laplacian(c.w.value, x, 1e-3)).norm(), 0.0, 1e-4);
    }
}

TEST(PolynomialCase, Consistency)
{
    const ManufacturedCase c = make_polynomial_case(PhysParams{0.3, 1.1, 2.0, 0.5, 0.01});
    for (const Vec2& x : random_points({0, 1, 0, 1}, 100, 5)) {
        EXPECT_NEAR(c.divergence(x), 0.0, 1e-15);
        EXPECT_NEAR(c.a->gradient(x).trace(), 0.0, 1e-15);
        EXPECT_LT(momentum_residual(c, [](const Vec2& y) { return Vec2(y.x(), -y.y()); }, x), 1e-6);
    }
}

TEST(ErrorNorms, ZeroAgainstCosCos)
{
    ManufacturedCase c = make_trig_case(PhysParams{}, zero_vector());
    c.w.value = [](const Vec2&) { return Vec2(0, 0); };
    c.w.gradient = [](const Vec2&) { return Mat2::Zero().eval(); };
    const auto mesh = oracle::unit_square(8, TriPattern::CrissCross);
    const FeFunction w(build_space(mesh, 2, 2));
    const FeFunction p(build_space(mesh, 2, 1));
    const ErrorNorms e = error_norms(w, p, c, problem_data(c, zero_vector()));
    EXPECT_NEAR(e.e0_p, 0.5, 1e-12);
    EXPECT_EQ(e.e0_w, 0.0);
}

TEST(ErrorNorms, PressureShiftInvariantAndInterpolantsExact)
{
    const ManufacturedCase c = make_polynomial_case(PhysParams{});
    const auto mesh = oracle::unit_square(3, TriPattern::CrissCross);
    const FeFunction w = interpolate(c.w.value, build_space(mesh, 2, 2));
    FeFunction p = interpolate(c.p, build_space(mesh, 2, 1));
    const ProblemData d = problem_data(c, analytic_vector(c.a->value, c.a->gradient));
    const ErrorNorms e = error_norms(w, p, c, d);
    EXPECT_LT(e.e0_w, 1e-11);
    EXPECT_LT(e.e1_w, 1e-11);
    EXPECT_LT(e.e0_p, 1e-11);
    EXPECT_LT(e.e_triple, 1e-11);

    const FeFunction p_coarse = interpolate([](const Vec2& x) { return std::sin(3 * x.x()); }, p.space);
    FeFunction shifted = p_coarse;
    shifted.coefficients.array() += 7.5;
    EXPECT_NEAR(error_norms(w, p_coarse, c, d).e0_p, error_norms(w, shifted, c, d).e0_p, 1e-12);
}

TEST(ErrorNorms, TripleCollapsesToScaledL2)
{
    // With mu, lambda, delta tiny and zero data, |||e||| -> sqrt(sigma) e0.
    const PhysParams p{1e-14, 1.0, 3.0, 1e-14, 1e-14};
    ManufacturedCase c = make_trig_case(p, zero_vector());
    const auto mesh = oracle::unit_square(4, TriPattern::Right);
    const FeFunction w(build_space(mesh, 1, 2));
    const FeFunction q(build_space(mesh, 1, 1));
    const ErrorNorms e = error_norms(w, q, c, problem_data(c, zero_vector()));
    EXPECT_NEAR(e.e_triple, std::sqrt(3.0) * e.e0_w, 1e-6 * e.e_triple);
}

TEST(Convergence, RatesFromSyntheticRecord)
{
    ConvergenceRecord r;
    for (int i = 0; i < 3; ++i) {
        ConvergenceLevel l;
        l.level = i;
        l.h = std::pow(0.5, i);
        l.errors.e1_w = 3.0 * std::pow(l.h, 2);
        l.errors.e0_w = l.errors.e0_p = 1.0;
        r.levels.push_back(l);
    }
    const auto rates = r.rates(&ErrorNorms::e1_w);
    ASSERT_EQ(rates.size(), 2u);
    EXPECT_NEAR(rates[0], 2.0, 1e-14);
    EXPECT_NEAR(rates[1], 2.0, 1e-14);
    const std::string csv = r.to_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "level,h,ndof_w,ndof_p,e0_w,e1_w,e0_p,e_triple,rate_e0_w,rate_e1_w,rate_e0_p,picard_iters");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Convergence, SmallKovasznayStudy)
{
    const ManufacturedCase c = make_kovasznay_case(1.0, 1.0, 1.0, ZetaVariant::Standard);
    StudyOptions o;
    o.base_cells = 4;
    o.settings.warn = [](std::string_view) {};
    const ConvergenceRecord r = run_convergence_study(c, 1, 3, false, o);
    ASSERT_EQ(r.levels.size(), 3u);
    for (std::size_t i = 1; i < r.levels.size(); ++i) {
        EXPECT_LT(r.levels[i].h, r.levels[i - 1].h);
        EXPECT_LT(r.levels[i].errors.e1_w, r.levels[i - 1].errors.e1_w);
    }
    EXPECT_NEAR(r.rates(&ErrorNorms::e1_w).back(), 1.0, 0.25);
}

TEST(PropertySuite, InterpolationRates)
{
    for (int k = 1; k <= 3; ++k) {
        const InterpolationRates r = interpolation_rates(k);
        EXPECT_NEAR(r.l2, k + 1, 0.2);
        EXPECT_NEAR(r.h1, k, 0.2);
    }
    EXPECT_LT(partition_of_unity_defect(3), 1e-12);
}

TEST(BentRandom, RandomFieldIsSeeded)
{
    const auto a = random_quad_velocities(50, 120.0, 4);
    const auto b = random_quad_velocities(50, 120.0, 4);
    const auto c = random_quad_velocities(50, 120.0, 5);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    for (const Vec2& v : a) {
        EXPECT_LE(v.norm(), 120.0);
    }
}

TEST(BentRandom, RecoversPerturbation)
{
    BentRandomOptions o;
    o.settings.warn = [](std::string_view) {};
    const BentRandomResult r = run_bent_random(o);
    EXPECT_EQ(r.mesh->num_cells(), 2772);
    EXPECT_GT(r.correlation, 0.9);
    EXPECT_TRUE(check_tau_bounds(*r.mesh, o.params).passed);
}
