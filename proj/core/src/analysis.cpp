#include "oseen/analysis.hpp"

#include "oseen/io.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace oseen {

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

std::string_view to_string(ZetaVariant v)
{
    return v == ZetaVariant::Paper ? "paper" : "standard";
}

std::optional<ZetaVariant> parse_zeta_variant(std::string_view text)
{
    if (text == "paper") {
        return ZetaVariant::Paper;
    }
    if (text == "standard") {
        return ZetaVariant::Standard;
    }
    return std::nullopt;
}

double kovasznay_zeta(double mu, ZetaVariant variant)
{
    if (!(mu > 0.0)) {
        throw std::invalid_argument("kovasznay_zeta: mu must be positive");
    }
    const double root = std::sqrt(1.0 / (4.0 * mu * mu) + 4.0 * kPi * kPi);
    return variant == ZetaVariant::Paper ? root / (2.0 * mu) : 1.0 / (2.0 * mu) - root;
}

Vec2 ManufacturedCase::a_value(const Vec2& x) const
{
    return a ? a->value(x) : Vec2(a_scale * w.value(x));
}

Mat2 ManufacturedCase::a_gradient(const Vec2& x) const
{
    return a ? a->gradient(x) : Mat2(a_scale * w.gradient(x));
}

Vec2 ManufacturedCase::force(const Vec2& x, const VectorSample& um) const
{
    const double rho = params.rho;
    const Vec2 wv = w.value(x);
    const Mat2 gw = w.gradient(x);
    return params.sigma * wv - params.mu * w.laplacian(x) + rho * um.gradient * wv +
           rho * gw * (a_value(x) + um.value) + grad_p(x);
}

ManufacturedCase make_kovasznay_case(double mu, double rho, double sigma, ZetaVariant variant, double a_scale)
{
    const double z = kovasznay_zeta(mu, variant);
    const double k = 2.0 * kPi;
    ManufacturedCase c;
    c.name = "kovasznay";
    c.params.mu = mu;
    c.params.rho = rho;
    c.params.sigma = sigma;
    c.params.lambda = 0.5;
    c.params.delta = 0.001;
    c.domain = {-0.5, 1.5, 0.0, 2.0};
    c.a_scale = a_scale;
    c.w.value = [z, k](const Vec2& x) {
        const double e = std::exp(z * x[0]);
        return Vec2(1.0 - e * std::cos(k * x[1]), z / k * e * std::sin(k * x[1]));
    };
    c.w.gradient = [z, k](const Vec2& x) {
        const double e = std::exp(z * x[0]);
        const double co = std::cos(k * x[1]);
        const double si = std::sin(k * x[1]);
        Mat2 g;
        g << -z * e * co, k * e * si, z * z / k * e * si, z * e * co;
        return g;
    };
    c.w.laplacian = [z, k](const Vec2& x) {
        const double e = std::exp(z * x[0]);
        const double s = z * z - k * k;
        return Vec2(-s * e * std::cos(k * x[1]), z / k * s * e * std::sin(k * x[1]));
    };
    c.p = [z](const Vec2& x) { return 0.5 * std::exp(2.0 * z * x[0]); };
    c.grad_p = [z](const Vec2& x) { return Vec2(z * std::exp(2.0 * z * x[0]), 0.0); };
    c.p_mean = (std::exp(3.0 * z) - std::exp(-z)) / (8.0 * z);

    const VectorField w = c.w;
    c.u_m = analytic_vector([w](const Vec2& x) -> Vec2 { return Vec2(x[0], -x[1]) - w.value(x); },
                            [w](const Vec2& x) {
                                Mat2 g;
                                g << 1.0, 0.0, 0.0, -1.0;
                                return Mat2(g - w.gradient(x));
                            },
                            [w](const Vec2& x) { return Vec2(-w.laplacian(x)); });
    return c;
}

ManufacturedCase make_trig_case(const PhysParams& params, VectorCoefficientPtr u_m, double a_scale)
{
    ManufacturedCase c;
    c.name = "trig";
    c.params = params;
    c.a_scale = a_scale;
    c.u_m = u_m ? std::move(u_m) : zero_vector();
    c.w.value = [](const Vec2& x) {
        return Vec2(kPi * std::cos(kPi * x[1]) * std::sin(kPi * x[0]),
                    -kPi * std::cos(kPi * x[0]) * std::sin(kPi * x[1]));
    };
    c.w.gradient = [](const Vec2& x) {
        const double cx = std::cos(kPi * x[0]);
        const double sx = std::sin(kPi * x[0]);
        const double cy = std::cos(kPi * x[1]);
        const double sy = std::sin(kPi * x[1]);
        const double pp = kPi * kPi;
        Mat2 g;
        g << pp * cy * cx, -pp * sy * sx, pp * sx * sy, -pp * cx * cy;
        return g;
    };
    const VectorFn value = c.w.value;
    c.w.laplacian = [value](const Vec2& x) { return Vec2(-2.0 * kPi * kPi * value(x)); };
    c.p = [](const Vec2& x) { return std::cos(kPi * x[0]) * std::cos(kPi * x[1]); };
    c.grad_p = [](const Vec2& x) {
        return Vec2(-kPi * std::sin(kPi * x[0]) * std::cos(kPi * x[1]),
                    -kPi * std::cos(kPi * x[0]) * std::sin(kPi * x[1]));
    };
    return c;
}

ManufacturedCase make_polynomial_case(const PhysParams& params)
{
    ManufacturedCase c;
    c.name = "polynomial";
    c.params = params;
    c.w.value = [](const Vec2& x) { return Vec2(x[1] * x[1], -x[0] * x[0]); };
    c.w.gradient = [](const Vec2& x) {
        Mat2 g;
        g << 0.0, 2.0 * x[1], -2.0 * x[0], 0.0;
        return g;
    };
    c.w.laplacian = [](const Vec2&) { return Vec2(2.0, -2.0); };
    c.p = [](const Vec2& x) { return x[0] + x[1] - 1.0; };
    c.grad_p = [](const Vec2&) { return Vec2(1.0, 1.0); };
    c.a = VectorField{[](const Vec2& x) { return Vec2(1.0 + x[1], 1.0 + x[0]); },
                      [](const Vec2&) {
                          Mat2 g;
                          g << 0.0, 1.0, 1.0, 0.0;
                          return g;
                      },
                      [](const Vec2&) { return Vec2(0.0, 0.0); }};
    c.u_m = analytic_vector([](const Vec2& x) { return Vec2(x[0], -x[1]); },
                            [](const Vec2&) {
                                Mat2 g;
                                g << 1.0, 0.0, 0.0, -1.0;
                                return g;
                            });
    return c;
}

ProblemData problem_data(const ManufacturedCase& c, VectorCoefficientPtr a_h)
{
    ProblemData d;
    d.u_m = c.u_m;
    d.a_h = a_h ? std::move(a_h) : zero_vector();
    const ManufacturedCase copy = c;
    d.f = derived_vector([copy](const Vec2& x, const VectorSample& um) { return copy.force(x, um); }, c.u_m);
    const TensorFn grad = c.w.gradient;
    d.g = analytic_scalar([grad](const Vec2& x) { return grad(x).trace(); });
    d.boundary_velocity = c.w.value;
    return d;
}

double domain_mean(const TriMesh& mesh, const ScalarFn& fn, int exactness)
{
    CellQuadrature cq(mesh, exactness);
    double integral = 0.0;
    double area = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        cq.reinit(c);
        for (int q = 0; q < cq.rule().size(); ++q) {
            integral += cq.weight(q) * fn(cq.context().points[static_cast<std::size_t>(q)]);
            area += cq.weight(q);
        }
    }
    return integral / area;
}

ErrorNorms error_norms(const FeFunction& w_h, const FeFunction& p_h, const ManufacturedCase& c,
                       const ProblemData& data, int exactness)
{
    const TriMesh& mesh = w_h.space->mesh();
    if (exactness <= 0) {
        exactness = default_exactness(w_h.space->degree());
    }
    const PhysParams& prm = c.params;
    CellQuadrature cq(mesh, exactness);
    const int nq = cq.rule().size();
    std::vector<VectorSample> um(static_cast<std::size_t>(nq));
    std::vector<VectorSample> ah(static_cast<std::size_t>(nq));

    // Pressure means are matched first.
    double p_shift = 0.0;
    double area = 0.0;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        cq.reinit(cell);
        for (int q = 0; q < nq; ++q) {
            const Vec2& x = cq.context().points[static_cast<std::size_t>(q)];
            const ScalarEval ph = evaluate_scalar(p_h, cell, cq.rule().points[static_cast<std::size_t>(q)]);
            p_shift += cq.weight(q) * (c.p(x) - ph.value);
            area += cq.weight(q);
        }
    }
    p_shift /= area;

    double e0w = 0.0;
    double e1w = 0.0;
    double e0p = 0.0;
    double div = 0.0;
    double stab = 0.0;
    for (int cell = 0; cell < mesh.num_cells(); ++cell) {
        cq.reinit(cell);
        data.u_m->evaluate(cq.context(), um);
        data.a_h->evaluate(cq.context(), ah);
        const double tau = tau_stab(mesh.diameter(cell), prm);
        double cell_stab = 0.0;
        for (int q = 0; q < nq; ++q) {
            const Vec2& xi = cq.rule().points[static_cast<std::size_t>(q)];
            const Vec2& x = cq.context().points[static_cast<std::size_t>(q)];
            const VectorEval wh = evaluate_vector(w_h, cell, xi);
            const ScalarEval ph = evaluate_scalar(p_h, cell, xi);
            const Vec2 ew = c.w.value(x) - wh.value;
            const Mat2 gew = c.w.gradient(x) - wh.gradient;
            const double ep = c.p(x) - ph.value - p_shift;
            const Vec2 gep = c.grad_p(x) - ph.gradient;
            const double wq = cq.weight(q);
            const auto& s_um = um[static_cast<std::size_t>(q)];
            const Vec2 lh = prm.rho * s_um.gradient * ew +
                            prm.rho * gew * (ah[static_cast<std::size_t>(q)].value + s_um.value) + gep;
            e0w += wq * ew.squaredNorm();
            e1w += wq * gew.squaredNorm();
            e0p += wq * ep * ep;
            div += wq * gew.trace() * gew.trace();
            cell_stab += wq * lh.squaredNorm();
        }
        stab += tau * cell_stab;
    }
    ErrorNorms out;
    out.e0_w = std::sqrt(e0w);
    out.e1_w = std::sqrt(e1w);
    out.e0_p = std::sqrt(e0p);
    out.e_triple = std::sqrt(prm.sigma * e0w + prm.mu * e1w + prm.lambda * div + stab);
    return out;
}

std::vector<double> ConvergenceRecord::rates(double ErrorNorms::*norm) const
{
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        const auto& a = levels[i];
        const auto& b = levels[i + 1];
        out.push_back(std::log(a.errors.*norm / b.errors.*norm) / std::log(a.h / b.h));
    }
    return out;
}

std::string ConvergenceRecord::to_csv() const
{
    std::ostringstream out;
    out << "level,h,ndof_w,ndof_p,e0_w,e1_w,e0_p,e_triple,rate_e0_w,rate_e1_w,rate_e0_p,picard_iters\n";
    const auto r0 = rates(&ErrorNorms::e0_w);
    const auto r1 = rates(&ErrorNorms::e1_w);
    const auto rp = rates(&ErrorNorms::e0_p);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto& l = levels[i];
        auto rate = [i](const std::vector<double>& r) {
            return i == 0 ? std::string("nan") : format_double(r[i - 1]);
        };
        out << l.level << ',' << format_double(l.h) << ',' << l.ndof_w << ',' << l.ndof_p << ','
            << format_double(l.errors.e0_w) << ',' << format_double(l.errors.e1_w) << ','
            << format_double(l.errors.e0_p) << ',' << format_double(l.errors.e_triple) << ',' << rate(r0) << ','
            << rate(r1) << ',' << rate(rp) << ',' << l.picard_iters << '\n';
    }
    return out.str();
}

ConvergenceRecord run_convergence_study(const ManufacturedCase& c, int degree, int levels, bool nonlinear,
                                        const StudyOptions& options)
{
    if (levels < 1) {
        throw std::invalid_argument("run_convergence_study: need at least one level");
    }
    if (degree < 1 || degree > 3) {
        throw std::invalid_argument("run_convergence_study: degree must be 1, 2 or 3");
    }
    ConvergenceRecord record;
    record.name = c.name;
    record.degree = degree;
    record.nonlinear = nonlinear;
    for (int level = 0; level < levels; ++level) {
        const int n = options.base_cells << level;
        auto mesh = std::make_shared<const TriMesh>(build_rect_tri_mesh(c.domain, n, n, options.pattern));
        const auto vs = build_space(mesh, degree, 2);
        try {
            ConvergenceLevel entry;
            entry.level = level;
            entry.h = mesh->max_diameter();
            entry.ndof_w = vs->num_dofs();
            entry.ndof_p = vs->num_nodes();
            if (nonlinear) {
                const ProblemData data = problem_data(c, zero_vector());
                OseenSolution sol =
                    picard_perturbed_ns(mesh, degree, c.params, data, options.picard, options.settings);
                const ProblemData frozen = problem_data(c, discrete_vector(sol.velocity));
                entry.errors = error_norms(sol.velocity, sol.pressure, c, frozen);
                entry.report = sol.report;
                entry.picard_iters = sol.report.iterations;
            } else {
                const VectorFn a = [&c](const Vec2& x) { return c.a_value(x); };
                const ProblemData data = problem_data(c, discrete_vector(interpolate(a, vs)));
                OseenSolution sol = solve_perturbed_oseen(mesh, degree, c.params, data, options.settings);
                entry.errors = error_norms(sol.velocity, sol.pressure, c, data);
                entry.report = sol.report;
            }
            record.levels.push_back(entry);
        } catch (const SolverFailure& e) {
            throw StudyFailure(e, record);
        }
    }
    return record;
}

} // namespace oseen
