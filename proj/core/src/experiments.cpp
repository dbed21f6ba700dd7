#include "oseen/experiments.hpp"

#include "oseen/io.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace oseen {

namespace {

VectorEval vector_at(const FeFunction& fn, const Vec2& x)
{
    const TriMesh& mesh = fn.space->mesh();
    const auto cell = find_cell(mesh, x, 1e-10);
    if (!cell) {
        throw std::out_of_range("point outside the mesh");
    }
    const CellGeometry geo = CellGeometry::of(mesh, *cell);
    return evaluate_vector(fn, *cell, geo.to_reference(x));
}

ScalarEval scalar_at(const FeFunction& fn, const Vec2& x)
{
    const TriMesh& mesh = fn.space->mesh();
    const auto cell = find_cell(mesh, x, 1e-10);
    if (!cell) {
        throw std::out_of_range("point outside the mesh");
    }
    const CellGeometry geo = CellGeometry::of(mesh, *cell);
    return evaluate_scalar(fn, *cell, geo.to_reference(x));
}

double mean_of(const FeFunction& p)
{
    const Eigen::VectorXd m = basis_integrals(*p.space, default_exactness(p.space->degree()));
    return m.dot(p.coefficients) / m.sum();
}

// Vertex values of a vector function (vertices are the first nodes).
std::vector<double> vertex_values(const FeFunction& fn)
{
    const int nv = fn.space->mesh().num_vertices();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(2 * nv));
    for (int v = 0; v < nv; ++v) {
        out.push_back(fn.coefficients[fn.space->dof(v, 0)]);
        out.push_back(fn.coefficients[fn.space->dof(v, 1)]);
    }
    return out;
}

double line_flux(const FeFunction& u, double x, double y0, double y1, int samples)
{
    double flux = 0.0;
    const double dy = (y1 - y0) / samples;
    for (int i = 0; i <= samples; ++i) {
        const double w = (i == 0 || i == samples) ? 0.5 : 1.0;
        flux += w * dy * vector_at(u, Vec2(x, y0 + i * dy)).value[0];
    }
    return flux;
}

} // namespace

std::vector<Vec2> random_quad_velocities(int count, double max_speed, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double magnitude = max_speed * unit(rng);
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        out.emplace_back(magnitude * std::cos(angle), magnitude * std::sin(angle));
    }
    return out;
}

BentRandomResult run_bent_random(const BentRandomOptions& options)
{
    options.params.validate();
    QuadGrid grid = build_bent_quad_grid(options.channel, options.n_across, options.n_along);
    grid.payload = random_quad_velocities(grid.nx * grid.ny, options.max_speed, options.seed);
    auto mesh = std::make_shared<const TriMesh>(crisscross_refine(grid));

    BentRandomResult r;
    r.mesh = mesh;
    r.cell_velocity = grid.payload;
    const std::vector<Vec2> nodal = average_payload_to_vertices(*mesh, grid);
    r.u_m = FeFunction(build_space(mesh, 1, 2));
    for (int v = 0; v < mesh->num_vertices(); ++v) {
        r.u_m.coefficients[r.u_m.space->dof(v, 0)] = nodal[static_cast<std::size_t>(v)][0];
        r.u_m.coefficients[r.u_m.space->dof(v, 1)] = nodal[static_cast<std::size_t>(v)][1];
    }
    const VectorCoefficientPtr u_m = discrete_vector(r.u_m);
    r.exact = make_trig_case(options.params, u_m, options.a_scale);
    const ManufacturedCase& c = r.exact;
    r.exact.p_mean = domain_mean(*mesh, c.p);

    const auto vs = build_space(mesh, options.degree, 2);
    const VectorFn a = [&c](const Vec2& x) { return c.a_value(x); };
    const ProblemData data = problem_data(c, discrete_vector(interpolate(a, vs)));
    r.sigma = check_sigma_condition(options.params, *u_m, *mesh);
    r.solution = solve_perturbed_oseen(mesh, options.degree, options.params, data, options.settings);
    r.errors = error_norms(r.solution.velocity, r.solution.pressure, c, data);

    const std::vector<double> wh = vertex_values(r.solution.velocity);
    const std::vector<double> we = vertex_values(interpolate(c.w.value, vs));
    const auto n = static_cast<double>(wh.size());
    double mh = 0.0;
    double me = 0.0;
    for (std::size_t i = 0; i < wh.size(); ++i) {
        mh += wh[i] / n;
        me += we[i] / n;
    }
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < wh.size(); ++i) {
        sxy += (wh[i] - mh) * (we[i] - me);
        sxx += (wh[i] - mh) * (wh[i] - mh);
        syy += (we[i] - me) * (we[i] - me);
    }
    r.correlation = sxx > 0.0 && syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
    return r;
}

std::string bent_random_vtk(const BentRandomResult& r)
{
    const TriMesh& mesh = *r.mesh;
    const int nv = mesh.num_vertices();
    const ManufacturedCase& c = r.exact;
    VtkArray um{"u_m", 2, vertex_values(r.u_m)};
    VtkArray wh{"w_h", 2, vertex_values(r.solution.velocity)};
    VtkArray w{"w", 2, {}};
    VtkArray u{"u", 2, {}};
    VtkArray ph{"p_h", 1, {}};
    VtkArray p{"p", 1, {}};
    for (int v = 0; v < nv; ++v) {
        const Vec2& x = mesh.vertex(v);
        const Vec2 wv = c.w.value(x);
        w.values.insert(w.values.end(), {wv[0], wv[1]});
        u.values.insert(u.values.end(), {um.values[2 * static_cast<std::size_t>(v)] + wv[0],
                                         um.values[2 * static_cast<std::size_t>(v) + 1] + wv[1]});
        ph.values.push_back(r.solution.pressure.coefficients[v]);
        p.values.push_back(c.p_zero_mean(x));
    }
    VtkArray data{"u_data", 2, {}};
    for (int t = 0; t < mesh.num_cells(); ++t) {
        const Vec2& v = r.cell_velocity[static_cast<std::size_t>(mesh.parent_cells()[static_cast<std::size_t>(t)])];
        data.values.insert(data.values.end(), {v[0], v[1]});
    }
    std::ostringstream out;
    write_vtk(out, mesh, {u, um, wh, w, ph, p}, {data}, "bent-random");
    return out.str();
}

double parabolic_inlet(const Vec2& x)
{
    const double s = (x[1] - 0.5) / 0.5;
    return 1.0 - s * s;
}

std::string Profile::to_csv() const
{
    std::ostringstream out;
    out << "x,y,p_recovered,p_reference,speed_recovered,speed_reference\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        out << format_double(points[i][0]) << ',' << format_double(points[i][1]) << ','
            << format_double(p_recovered[i]) << ',' << format_double(p_reference[i]) << ','
            << format_double(speed_recovered[i]) << ',' << format_double(speed_reference[i]) << '\n';
    }
    return out.str();
}

NsRecoveryResult run_ns_recovery(const NsRecoveryOptions& o)
{
    NsRecoveryResult r;
    const RectBounds& b = o.channel;
    auto mesh = std::make_shared<const TriMesh>(
        build_rect_tri_mesh(b, o.coarse_nx, o.coarse_ny, TriPattern::CrissCross, true));
    r.mesh = mesh;

    // Step 1: coarse flow, computed on the recovery mesh itself.
    const CoarseNsAssembler::Params flow{o.mu, o.rho, o.flow_sigma};
    r.coarse = solve_coarse_ns(mesh, flow, parabolic_inlet, o.coarse_picard, o.settings.linear);
    r.u_m = r.coarse.velocity;
    const VectorCoefficientPtr u_m = discrete_vector(r.u_m);

    // Step 2: recover w and p from u_m.
    const PhysParams params{o.mu, o.rho, o.sigma, o.lambda, o.delta};
    params.validate();
    r.u_m_sup = velocity_sup_norm(*u_m, *mesh, 5);
    r.sigma_gradient = check_sigma_condition(params, *u_m, *mesh);
    const double area = mesh->total_area();
    double div_mean = 0.0;
    {
        CellQuadrature cq(*mesh, 2);
        std::vector<VectorSample> s(static_cast<std::size_t>(cq.rule().size()));
        for (int c = 0; c < mesh->num_cells(); ++c) {
            cq.reinit(c);
            u_m->evaluate(cq.context(), s);
            for (int q = 0; q < cq.rule().size(); ++q) {
                div_mean += cq.weight(q) * s[static_cast<std::size_t>(q)].gradient.trace() / area;
            }
        }
    }
    ProblemData data;
    data.u_m = u_m;
    const double sigma = o.sigma;
    const double rho = o.rho;
    data.f = derived_vector(
        [sigma, rho](const Vec2&, const VectorSample& s) { return Vec2(-sigma * s.value - rho * s.gradient * s.value); },
        u_m);
    data.g = derived_scalar([div_mean](const Vec2&, const VectorSample& s) { return -(s.gradient.trace() - div_mean); },
                            u_m);
    data.viscous_datum = o.viscous_datum;
    r.recovery = picard_perturbed_ns(mesh, 1, params, data, o.recovery_picard, o.settings);

    // Step 3: fine Taylor-Hood reference.
    r.reference_mesh = std::make_shared<const TriMesh>(
        build_rect_tri_mesh(b, o.reference_nx, o.reference_ny, TriPattern::Right, true));
    r.reference = solve_reference_ns(r.reference_mesh, flow, parabolic_inlet, o.reference_picard, o.settings.linear);

    const double p_rec_shift = mean_of(r.recovery.pressure);
    const double p_ref_shift = mean_of(r.reference.pressure);
    const int ns = std::max(2, o.profile_samples);
    const double xm = b.x0;
    const double ym = 0.5 * (b.y0 + b.y1);
    struct Line {
        std::string name;
        Vec2 from;
        Vec2 to;
    };
    const std::vector<Line> lines{{"x=0", Vec2(xm, b.y0), Vec2(xm, b.y1)},
                                  {"y=0.5", Vec2(b.x0, ym), Vec2(b.x1, ym)},
                                  {"y=1", Vec2(b.x0, b.y1), Vec2(b.x1, b.y1)}};
    double speed_scale = 0.0;
    for (const auto& line : lines) {
        Profile pr;
        pr.name = line.name;
        for (int i = 0; i < ns; ++i) {
            const Vec2 x = line.from + (line.to - line.from) * (static_cast<double>(i) / (ns - 1));
            pr.points.push_back(x);
            pr.p_recovered.push_back(scalar_at(r.recovery.pressure, x).value - p_rec_shift);
            pr.p_reference.push_back(scalar_at(r.reference.pressure, x).value - p_ref_shift);
            pr.speed_recovered.push_back((vector_at(r.u_m, x).value + vector_at(r.recovery.velocity, x).value).norm());
            pr.speed_reference.push_back(vector_at(r.reference.velocity, x).value.norm());
            speed_scale = std::max(speed_scale, pr.speed_reference.back());
        }
        double dp = 0.0;
        double pmax = 0.0;
        for (std::size_t i = 0; i < pr.points.size(); ++i) {
            dp = std::max(dp, std::abs(pr.p_recovered[i] - pr.p_reference[i]));
            pmax = std::max(pmax, std::abs(pr.p_reference[i]));
        }
        pr.pressure_deviation = pmax > 0.0 ? dp / pmax : dp;
        r.profiles.push_back(std::move(pr));
    }
    for (auto& pr : r.profiles) {
        double ds = 0.0;
        for (std::size_t i = 0; i < pr.points.size(); ++i) {
            ds = std::max(ds, std::abs(pr.speed_recovered[i] - pr.speed_reference[i]));
        }
        pr.speed_deviation = speed_scale > 0.0 ? ds / speed_scale : ds;
    }
    r.inlet_flux = line_flux(r.u_m, b.x0, b.y0, b.y1, 400);
    r.outlet_flux = line_flux(r.u_m, b.x1, b.y0, b.y1, 400);
    return r;
}

std::string ns_recovery_vtk(const NsRecoveryResult& r)
{
    const TriMesh& mesh = *r.mesh;
    VtkArray um{"u_m", 2, vertex_values(r.u_m)};
    VtkArray wh{"w_h", 2, vertex_values(r.recovery.velocity)};
    VtkArray u{"u", 2, {}};
    for (std::size_t i = 0; i < um.values.size(); ++i) {
        u.values.push_back(um.values[i] + wh.values[i]);
    }
    VtkArray ph{"p_h", 1, {}};
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        ph.values.push_back(r.recovery.pressure.coefficients[v]);
    }
    std::ostringstream out;
    write_vtk(out, mesh, {u, um, wh, ph}, {}, "ns-recovery");
    return out.str();
}

std::string ns_reference_vtk(const NsRecoveryResult& r)
{
    const TriMesh& mesh = *r.reference_mesh;
    VtkArray u{"u_ref", 2, vertex_values(r.reference.velocity)};
    VtkArray p{"p_ref", 1, {}};
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        p.values.push_back(r.reference.pressure.coefficients[v]);
    }
    std::ostringstream out;
    write_vtk(out, mesh, {u, p}, {}, "ns-reference");
    return out.str();
}

} // namespace oseen
