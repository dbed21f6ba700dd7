#include "oseen/analysis.hpp"
#include "oseen/forms.hpp"
#include "oseen/solve.hpp"

#include <benchmark/benchmark.h>

using namespace oseen;

namespace {

struct KovasznaySetup {
    ManufacturedCase c;
    std::shared_ptr<const FeSpace> v;
    std::shared_ptr<const FeSpace> q;
    ProblemData data;

    KovasznaySetup(int n, int k)
        : c(make_kovasznay_case(0.01, 1.0, 1.0, ZetaVariant::Standard))
    {
        const auto mesh =
            std::make_shared<const TriMesh>(build_rect_tri_mesh(c.domain, n, n, TriPattern::Right));
        v = build_space(mesh, k, 2);
        q = build_space(mesh, k, 1);
        data = problem_data(c, discrete_vector(interpolate([this](const Vec2& x) { return c.a_value(x); }, v)));
    }
};

void BM_Assemble(benchmark::State& state)
{
    const KovasznaySetup s(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        LinearSystem sys = assemble_stabilized(*s.v, *s.q, s.c.params, s.data);
        benchmark::DoNotOptimize(sys.matrix.nonZeros());
    }
    state.counters["dofs"] = s.v->num_dofs() + s.q->num_dofs();
}

void BM_Solve(benchmark::State& state)
{
    const KovasznaySetup s(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    SolveSettings quiet;
    quiet.warn = [](std::string_view) {};
    for (auto _ : state) {
        OseenSolution sol = solve_perturbed_oseen(s.v->mesh_ptr(), s.v->degree(), s.c.params, s.data, quiet);
        benchmark::DoNotOptimize(sol.velocity.coefficients.data());
    }
    state.counters["dofs"] = s.v->num_dofs() + s.q->num_dofs();
}

} // namespace

BENCHMARK(BM_Assemble)->Args({16, 1})->Args({32, 1})->Args({16, 2})->Args({32, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Solve)->Args({16, 1})->Args({32, 1})->Args({16, 2})->Args({32, 2})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
