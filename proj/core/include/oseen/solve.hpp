#pragma once

#include "oseen/forms.hpp"

#include <functional>
#include <memory>
#include <string>
#include <string_view>

namespace oseen {

enum class SolverMethod { Direct, Krylov };

struct SolverOptions {
    SolverMethod method = SolverMethod::Direct;
    double rtol = 1e-10;
    int max_iterations = 5000;  // Krylov only
    int restart = 200;          // Krylov only

    bool operator==(const SolverOptions&) const = default;
};

/// Relative residual |Ax - b| / |b| (absolute when b = 0).
double relative_residual(const LinearSystem& system, const Eigen::VectorXd& x);

/// DIRECT: sparse LU with partial pivoting plus a few steps of iterative
/// refinement. KRYLOV: restarted GMRES preconditioned by a threshold ILU.
/// Throws SolverFailure when |Ax - b| / |b| > rtol on return.
Eigen::VectorXd solve_linear(const LinearSystem& system, const SolverOptions& options = {});

struct SolveReport {
    int iterations = 0;
    double final_update_norm = 0.0;
    double final_residual = 0.0;
    bool converged = false;
    double wall_time = 0.0;

    /// Flat `key=value` lines, each key prefixed with `prefix`.
    std::string to_key_value(std::string_view prefix = "") const;
};

using WarningSink = std::function<void(std::string_view)>;

struct SolveSettings {
    SolverOptions linear{};
    AssemblyOptions assembly{};
    /// Receives non-fatal diagnostics (e.g. a violated sigma condition);
    /// defaults to std::clog when empty.
    WarningSink warn;
};

struct SigmaCondition {
    bool satisfied = false;
    double margin = 0.0;     // sigma - 4 rho |grad u_m|_inf
    double grad_norm = 0.0;  // max over quadrature points of the max-row-sum norm
};

/// max over quadrature points of the max-row-sum norm of grad u_m.
double gradient_sup_norm(const VectorCoefficient& u_m, const TriMesh& mesh, int exactness);
/// max over quadrature points and mesh vertices of |u_m| (Euclidean).
double velocity_sup_norm(const VectorCoefficient& u_m, const TriMesh& mesh, int exactness);

/// sigma > 4 rho |grad u_m|_inf.
SigmaCondition check_sigma_condition(const PhysParams& params, const VectorCoefficient& u_m, const TriMesh& mesh,
                                     int exactness = 5);

struct OseenSolution {
    FeFunction velocity;
    FeFunction pressure;
    SolveReport report;
};

/// Assembles the stabilized scheme on P_k/P_k, imposes the boundary velocity
/// and the zero-mean pressure, and solves.
OseenSolution solve_perturbed_oseen(std::shared_ptr<const TriMesh> mesh, int degree, const PhysParams& params,
                                    const ProblemData& data, const SolveSettings& settings = {});

struct PicardOptions {
    double tol = 1e-6;
    int max_iter = 25;

    bool operator==(const PicardOptions&) const = default;
};

/// Picard iteration for the perturbed Navier-Stokes scheme: iterate n solves
/// the linear scheme with a_h = w_h^{n-1}, starting from w_h^0 = 0, until the
/// triple norm of the increment (pressure included) is <= tol. `data.a_h` is
/// ignored. Hitting max_iter returns the last iterate with converged = false.
OseenSolution picard_perturbed_ns(std::shared_ptr<const TriMesh> mesh, int degree, const PhysParams& params,
                                  const ProblemData& data, const PicardOptions& picard,
                                  const SolveSettings& settings = {});

struct FlowSolution {
    FeFunction velocity;
    FeFunction pressure;
    SolveReport report;
};

/// Picard solve of the stabilized P1/P1 coarse Navier-Stokes problem. The
/// update norm is |du|_2 / |u|_2 over velocity coefficients.
FlowSolution solve_coarse_ns(std::shared_ptr<const TriMesh> mesh, const CoarseNsAssembler::Params& params,
                             ScalarFn inlet_profile, const PicardOptions& picard,
                             const SolverOptions& linear = {});

/// Taylor-Hood P2/P1 Picard solve of
///   sigma u - mu Lap u + rho (grad u) u + grad p = 0, div u = 0
/// with the same boundary conditions as the coarse problem.
FlowSolution solve_reference_ns(std::shared_ptr<const TriMesh> mesh, const CoarseNsAssembler::Params& params,
                                ScalarFn inlet_profile, const PicardOptions& picard,
                                const SolverOptions& linear = {});

} // namespace oseen
