#pragma once

#include "oseen/coefficient.hpp"
#include "oseen/space.hpp"

#include <Eigen/Sparse>

#include <span>
#include <vector>

namespace oseen {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Physical and stabilization parameters of the perturbed Oseen problem.
/// sigma plays the role of rho / (time step) in a semi-implicit time scheme.
struct PhysParams {
    double mu = 1.0;
    double rho = 1.0;
    double sigma = 1.0;
    double lambda = 0.5;
    double delta = 0.001;

    /// Throws std::invalid_argument unless every field is strictly positive.
    void validate() const;

    bool operator==(const PhysParams&) const = default;
};

/// tau_T = delta h_T^2 / (sigma h_T^2 + mu).
double tau_stab(double h, const PhysParams& p);

/// Largest delta accepted by the coercivity certificate for a given inverse
/// constant: (1/4) min{1/2, 1/C_inv^2} (exclusive).
double delta_coercivity_bound(double c_inv);

/// Coefficients of the perturbed Oseen problem
///   sigma w - mu Lap w + rho (grad u_m) w + rho (grad w)(a + u_m) + grad p = f,
///   div w = g.
struct ProblemData {
    VectorCoefficientPtr u_m = zero_vector();
    VectorCoefficientPtr a_h = zero_vector();
    VectorCoefficientPtr f = zero_vector();
    ScalarCoefficientPtr g = zero_scalar();
    /// Values of w on the boundary nodes; homogeneous when empty.
    VectorFn boundary_velocity;
    /// Also move the viscous term of u_m to the load: adds -mu (grad u_m, grad v)
    /// and uses f + mu Lap u_m inside the element-residual term.
    bool viscous_datum = false;
};

/// Switches for the pieces of B; all on for the stabilized scheme.
struct FormTerms {
    bool galerkin = true;       // A(.,.)
    bool convection = true;     // S_conv
    bool stabilization = true;  // S_press
    bool stabilization_laplacian = true;  // the mu Lap terms inside S_press
};

struct AssemblyOptions {
    int exactness = 0;  // quadrature exactness; 0 selects 2k + 3
    int threads = 1;
    FormTerms terms{};
    bool apply_constraints = true;
    bool mean_constraint = true;
};

struct DirichletDof {
    int dof = 0;
    double value = 0.0;
};

/// Unknown ordering [velocity | pressure | optional mean multiplier].
struct BlockLayout {
    int n_velocity = 0;
    int n_pressure = 0;
    bool multiplier = false;

    int size() const { return n_velocity + n_pressure + (multiplier ? 1 : 0); }
};

struct LinearSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    BlockLayout layout;
    /// Dirichlet dofs; after apply_constraints their rows are identity rows.
    std::vector<DirichletDof> dirichlet;
    /// Integral of every pressure basis function.
    Eigen::VectorXd mean_weights;
    bool constrained = false;
};

int default_exactness(int degree);

/// Matrix entry (i, j) = B(phi_j; phi_i), rhs_i = F(phi_i). With
/// options.apply_constraints, the boundary velocity values are imposed on all
/// boundary nodes and the pressure mean is fixed by a bordered multiplier.
LinearSystem assemble_stabilized(const FeSpace& velocity, const FeSpace& pressure, const PhysParams& params,
                                 const ProblemData& data, const AssemblyOptions& options = {});

/// x^T G x = |||(v, q)|||^2 for x = [v | q]:
/// sigma |v|_0^2 + mu |v|_1^2 + lambda |div v|_0^2 + sum_T tau_T |L_h(v, q)|_{0,T}^2.
SparseMatrix assemble_triple_norm_gram(const FeSpace& velocity, const FeSpace& pressure,
                                       const PhysParams& params, const ProblemData& data,
                                       const AssemblyOptions& options = {});

/// Symmetric elimination of Dirichlet dofs (the rhs is lifted) and, with
/// `mean_constraint`, a bordered row/column sum_j m_j p_j = 0.
LinearSystem apply_constraints(LinearSystem system, std::span<const DirichletDof> dirichlet,
                               bool mean_constraint);

/// Velocity dofs of boundary nodes whose marker bit is in `mask`, with values
/// from `values` (zero when empty).
std::vector<DirichletDof> velocity_boundary_dofs(const FeSpace& velocity, const VectorFn& values,
                                                 std::uint8_t mask = kOnAnyBoundary);

struct FieldPair {
    FeFunction velocity;
    FeFunction pressure;
};

FieldPair split_solution(const LinearSystem& system, const Eigen::VectorXd& x,
                         std::shared_ptr<const FeSpace> velocity, std::shared_ptr<const FeSpace> pressure);

/// [velocity | pressure] coefficients of a pair (no multiplier).
Eigen::VectorXd stack(const FeFunction& velocity, const FeFunction& pressure);

/// Picard-linearized stabilized Navier-Stokes operator on P1/P1 triangles:
///   sigma (u, v) + mu (grad u, grad v) + ((grad u) z, v) - (p, div v) + rho (div u, r)
///   + sum_K H_K^2 / (2 mu) (sigma u + (grad u) z + grad p - Lap u, grad r)_K
/// with z the frozen iterate. u = (u_p(y), 0) on INLET, u = 0 on WALL,
/// natural conditions on OUTLET.
class CoarseNsAssembler {
public:
    struct Params {
        double mu = 0.035;
        double rho = 1.0;
        double sigma = 0.0;
    };

    CoarseNsAssembler(std::shared_ptr<const TriMesh> mesh, Params params, ScalarFn inlet_profile,
                      int exactness = 5);

    const std::shared_ptr<const FeSpace>& velocity_space() const { return velocity_; }
    const std::shared_ptr<const FeSpace>& pressure_space() const { return pressure_; }
    const Params& params() const { return params_; }

    /// Constrained linear system for the frozen convection field `z`.
    LinearSystem picard_system(const FeFunction& z) const;

    /// Nonlinear residual of (u, p) restricted to the free dofs.
    Eigen::VectorXd residual(const FeFunction& u, const FeFunction& p) const;

    std::vector<DirichletDof> dirichlet_dofs() const;

private:
    LinearSystem assemble(const FeFunction& z) const;

    std::shared_ptr<const TriMesh> mesh_;
    Params params_;
    ScalarFn inlet_;
    int exactness_;
    std::shared_ptr<const FeSpace> velocity_;
    std::shared_ptr<const FeSpace> pressure_;
};

} // namespace oseen
