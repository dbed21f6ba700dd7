#pragma once

#include "oseen/errors.hpp"
#include "oseen/solve.hpp"

#include <optional>
#include <string>
#include <vector>

namespace oseen {

enum class ZetaVariant { Paper, Standard };

std::string_view to_string(ZetaVariant v);
/// Parses "paper" / "standard"; nullopt otherwise.
std::optional<ZetaVariant> parse_zeta_variant(std::string_view text);

/// Paper:    (1 / 2 mu) sqrt(1 / (4 mu^2) + 4 pi^2)
/// Standard: 1 / (2 mu) - sqrt(1 / (4 mu^2) + 4 pi^2)
double kovasznay_zeta(double mu, ZetaVariant variant);

/// Analytic vector field with its derivatives; gradient(i, j) = d v_i / d x_j.
struct VectorField {
    VectorFn value;
    TensorFn gradient;
    VectorFn laplacian;
};

/// Exact solution (w, p) of the perturbed Oseen problem for given u_m and a,
/// with f and g derived from the strong form
///   sigma w - mu Lap w + rho (grad u_m) w + rho (grad w)(a + u_m) + grad p = f,
///   div w = g.
struct ManufacturedCase {
    std::string name;
    PhysParams params;
    RectBounds domain{0.0, 1.0, 0.0, 1.0};
    VectorField w;
    ScalarFn p;
    VectorFn grad_p;
    /// Measured velocity: analytic or discrete.
    VectorCoefficientPtr u_m;
    /// Convective field a = a_scale * w; a_scale = 1 is the nonlinear case.
    double a_scale = 0.9;
    /// Optional override of a (otherwise a_scale * w).
    std::optional<VectorField> a;
    /// Mean of p over the domain, subtracted so that the exact pressure has
    /// zero mean.
    double p_mean = 0.0;

    Vec2 a_value(const Vec2& x) const;
    Mat2 a_gradient(const Vec2& x) const;
    double p_zero_mean(const Vec2& x) const { return p(x) - p_mean; }
    /// f evaluated with u_m given as a sample (value and gradient at x).
    Vec2 force(const Vec2& x, const VectorSample& u_m_sample) const;
    double divergence(const Vec2& x) const { return w.gradient(x).trace(); }
};

/// Kovasznay-type case on (-1/2, 3/2) x (0, 2) with u = (x, -y), u_m = u - w.
ManufacturedCase make_kovasznay_case(double mu, double rho, double sigma, ZetaVariant variant,
                                     double a_scale = 0.9);

/// w = (pi cos(pi y) sin(pi x), -pi cos(pi x) sin(pi y)), p = cos(pi x) cos(pi y)
/// with a given measured field u_m. `p_mean` must be set by the caller when
/// the domain is not symmetric.
ManufacturedCase make_trig_case(const PhysParams& params, VectorCoefficientPtr u_m, double a_scale = 0.9);

/// Polynomial case whose exact solution lies in P2: w = (y^2, -x^2),
/// p = x + y - 1, u_m = (x, -y), a = (1 + y, 1 + x) (divergence free).
ManufacturedCase make_polynomial_case(const PhysParams& params);

/// Problem data for the case: u_m, f (derived from u_m), g = div w, and
/// boundary values of w. `a_h` is the convective coefficient actually used.
ProblemData problem_data(const ManufacturedCase& c, VectorCoefficientPtr a_h);

/// Mean of a scalar field over the mesh.
double domain_mean(const TriMesh& mesh, const ScalarFn& fn, int exactness = 8);

struct ErrorNorms {
    double e0_w = 0.0;
    double e1_w = 0.0;
    double e0_p = 0.0;
    double e_triple = 0.0;
};

/// Errors of (w_h, p_h) against the case. The pressure error is taken after
/// matching means. The triple-norm error uses the u_m and a_h of `data`.
ErrorNorms error_norms(const FeFunction& w_h, const FeFunction& p_h, const ManufacturedCase& c,
                       const ProblemData& data, int exactness = 0);

struct ConvergenceLevel {
    int level = 0;
    double h = 0.0;
    int ndof_w = 0;
    int ndof_p = 0;
    ErrorNorms errors;
    SolveReport report;
    int picard_iters = 0;
};

struct ConvergenceRecord {
    std::string name;
    int degree = 1;
    bool nonlinear = false;
    std::vector<ConvergenceLevel> levels;

    /// log(e_i / e_{i+1}) / log(h_i / h_{i+1}) for each pair; index i is the
    /// rate between level i and i + 1.
    std::vector<double> rates(double ErrorNorms::*norm) const;
    std::string to_csv() const;
};

struct StudyOptions {
    int base_cells = 4;  // cells per side on level 0
    TriPattern pattern = TriPattern::Right;
    SolveSettings settings{};
    PicardOptions picard{};
};

/// Uniform refinements of the case domain with base_cells * 2^i cells per
/// side. Linear: a_h = I_h(a). Nonlinear: Picard with a_h = w_h.
/// A solver failure at any level throws with the partial record attached.
ConvergenceRecord run_convergence_study(const ManufacturedCase& c, int degree, int levels, bool nonlinear,
                                        const StudyOptions& options = {});

class StudyFailure : public SolverFailure {
public:
    StudyFailure(const SolverFailure& cause, ConvergenceRecord partial)
        : SolverFailure(cause), partial_(std::move(partial))
    {}
    const ConvergenceRecord& partial() const { return partial_; }

private:
    ConvergenceRecord partial_;
};

} // namespace oseen
