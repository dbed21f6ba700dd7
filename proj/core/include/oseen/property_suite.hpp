#pragma once

#include "oseen/forms.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace oseen {

struct PropertyResult {
    std::string name;
    bool passed = false;
    /// Signed distance to the threshold (positive when passing).
    double margin = 0.0;
    std::string detail;
    /// Informational checks never fail the ledger.
    bool informational = false;
};

struct PropertyLedger {
    std::vector<PropertyResult> results;

    void add(PropertyResult r) { results.push_back(std::move(r)); }
    bool all_passed() const;
    std::string to_text() const;
};

/// sigma tau_T <= delta and mu tau_T <= delta h_T^2 on every cell.
PropertyResult check_tau_bounds(const TriMesh& mesh, const PhysParams& params);

/// max over v in P_k of h_T |Lap v|_{0,T} / |v|_{1,T}, by a dense generalized
/// eigenproblem per cell (the reference triangle when `mesh` is null).
double estimate_c_inv(int degree, const TriMesh* mesh = nullptr);

struct CoercivityResult {
    double min_ratio = 0.0;
    int dimension = 0;
    bool certified = false;  // sigma and delta conditions hold
    double c_inv = 0.0;
    double delta_bound = 0.0;
    double sigma_margin = 0.0;
};

/// Minimum of x^T sym(B) x / x^T G x over velocities vanishing on the
/// boundary and zero-mean pressures. `random_vectors` = 0 solves the dense
/// generalized eigenproblem; otherwise samples that many random vectors.
CoercivityResult coercivity_ratio(std::shared_ptr<const TriMesh> mesh, int degree, const PhysParams& params,
                                  const ProblemData& data, int random_vectors = 0, std::uint64_t seed = 1);

/// Largest |((grad w) a, v) + ((grad v) a, w) + ((div a) w, v)| over `count`
/// random discrete triples; w, v vanish on the boundary, a does not.
double trilinear_identity_residual(std::shared_ptr<const TriMesh> mesh, int degree, int count,
                                   std::uint64_t seed = 1);

/// max |B_pv + B_vp^T| over the Galerkin coupling blocks.
double skew_coupling_defect(std::shared_ptr<const TriMesh> mesh, int degree, const PhysParams& params,
                            const ProblemData& data);

/// max |S - S'| between assemblies with and without the Laplacian terms of
/// S_press (zero for k = 1).
double laplacian_term_difference(std::shared_ptr<const TriMesh> mesh, int degree, const PhysParams& params,
                                 const ProblemData& data);

/// max over quadrature points of |sum phi_i - 1| and |sum grad phi_i|.
double partition_of_unity_defect(int degree);

/// Observed L2 and H1 interpolation rates of sin(pi x) sin(pi y) on the unit
/// square, finest pair of three refinements.
struct InterpolationRates {
    double l2 = 0.0;
    double h1 = 0.0;
};
InterpolationRates interpolation_rates(int degree, int base_cells = 4);

struct PropertySuiteOptions {
    std::vector<int> degrees{1, 2, 3};
    std::vector<int> mesh_sizes{2, 8};  // criss-cross unit squares
    PhysParams params{1.0, 1.0, 1.0, 0.5, 0.001};
    int random_vectors = 200;
    int trilinear_triples = 50;
    std::uint64_t seed = 1;
};

/// Runs every check across degrees and meshes. Failures are recorded, not
/// thrown.
PropertyLedger run_property_suite(const PropertySuiteOptions& options = {});

} // namespace oseen
