#pragma once

#include "oseen/analysis.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace oseen {

// Pressure from random velocity data in a bent channel.

struct BentRandomOptions {
    BentChannel channel{};
    int n_across = 9;
    int n_along = 77;
    double max_speed = 120.0;
    std::uint64_t seed = 1;
    PhysParams params{0.0483, 1.119, 5.37, 0.5, 0.5};
    int degree = 1;
    double a_scale = 0.9;
    SolveSettings settings{};
};

struct BentRandomResult {
    std::shared_ptr<const TriMesh> mesh;
    /// Per-quad random velocity and its vertex average u_m (P1).
    std::vector<Vec2> cell_velocity;
    FeFunction u_m;
    ManufacturedCase exact;
    OseenSolution solution;
    ErrorNorms errors;
    SigmaCondition sigma;
    /// Pearson correlation of nodal values of w_h and w.
    double correlation = 0.0;
};

/// Quad payload: magnitude uniform in [0, max_speed], angle uniform in
/// [0, 2 pi), drawn per quad in index order.
std::vector<Vec2> random_quad_velocities(int count, double max_speed, std::uint64_t seed);

BentRandomResult run_bent_random(const BentRandomOptions& options);

/// Point (u, u_m, w_h, w, p_h, p) and cell (u) arrays for VTK output.
std::string bent_random_vtk(const BentRandomResult& result);

// Navier-Stokes pressure recovery in a straight channel.

struct NsRecoveryOptions {
    RectBounds channel{0.0, 4.0, 0.0, 1.0};
    int coarse_nx = 40;
    int coarse_ny = 10;
    double mu = 0.035;
    double rho = 1.0;
    double sigma = 3.92;
    /// Reaction coefficient of the coarse and reference solves.
    double flow_sigma = 3.92;
    double lambda = 0.5;
    double delta = 0.001;
    PicardOptions coarse_picard{1e-10, 200};
    PicardOptions recovery_picard{1e-10, 200};
    PicardOptions reference_picard{1e-10, 200};
    int reference_nx = 200;
    int reference_ny = 50;
    /// Keep the viscous term of u_m in the load (-mu (grad u_m, grad v)).
    bool viscous_datum = true;
    int profile_samples = 101;
    SolveSettings settings{};
};

struct Profile {
    std::string name;  // "x=0", "y=0.5", "y=1"
    std::vector<Vec2> points;
    std::vector<double> p_recovered;
    std::vector<double> p_reference;
    std::vector<double> speed_recovered;  // |u_m + w_h|
    std::vector<double> speed_reference;  // |u_ref|
    double pressure_deviation = 0.0;      // max |dp| / max |p_ref| on the profile
    double speed_deviation = 0.0;         // max |d speed| / max |u_ref| over all profiles

    std::string to_csv() const;
};

struct NsRecoveryResult {
    std::shared_ptr<const TriMesh> mesh;
    std::shared_ptr<const TriMesh> reference_mesh;
    FlowSolution coarse;
    FeFunction u_m;
    double u_m_sup = 0.0;
    SigmaCondition sigma_gradient;  // sigma > 4 rho |grad u_m|
    OseenSolution recovery;
    FlowSolution reference;
    std::vector<Profile> profiles;
    double inlet_flux = 0.0;
    double outlet_flux = 0.0;
};

double parabolic_inlet(const Vec2& x);

NsRecoveryResult run_ns_recovery(const NsRecoveryOptions& options);

/// Recovery mesh: u = u_m + w_h, u_m, w_h, p_h at vertices.
std::string ns_recovery_vtk(const NsRecoveryResult& result);
/// Reference mesh: u_ref, p_ref at vertices.
std::string ns_reference_vtk(const NsRecoveryResult& result);

} // namespace oseen
