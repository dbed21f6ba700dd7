#pragma once

#include "oseen/analysis.hpp"
#include "oseen/mesh.hpp"
#include "oseen/solve.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace oseen::cli {

enum class Experiment { Kovasznay, BentRandom, NsRecovery, Check };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view text);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KovasznaySection {
    std::vector<double> mu_values{1.0, 0.1, 0.01, 0.001};
    ZetaVariant zeta = ZetaVariant::Standard;
    bool linear = true;
    bool nonlinear = false;
    double a_scale = 0.9;
    int base_cells = 4;
    TriPattern pattern = TriPattern::Right;

    bool operator==(const KovasznaySection&) const = default;
};

struct BentRandomSection {
    int n_across = 9;
    int n_along = 77;
    double max_speed = 120.0;
    double inner_radius = 1.0;
    double outer_radius = 2.0;
    double leg_length = 3.0;
    double a_scale = 0.9;

    bool operator==(const BentRandomSection&) const = default;
};

struct NsRecoverySection {
    int coarse_nx = 40;
    int coarse_ny = 10;
    int reference_nx = 200;
    int reference_ny = 50;
    double flow_sigma = 3.92;
    bool viscous_datum = true;
    int profile_samples = 101;

    bool operator==(const NsRecoverySection&) const = default;
};

struct CheckSection {
    std::vector<int> degrees{1, 2, 3};
    std::vector<int> mesh_sizes{2, 8};
    int random_vectors = 200;
    int trilinear_triples = 50;

    bool operator==(const CheckSection&) const = default;
};

/// Flat key=value text with [section] headers. Top-level keys: experiment,
/// out. Sections: run, physics, solver, picard, and one per experiment.
/// Defaults depend on the experiment, so `experiment` must be present.
struct RunConfig {
    Experiment experiment = Experiment::Kovasznay;
    std::string out = "out";

    int degree = 1;
    int levels = 4;
    std::uint64_t seed = 1;
    int threads = 1;

    PhysParams params{};
    SolverOptions solver{};
    int exactness = 0;  // 0: 2k + 3
    PicardOptions picard{};

    KovasznaySection kovasznay{};
    BentRandomSection bent_random{};
    NsRecoverySection ns_recovery{};
    CheckSection check{};

    bool operator==(const RunConfig&) const = default;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

RunConfig default_config(Experiment e);

/// Throws ConfigError with the offending line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical form: every key, fixed order, shortest round-trip numbers.
std::string serialize_config(const RunConfig& config);

} // namespace oseen::cli
