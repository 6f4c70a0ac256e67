#pragma once

#include <blochlab/band_structure.hpp>
#include <blochlab/initial_states.hpp>
#include <blochlab/oracle.hpp>
#include <blochlab/potential.hpp>
#include <blochlab/units.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace blochlab::cli {

/// Bad or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct PotentialSpec {
    enum class Kind { analytic_cosine_band, cosine, fourier } kind = Kind::analytic_cosine_band;
    double period = 1.0;
    /// analytic_cosine_band only.
    double bandwidth = 1.0;
    /// cosine: V(x) = amplitude cos(2 pi x/d).
    double amplitude = 0.0;
    /// fourier: V_{-M}..V_{M}.
    ComplexVector coeffs;

    CrystalPotential potential() const;
};

struct StateSpec {
    StateKind kind = StateKind::wannier;
    double rho = 1.0;
    double k0 = 0.0;
    double width = 0.0;
    std::size_t band = 0;
};

struct GridSpec {
    std::size_t num_k = 256;
    int cutoff = 32;
    std::size_t num_bands = 4;
    bool check_cutoff = true;
    double cutoff_tolerance = 1e-8;
    double tau_min = 0.0;
    double tau_max = 0.0;
    /// Either tau_step (rescaled units) or tau_stride (multiples of dk) fixes the spacing.
    double tau_step = 0.0;
    long tau_stride = 0;
    std::optional<double> x_min;
    std::optional<double> x_max;
    std::optional<double> x_spacing;
};

struct ReconstructSpec {
    /// Snapshot times in units of the Bloch period.
    std::vector<double> snapshots = {0.0, 0.25, 0.5, 1.0};
    double margin = 10.0;
};

/// Defaults: a shallow lattice where Landau-Zener leakage dominates the infidelity.
struct SweepSpec {
    PotentialSpec potential{PotentialSpec::Kind::cosine, 1.0, 1.0, -0.19, {}};
    UnitSystem units{1.0, 0.05};
    std::size_t num_k = 640;
    int cutoff = 16;
    std::size_t num_bands = 2;
    double rho = 0.1;
    std::vector<double> forces = {0.08, 0.04, 0.02, 0.01};
    /// Physical time step; the oracle gets dtau = F dt / hbar.
    double dt = 0.05;
    OracleConfig oracle{320.0, 4096, 1e-3, 4};
    double fidelity_force = 0.01;
    double min_fidelity = 0.99;
    double max_residual = 1e-3;
};

/// Defaults: a deep lattice with a wide first gap.
struct CrossCheckSpec {
    PotentialSpec potential{PotentialSpec::Kind::cosine, 1.0, 1.0, -40.0, {}};
    UnitSystem units;
    double force = 0.05;
    std::size_t num_k = 256;
    int cutoff = 32;
    std::size_t num_bands = 4;
    double rho = 0.1;
    std::vector<double> periods = {0.25, 0.5};
    double tolerance = 0.02;
    double control_factor = 10.0;
    double margin = 10.0;
    double mass_threshold = 0.99;
};

struct ValidateSpec {
    bool run_sweep = true;
    SweepSpec sweep;
    CrossCheckSpec crosscheck;
    double acceleration_tolerance = 1e-10;
};

struct RunConfig {
    std::string name = "run";
    PotentialSpec potential;
    UnitSystem units;
    double force = 0.05;
    StateSpec initial_state;
    GridSpec grids;
    ReconstructSpec reconstruct;
    ValidateSpec validate;
    std::filesystem::path output_dir = "out";

    /// Checks every numeric precondition; throws ConfigError.
    void check() const;
};

/// Parse JSON text after applying dotted-path overrides of the form key.sub=value.
/// Values are read as JSON when they parse, otherwise as strings.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

BandStructure build_bands(const PotentialSpec& pot, const UnitSystem& units, std::size_t num_k, int cutoff,
                          std::size_t num_bands, bool check_cutoff, double cutoff_tolerance);
BandStructure build_bands(const RunConfig& cfg);
MomentumState build_state(const RunConfig& cfg);
/// Sorted tau samples; every entry commensurate with dk.
std::vector<double> build_tau_grid(const RunConfig& cfg);

} // namespace blochlab::cli
