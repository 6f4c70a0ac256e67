#pragma once

#include "blochlab/band_structure.hpp"
#include "blochlab/initial_states.hpp"
#include "blochlab/oracle.hpp"
#include "blochlab/position_space.hpp"
#include "blochlab/potential.hpp"

namespace blochlab {

/// Decoupled propagation against the split-step oracle over one Bloch period.
struct FidelityPoint {
    double force = 0.0;
    double fidelity = 0.0;
    /// Probability the oracle state carries outside the bands occupied by the initial state.
    double residual = 0.0;
    double absorbed = 0.0;
    std::size_t steps = 0;
    double seconds = 0.0;
};

/// The oracle box must not exceed the period N_k d of the synthesized initial packet.
FidelityPoint decoupled_vs_oracle(const CrystalPotential& pot, const UnitSystem& units, const BandStructure& bands,
                                  const MomentumState& init, double force, const OracleConfig& cfg);

/// Direct position moments of reconstructed packets against the closed-form observables.
struct ReconstructionCheck {
    double tau = 0.0;
    double direct_centroid_shift = 0.0;
    double closed_centroid_shift = 0.0;
    double direct_variance_shift = 0.0;
    double closed_variance_shift = 0.0;
    double norm = 0.0;

    double centroid_error() const;
    double variance_error() const;
};

/// Both packets are built on x_grid; keep_phase = false drops theta_n entirely
/// (amplitudes phi^0(k - tau) are used as they are), which is the negative control.
ReconstructionCheck reconstruction_crosscheck(const MomentumState& init, const BandStructure& bands, double force,
                                              double tau, const XGrid& x_grid, bool keep_phase = true);

/// Probability, chi taken from the lowest band, inside [-chi(tau)/F - margin, chi(tau)/F + margin] of the reconstructed packet.
double breathing_mass(const MomentumState& init, const BandStructure& bands, double force, double tau,
                      double margin, const XGrid& x_grid);

} // namespace blochlab
