#pragma once

#include "blochlab/band_structure.hpp"
#include "blochlab/initial_states.hpp"
#include "blochlab/position_space.hpp"
#include "blochlab/potential.hpp"
#include "blochlab/units.hpp"

#include <span>
#include <vector>

namespace blochlab {

/// Full split-step integrator settings. The box is [-half_length, half_length) with periodic wrap.
struct OracleConfig {
    double half_length = 200.0;
    std::size_t points = 4096;
    /// Rescaled time step; the physical step is hbar * dtau / F.
    double dtau = 1e-3;
    /// 2 (Strang) or 4 (triple-jump composition of Strang steps).
    int splitting_order = 2;
    /// Fraction of the box on each side covered by the raised-cosine mask.
    double absorber_fraction = 0.1;
    /// Per-step depth of the mask at the outer edge.
    double absorber_strength = 0.05;
    /// Largest tolerated absorbed probability over the run.
    double absorbed_budget = 1e-6;
    /// Re-run at dtau/2 and compare terminal states.
    bool check_halving = false;
    double halving_tolerance = 1e-6;

    XGrid box() const { return XGrid::periodic_box(-half_length, half_length, points); }
    void validate() const;
};

struct OracleRun {
    std::vector<PositionWavepacket> snapshots;
    double absorbed = 0.0;
    std::size_t steps = 0;
    /// L2 distance between terminal states at dtau and dtau/2, negative when not checked.
    double halving_discrepancy = -1.0;
};

/// psi^0(x) = sum_n int phi_n^0(k) phi_n(k, x) dk on x_grid.
PositionWavepacket synthesize_position_state(const MomentumState& init, const BandStructure& bands,
                                             const XGrid& x_grid);

/// Integrate i F d psi/d tau = (-c d^2/dx^2 + V(x) - F x) psi from psi0.tau to each
/// entry of tau_grid (sorted, not earlier than psi0.tau), returning one snapshot per entry.
///
/// Throws OracleBudgetError when the absorbed probability exceeds the budget or
/// the halving check fails; the run data travels in the exception message only.
OracleRun split_step_evolve(const CrystalPotential& pot, const UnitSystem& units, double force,
                            const PositionWavepacket& psi0, std::span<const double> tau_grid, const OracleConfig& cfg);

struct Projection {
    MomentumState state;
    /// packet norm minus the norm captured by the kept bands.
    double residual = 0.0;
};

/// Overlaps with the first num_bands Bloch functions; ResidualError above max_residual.
Projection project_to_bands(const PositionWavepacket& packet, const BandStructure& bands, std::size_t num_bands,
                            double max_residual = 1e-3);

/// |sum_n int conj(a_n) b_n dk|; missing band rows count as zero.
double fidelity(const MomentumState& a, const MomentumState& b);

} // namespace blochlab
