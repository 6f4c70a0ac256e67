#pragma once

#include "blochlab/band_structure.hpp"
#include "blochlab/initial_states.hpp"
#include "blochlab/momentum_dynamics.hpp"

#include <string>
#include <vector>

namespace blochlab {

/// Complex samples psi(x) on a uniform grid at rescaled time tau.
struct PositionWavepacket {
    XGrid grid;
    ComplexVector values;
    double tau = 0.0;
    std::vector<std::string> warnings;

    double norm() const;
};

/// psi(x) = sum_n int a_n(k) phi_n(k, x) dk by the rectangle rule.
///
/// The k sum and the plane-wave sum of u_n are folded into one sum over the
/// unfolded momenta q = k_j + 2 pi m / d, evaluated directly at every x.
/// The result is periodic in x with period N_k d.
PositionWavepacket bloch_synthesis(const MomentumState& amplitudes, const BandStructure& bands, const XGrid& x_grid);

/// b_n(k_j) = sum_l psi(x_l) conj(phi_n(k_j, x_l)) dx for the first num_bands bands.
MomentumState bloch_projection(const PositionWavepacket& packet, const BandStructure& bands, std::size_t num_bands);

/// Spacing d/16 and extent +-(Delta/F + 20 d + 8 sqrt(S^0)), Delta the widest occupied band
/// and S^0 the initial spread of a real-valued state (zero otherwise).
XGrid default_x_grid(const MomentumState& init, const BandStructure& bands, double force);

/// psi(x, tau) = sum_n int phi_n^0(k - tau) exp(i theta_n(k, tau)) phi_n(k, x) dk.
///
/// A grid narrower than +-(max_width/F + 10 d) or wider than one k-grid
/// period N_k d is accepted with a warning that carries the mass deficit.
PositionWavepacket reconstruct(const MomentumState& init, const BandStructure& bands, double force, double tau,
                               const XGrid& x_grid, const EvolveOptions& options = {});

struct Moments {
    double norm = 0.0;
    double mean = 0.0;
    /// Second central moment S = <x^2> - <x>^2.
    double variance = 0.0;
};

/// Rectangle-rule moments. Throws CoverageError when either edge sample
/// exceeds edge_tolerance times the peak density.
Moments direct_moments(const PositionWavepacket& packet, double edge_tolerance = 1e-8);

/// Rectangle-rule probability in [a, b]; the interval must lie inside the grid.
double mass_within(const PositionWavepacket& packet, double a, double b);

} // namespace blochlab
