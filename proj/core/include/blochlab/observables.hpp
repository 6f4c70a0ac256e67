#pragma once

#include "blochlab/band_structure.hpp"
#include "blochlab/initial_states.hpp"
#include "blochlab/momentum_dynamics.hpp"
#include "blochlab/units.hpp"

#include <span>
#include <vector>

namespace blochlab {

/// One row per tau sample. Lengths are in units of d, energies in units of the band data.
struct ObservableTrace {
    RealVector tau;
    RealVector mean_k;
    RealVector centroid_shift;
    RealVector variance_shift;
    RealVector sigma;
    RealVector chi;
    /// S^0 of the initial state, shared by every row.
    double initial_spread = 0.0;

    std::size_t size() const { return tau.size(); }
};

/// (1/F) sum_n int |phi_n^0(k)|^2 [E_n(k+tau) - E_n(k)] dk.
double centroid_shift(const MomentumState& init, const BandStructure& bands, double force, double tau);

/// sum_n int E_n(k) |phi_n(k)|^2 dk.
double mean_band_energy(const MomentumState& state, const BandStructure& bands);

/// Position mean of phi in this representation, Re sum_n int conj(phi_n) i d_k phi_n dk (zero for real phi).
double representation_centroid(const MomentumState& state);

/// S^tau - S^0 for a real-valued initial state.
double variance_shift(const MomentumState& init, const BandStructure& bands, double force, double tau);

/// S^0 = sum_n int |d_k phi_n^0|^2 dk with a spectral derivative; real-valued states only.
double initial_spread(const MomentumState& init);

/// d<x>/dt = (1/hbar) <E_n'(k+tau)>^0.
double mean_velocity(const MomentumState& init, const BandStructure& bands, double tau, const UnitSystem& units);

/// d^2<x>/dt^2 = (F/hbar^2) <E_n''(k+tau)>^0.
double mean_acceleration(const MomentumState& init, const BandStructure& bands, double force, double tau,
                         const UnitSystem& units);

/// chi(tau) = max_k [E_n(k) - E_n(k - tau)]. The grid maximum is refined by a
/// quadratic fit through its neighbours and then polished with Newton steps
/// on the band-limited interpolant.
double localization_interval(const BandStructure& bands, std::size_t n, double tau);

struct TraceOptions {
    EvolveOptions evolve;
    /// Band whose chi(tau) fills the chi column; negative selects the most occupied band.
    long chi_band = -1;
};

/// Evaluate every observable on tau_grid. Rows are computed independently.
ObservableTrace trace(const MomentumState& init, const BandStructure& bands, double force,
                      std::span<const double> tau_grid, const UnitSystem& units, const TraceOptions& options = {});

} // namespace blochlab
