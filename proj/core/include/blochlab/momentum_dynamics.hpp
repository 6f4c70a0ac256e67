#pragma once

#include "blochlab/band_structure.hpp"
#include "blochlab/initial_states.hpp"

#include <vector>

namespace blochlab {

/// Amplitudes at time tau under the decoupled-band propagator.
struct EvolvedState {
    MomentumState state;
    double tau = 0.0;
    double force = 0.0;
};

struct EvolveOptions {
    /// Allow tau off the k grid; the translation then uses the band-limited interpolant.
    bool interpolate = false;
    /// Relative tolerance on tau / dk being an integer in exact mode.
    double commensurate_tolerance = 1e-9;
};

/// theta_n(k, tau) = -(A_n(k) - A_n(k - tau)) / F for the table's band and force.
double phase_factor(const PhaseTable& table, double k, double tau);

/// Holds one PhaseTable per band for a fixed force; evolve() may be called
/// concurrently for different tau.
class DecoupledPropagator {
  public:
    DecoupledPropagator(BandStructure bands, double force, std::size_t num_bands);

    const BandStructure& bands() const { return bands_; }
    double force() const { return force_; }
    const PhaseTable& table(std::size_t n) const { return tables_.at(n); }

    /// theta_n(k_j, tau) on the grid. In exact mode the periodic part is read
    /// from stored samples, so theta(., tau_B) is k-uniform to rounding.
    RealVector phases(std::size_t n, double tau, const EvolveOptions& options = {}) const;

    EvolvedState evolve(const MomentumState& init, double tau, const EvolveOptions& options = {}) const;

  private:
    BandStructure bands_;
    double force_;
    std::vector<PhaseTable> tables_;
};

/// phi_n(k, tau) = exp(i theta_n(k, tau)) phi_n^0(k - tau) for every band carried by init.
EvolvedState evolve_decoupled(const MomentumState& init, const BandStructure& bands, double force, double tau,
                              const EvolveOptions& options = {});

/// sum_n int k~ |phi_n(k)|^2 dk with k~ the representative of k in
/// [center - pi/d, center + pi/d). A sample lying on the branch cut counts as
/// the midpoint of its two representatives, i.e. as the center itself.
double mean_crystal_momentum(const MomentumState& state, double branch_center);

} // namespace blochlab
